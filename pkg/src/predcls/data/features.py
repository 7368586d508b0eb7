"""Visual-feature providers.

The real pipeline would read pooled backbone features; here that stage is
abstracted behind two providers with identical contracts:

* ``SyntheticFeatureProvider`` derives features deterministically from the
  pair itself (classes, geometry, seed).  Subject/object vectors carry a
  per-class prototype plus noise; the predicate map mixes the rasterized
  pair masks and their coordinate moments across channels plus noise, so
  the map encodes relative layout the way pooled conv features would.
* ``PrecomputedFeatureProvider`` reads features from an ``.npz`` file
  written by :func:`write_feature_file`, keyed by pair content.

Both are pure functions of (pair, configuration): repeated calls return
identical arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable

import numpy as np

from ..errors import ConfigError, FeatureKeyError
from ..seeding import rng_from, stable_digest
from .masks import rasterize_masks
from .types import FeatureBundle, PairExample

FEATURE_FILE_VERSION = 1


@dataclass(frozen=True)
class FeatureShapes:
    """Configured dimensions of one feature bundle."""

    visual_dim: int = 256
    map_channels: int = 64
    map_size: int = 7

    def __post_init__(self) -> None:
        if min(self.visual_dim, self.map_channels) < 1 or self.map_size < 2:
            raise ConfigError(f"invalid feature shapes {self}")


def pair_key(pair: PairExample) -> str:
    """Canonical content key for one pair: image, classes and exact box coordinates."""
    s, o = pair.subject, pair.object
    return "|".join(
        [
            str(pair.image_id),
            str(s.class_id),
            repr((s.box.x1, s.box.y1, s.box.x2, s.box.y2)),
            str(o.class_id),
            repr((o.box.x1, o.box.y1, o.box.x2, o.box.y2)),
        ]
    )


class SyntheticFeatureProvider:
    """Deterministic stand-in for a frozen feature extractor.

    ``class_signal`` scales the per-class prototype in x_S/x_O and
    ``visual_noise`` the additive noise on top of it; ``map_signal`` and
    ``map_noise`` play the same roles for the spatial predicate map.
    """

    def __init__(
        self,
        shapes: FeatureShapes = FeatureShapes(),
        seed: int = 0,
        class_signal: float = 1.0,
        visual_noise: float = 1.0,
        map_signal: float = 1.0,
        map_noise: float = 0.5,
    ) -> None:
        self.shapes = shapes
        self.seed = seed
        self.class_signal = class_signal
        self.visual_noise = visual_noise
        self.map_signal = map_signal
        self.map_noise = map_noise
        self._proto_cache: Dict[int, np.ndarray] = {}
        # Fixed channel-mixing matrix for the predicate map: 7 basis maps
        # (subject mask, object mask, their coordinate-weighted copies and
        # the overlap) spread over map_channels.
        rng = rng_from(seed, "map-mixer", shapes.map_channels)
        self._mixer = rng.standard_normal((shapes.map_channels, 7)) / np.sqrt(7.0)

    def _prototype(self, class_id: int) -> np.ndarray:
        proto = self._proto_cache.get(class_id)
        if proto is None:
            rng = rng_from(self.seed, "class-prototype", class_id, self.shapes.visual_dim)
            proto = rng.standard_normal(self.shapes.visual_dim)
            self._proto_cache[class_id] = proto
        return proto

    def _basis_maps(self, pair: PairExample) -> np.ndarray:
        r = self.shapes.map_size
        masks = rasterize_masks(pair.subject.box, pair.object.box, resolution=r)
        ms = masks.grid[0].astype(np.float64)
        mo = masks.grid[1].astype(np.float64)
        coords = (np.arange(r) + 0.5) / r - 0.5
        ygrid = np.repeat(coords[:, None], r, axis=1)
        xgrid = np.repeat(coords[None, :], r, axis=0)
        return np.stack([ms, mo, ms * ygrid, ms * xgrid, mo * ygrid, mo * xgrid, ms * mo])

    def features_for(self, pair: PairExample) -> FeatureBundle:
        rng = rng_from(self.seed, "pair-features", pair_key(pair))
        d_v = self.shapes.visual_dim
        x_s = self.class_signal * self._prototype(pair.subject.class_id)
        x_s = x_s + self.visual_noise * rng.standard_normal(d_v)
        x_o = self.class_signal * self._prototype(pair.object.class_id)
        x_o = x_o + self.visual_noise * rng.standard_normal(d_v)

        basis = self._basis_maps(pair)
        x_p = self.map_signal * np.einsum("cb,bhw->chw", self._mixer, basis)
        x_p = x_p + self.map_noise * rng.standard_normal(x_p.shape)

        return FeatureBundle(
            x_s=x_s.astype(np.float32),
            x_o=x_o.astype(np.float32),
            x_p=x_p.astype(np.float32),
        )


class PrecomputedFeatureProvider:
    """Features read from an ``.npz`` written by :func:`write_feature_file`.

    File layout (documented contract): for every pair, three arrays named
    ``<digest>/x_s``, ``<digest>/x_o`` and ``<digest>/x_p`` where
    ``<digest>`` is the hex blake2b digest of :func:`pair_key`.
    """

    def __init__(self, path: str) -> None:
        self.path = path
        self._store = np.load(path)

    @staticmethod
    def key_digest(pair: PairExample) -> str:
        return format(stable_digest("feature-file", pair_key(pair)), "016x")

    def features_for(self, pair: PairExample) -> FeatureBundle:
        digest = self.key_digest(pair)
        try:
            return FeatureBundle(
                x_s=self._store[f"{digest}/x_s"],
                x_o=self._store[f"{digest}/x_o"],
                x_p=self._store[f"{digest}/x_p"],
            )
        except KeyError:
            raise FeatureKeyError(
                f"no precomputed features for pair {pair_key(pair)!r} in {self.path}"
            ) from None


def write_feature_file(path: str, pairs: Iterable[PairExample], provider) -> None:
    """Materialize ``provider``'s features for ``pairs`` into one ``.npz``."""
    arrays: Dict[str, np.ndarray] = {"__version__": np.asarray(FEATURE_FILE_VERSION)}
    for pair in pairs:
        bundle = provider.features_for(pair)
        digest = PrecomputedFeatureProvider.key_digest(pair)
        arrays[f"{digest}/x_s"] = bundle.x_s
        arrays[f"{digest}/x_o"] = bundle.x_o
        arrays[f"{digest}/x_p"] = bundle.x_p
    np.savez(path, **arrays)
