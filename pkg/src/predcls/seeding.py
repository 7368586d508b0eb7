"""Deterministic, platform-stable RNG derivation.

Python's builtin ``hash`` is salted per process, so every derived stream is
keyed through blake2b instead.  The same (seed, *parts) always yields the
same generator, across runs and machines.
"""

from __future__ import annotations

import hashlib

import numpy as np


def stable_digest(*parts: object) -> int:
    """64-bit digest of the canonical string form of ``parts``."""
    text = "\x1f".join(str(p) for p in parts)
    h = hashlib.blake2b(text.encode("utf-8"), digest_size=8)
    return int.from_bytes(h.digest(), "big")


def rng_from(*parts: object) -> np.random.Generator:
    """A fresh generator keyed by ``parts``."""
    return np.random.default_rng(stable_digest(*parts))
