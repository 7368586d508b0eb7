"""Rasterization of a subject-object box pair into a binary mask grid.

Both boxes are drawn in the frame of their union box: the union is scaled
to fill the grid with aspect ratio preserved, and the leftover along the
shorter side is padded symmetrically.  The encoding is therefore invariant
to translating or uniformly rescaling the pair, which is what a relative
spatial-configuration feature should be.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from .types import BoundingBox, MaskPair


def rasterize_masks(subject: BoundingBox, object_: BoundingBox, resolution: int = 32) -> MaskPair:
    """Rasterize ``subject`` and ``object_`` into a (2, R, R) binary grid.

    A cell is set iff its center lies inside the corresponding box
    (half-open membership, [x1, x2) x [y1, y2)).  A box too small to
    capture any cell center still sets the single cell nearest its
    center, so each channel of the result is non-empty.
    """
    if resolution < 2:
        raise ConfigError(f"mask resolution must be >= 2, got {resolution}")
    for name, box in (("subject", subject), ("object", object_)):
        if box.area <= 0.0:
            raise ConfigError(f"{name} box is degenerate (zero area)")

    union = subject.union(object_)
    scale = resolution / max(union.width, union.height)
    # Symmetric padding of the shorter side, in grid units.
    pad_x = (resolution - union.width * scale) / 2.0
    pad_y = (resolution - union.height * scale) / 2.0

    # Box edges in grid coordinates; cell (i, j) has center (j + 0.5, i + 0.5).
    centers = np.arange(resolution) + 0.5
    grid = np.zeros((2, resolution, resolution), dtype=np.uint8)
    for channel, box in enumerate((subject, object_)):
        gx1 = (box.x1 - union.x1) * scale + pad_x
        gx2 = (box.x2 - union.x1) * scale + pad_x
        gy1 = (box.y1 - union.y1) * scale + pad_y
        gy2 = (box.y2 - union.y1) * scale + pad_y
        inside_x = (centers >= gx1) & (centers < gx2)
        inside_y = (centers >= gy1) & (centers < gy2)
        grid[channel] = inside_y[:, None] & inside_x[None, :]
        if not grid[channel].any():
            col = int(np.clip(np.floor((gx1 + gx2) / 2.0), 0, resolution - 1))
            row = int(np.clip(np.floor((gy1 + gy2) / 2.0), 0, resolution - 1))
            grid[channel, row, col] = 1

    return MaskPair(grid=grid)
