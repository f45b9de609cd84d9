"""Mosaic initialization routes: stride-2 extraction and full-size reconstruction.

Two ways to turn a sensor readout back into a (4, C, H, W) stack:

* ``initialize_lr`` pulls each analyzer direction's stride-2 sample grid out
  of the mosaic. Under the default layout those samples form an RGGB Bayer
  pattern at half resolution, which a bilinear demosaicking pass completes to
  three color planes. Fast, alias-prone, half size: the standard network
  input.
* ``demosaic_full`` interpolates every (direction, color) lattice to full
  resolution with the Catmull-Rom pseudo-inverse: the reference non-learned
  reconstruction.
"""

from __future__ import annotations

import numpy as np
from scipy.ndimage import convolve

from .errors import DomainError
from .mosaic import MosaicFrame, pseudo_inverse
from .stokes import PolarFrame

# bilinear completion kernels; at an existing sample both reduce to identity
_KERNEL_G = np.array([[0.0, 1.0, 0.0], [1.0, 4.0, 1.0], [0.0, 1.0, 0.0]])
_KERNEL_RB = np.array([[1.0, 2.0, 1.0], [2.0, 4.0, 2.0], [1.0, 2.0, 1.0]])


def _direction_offsets(layout):
    """In-cell (row, col) offset of each direction, requiring a 2x2 carrier."""
    offsets = []
    for d in range(4):
        rr, cc = np.nonzero(layout.directions == d)
        if len(rr) != 4 or len(set(zip(rr % 2, cc % 2))) != 1:
            raise DomainError(
                f"layout {layout.name!r}: direction {d} does not sit on a "
                f"stride-2 grid; initialize_lr needs the 2x2 cell structure")
        offsets.append((int(rr[0] % 2), int(cc[0] % 2)))
    return offsets


def _bilinear_bayer(sub: np.ndarray, colors_sub: np.ndarray) -> np.ndarray:
    """Complete a Bayer-sampled grid to (3, h, w) by mask-normalized convolution."""
    out = np.empty((3,) + sub.shape, dtype=np.float64)
    for ch, kernel in ((0, _KERNEL_RB), (1, _KERNEL_G), (2, _KERNEL_RB)):
        mask = (colors_sub == ch).astype(np.float64)
        num = convolve(sub * mask, kernel, mode="constant", cval=0.0)
        den = convolve(mask, kernel, mode="constant", cval=0.0)
        out[ch] = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
    return out


def initialize_lr(mosaic: MosaicFrame) -> PolarFrame:
    """Half-resolution initialization of the polarization stack.

    For each analyzer direction the mosaic holds one sample per 2x2 cell;
    gathering them gives an (H/2, W/2) grid whose pixels still alternate
    color filters in a Bayer arrangement. Bilinear demosaicking of that grid
    yields the (4, 3, H/2, W/2) stack.

    Raises DomainError for layouts whose directions do not repeat on a
    stride-2 grid.
    """
    y = mosaic.data
    h, w = y.shape
    out = np.empty((4, 3, h // 2, w // 2), dtype=np.float64)
    for d, (dr, dc) in enumerate(_direction_offsets(mosaic.layout)):
        sub = y[dr::2, dc::2]
        ii, jj = np.indices(sub.shape)
        colors_sub = mosaic.layout.colors[(2 * ii + dr) % 4, (2 * jj + dc) % 4]
        out[d] = _bilinear_bayer(sub, colors_sub)
    return PolarFrame(out)


def demosaic_full(mosaic: MosaicFrame, green_mode: str = "union") -> PolarFrame:
    """Full-resolution reconstruction; alias for the Catmull-Rom pseudo-inverse."""
    return pseudo_inverse(mosaic, green_mode=green_mode)
