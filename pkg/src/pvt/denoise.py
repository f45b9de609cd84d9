"""Stokes-domain denoising.

Polarization parameters divide by S0, so noise in the difference components
S1 and S2 explodes in dark or weakly polarized regions. Both filters here
therefore smooth only S1 and S2 and leave S0 untouched; intensity keeps its
full sharpness and the DoLP/AoP estimates calm down.

The guided filter uses the intensity image as its guide: true polarization
edges in a scene almost always coincide with intensity edges, so guiding by
S0/2 suppresses noise without flattening real DoLP boundaries the way an
isotropic Gaussian does.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter, uniform_filter

from .errors import DimensionError, DomainError
from .stokes import StokesFrame

#: Kernel support cutoff in standard deviations for the Gaussian path.
GAUSSIAN_TRUNCATE = 3.0


@dataclass(frozen=True)
class GuidedFilterConfig:
    """Box radius and regularization of the guided filter."""

    radius: int = 8
    eps: float = 1e-3

    def __post_init__(self):
        if self.radius < 1:
            raise DomainError(f"guided filter radius must be >= 1, got {self.radius}")
        if self.eps <= 0:
            raise DomainError(f"guided filter eps must be > 0, got {self.eps}")


def gaussian_denoise_stokes(stokes: StokesFrame, sigma: float) -> StokesFrame:
    """Isotropic Gaussian smoothing of S1 and S2 (kernel cut at 3 sigma).

    Borders replicate. S0 passes through bit-identical.
    """
    if sigma <= 0:
        raise DomainError(f"gaussian sigma must be > 0, got {sigma}")
    smooth = lambda x: gaussian_filter(
        x, sigma=(0, sigma, sigma), truncate=GAUSSIAN_TRUNCATE, mode="nearest")
    return StokesFrame(s0=stokes.s0, s1=smooth(stokes.s1), s2=smooth(stokes.s2))


def _guided_filter_2d(guide: np.ndarray, src: np.ndarray, radius: int, eps: float):
    # He-style guided filter built from sliding box means
    size = 2 * radius + 1
    box = lambda x: uniform_filter(x, size=size, mode="nearest")
    mean_g = box(guide)
    mean_s = box(src)
    var_g = box(guide * guide) - mean_g * mean_g
    cov_gs = box(guide * src) - mean_g * mean_s
    a = cov_gs / (var_g + eps)
    b = mean_s - a * mean_g
    return box(a) * guide + box(b)


def guided_denoise_stokes(stokes: StokesFrame, config: GuidedFilterConfig = None,
                          per_channel: bool = False, guide=None) -> StokesFrame:
    """Edge-preserving smoothing of S1 and S2 guided by the intensity image.

    Parameters
    ----------
    stokes : StokesFrame
    config : GuidedFilterConfig, optional
        Defaults to radius 8, eps 1e-3.
    per_channel : bool
        When False (default) a single luma guide (channel mean of S0/2)
        steers every channel; when True each channel is guided by its own
        intensity plane.
    guide : array, optional
        External (C, H, W) intensity image to guide with, e.g. a cleaner
        exposure of the same scene; defaults to S0/2 of the input itself.

    Returns
    -------
    StokesFrame
        S0 passes through bit-identical.
    """
    config = config or GuidedFilterConfig()
    intensity = 0.5 * stokes.s0 if guide is None else np.asarray(guide, dtype=np.float64)
    if intensity.shape != stokes.s0.shape:
        raise DimensionError(
            f"guide shape {intensity.shape} does not match Stokes {stokes.s0.shape}")
    c = intensity.shape[0]
    if per_channel:
        guides = [intensity[k] for k in range(c)]
    else:
        guides = [intensity.mean(axis=0)] * c
    s1 = np.empty_like(stokes.s1)
    s2 = np.empty_like(stokes.s2)
    for k in range(c):
        s1[k] = _guided_filter_2d(guides[k], stokes.s1[k], config.radius, config.eps)
        s2[k] = _guided_filter_2d(guides[k], stokes.s2[k], config.radius, config.eps)
    return StokesFrame(s0=stokes.s0, s1=s1, s2=s2)


def guided_filter(guide: np.ndarray, src: np.ndarray,
                  config: GuidedFilterConfig = None) -> np.ndarray:
    """Plain 2-D guided filter for callers outside the Stokes pipeline."""
    config = config or GuidedFilterConfig()
    guide = np.asarray(guide, dtype=np.float64)
    src = np.asarray(src, dtype=np.float64)
    if guide.ndim != 2 or guide.shape != src.shape:
        raise DimensionError(
            f"guide and source must share one (H, W) shape, got "
            f"{guide.shape} and {src.shape}")
    return _guided_filter_2d(guide, src, config.radius, config.eps)
