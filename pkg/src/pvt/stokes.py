"""Polarization image formation and recovery.

A linear analyzer at angle ``theta`` observing partially linearly polarized
light with intensity ``i``, degree of linear polarization ``p`` and angle of
polarization ``phi`` transmits

    x_theta = i * (1 + p * cos(2 * (theta - phi)))

Four analyzer directions (0, 45, 90, 135 degrees) determine the first three
Stokes components and therefore (i, p, phi). Direction stacks are arrays
shaped (4, C, H, W) in that fixed angular order; per-parameter maps are
(C, H, W) with C in {1, 3}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError

#: Analyzer angles in radians, fixed ordering for every (4, ...) stack.
DIRECTIONS = np.array([0.0, np.pi / 4, np.pi / 2, 3 * np.pi / 4])

#: Divisor floor for DoLP at dark pixels; below it p and phi are zero by convention.
S0_FLOOR = 1e-12


def _as_float(a) -> np.ndarray:
    return np.asarray(a, dtype=np.float64)


@dataclass(frozen=True)
class PolarFrame:
    """Stack of the four analyzer images, shaped (4, C, H, W)."""

    data: np.ndarray

    def __post_init__(self):
        d = _as_float(self.data)
        if d.ndim != 4 or d.shape[0] != 4:
            raise DimensionError(
                f"PolarFrame.data must be (4, C, H, W), got {np.shape(self.data)}")
        if d.shape[1] not in (1, 3):
            raise DimensionError(f"PolarFrame needs C in {{1, 3}}, got C={d.shape[1]}")
        object.__setattr__(self, "data", d)

    @property
    def n_channels(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape


@dataclass(frozen=True)
class StokesFrame:
    """First three Stokes component maps, each shaped (C, H, W)."""

    s0: np.ndarray
    s1: np.ndarray
    s2: np.ndarray

    def __post_init__(self):
        s0, s1, s2 = map(_as_float, (self.s0, self.s1, self.s2))
        if s0.ndim != 3:
            raise DimensionError(
                f"Stokes maps need a channel axis: expected (C, H, W), got "
                f"{s0.ndim} axes with shape {s0.shape}")
        if s0.shape != s1.shape or s0.shape != s2.shape:
            raise DimensionError(
                f"Stokes maps must share one (C, H, W) shape, got "
                f"{s0.shape}, {s1.shape}, {s2.shape}")
        object.__setattr__(self, "s0", s0)
        object.__setattr__(self, "s1", s1)
        object.__setattr__(self, "s2", s2)

    @property
    def shape(self):
        return self.s0.shape


@dataclass(frozen=True)
class PolarParams:
    """Polarization parameter maps (intensity, DoLP, AoP), each (C, H, W).

    ``phi`` lives on the half circle [0, pi). ``clamped`` records whether the
    DoLP was clipped into [0, 1] on construction; renderers refuse p > 1.
    """

    i: np.ndarray
    p: np.ndarray
    phi: np.ndarray
    clamped: bool = False

    def __post_init__(self):
        i, p, phi = map(_as_float, (self.i, self.p, self.phi))
        if i.ndim != 3:
            raise DimensionError(
                f"parameter maps need a channel axis: expected (C, H, W), got "
                f"{i.ndim} axes with shape {i.shape}")
        if i.shape != p.shape or i.shape != phi.shape:
            raise DimensionError(
                f"parameter maps must share one (C, H, W) shape, got "
                f"{i.shape}, {p.shape}, {phi.shape}")
        object.__setattr__(self, "i", i)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "phi", phi)

    @property
    def shape(self):
        return self.i.shape


@dataclass(frozen=True)
class PolarFeatureStack:
    """Wrap-free polarization features, shaped (3*C, H, W).

    Rows 3c, 3c+1, 3c+2 hold (cos 2phi, sin 2phi, p) of channel c.
    """

    data: np.ndarray

    def __post_init__(self):
        d = _as_float(self.data)
        if d.ndim != 3 or d.shape[0] % 3 != 0:
            raise DimensionError(
                f"feature stack must be (3*C, H, W), got {np.shape(self.data)}")
        object.__setattr__(self, "data", d)


def render_directions(params: PolarParams) -> PolarFrame:
    """Simulate the four analyzer images from polarization parameters.

    Parameters
    ----------
    params : PolarParams
        Parameter maps. Every map must be finite, intensity non-negative and
        DoLP within [0, 1]; violations raise DomainError naming the field.

    Returns
    -------
    PolarFrame
        x_theta = i * (1 + p * cos(2 * (theta - phi))) for theta in the
        fixed direction order.
    """
    for name in ("i", "p", "phi"):
        if not np.all(np.isfinite(getattr(params, name))):
            raise DomainError(f"params.{name} contains non-finite values")
    if np.any(params.i < 0):
        raise DomainError(f"params.i has negative entries (min {params.i.min():.6g})")
    if np.any(params.p < 0) or np.any(params.p > 1.0):
        raise DomainError(
            f"params.p outside [0, 1] (range {params.p.min():.6g}..{params.p.max():.6g})")
    theta = DIRECTIONS.reshape(4, 1, 1, 1)
    x = params.i[None] * (1.0 + params.p[None] * np.cos(2.0 * (theta - params.phi[None])))
    return PolarFrame(x)


def stokes_from_directions(frame: PolarFrame) -> StokesFrame:
    """Linear Stokes recovery: s0 = (x0+x45+x90+x135)/2, s1 = x0-x90, s2 = x45-x135."""
    x0, x45, x90, x135 = frame.data
    return StokesFrame(s0=0.5 * (x0 + x45 + x90 + x135), s1=x0 - x90, s2=x45 - x135)


def params_from_stokes(stokes: StokesFrame, clamp: bool = True) -> PolarParams:
    """Convert Stokes maps to intensity, DoLP and AoP.

    Parameters
    ----------
    stokes : StokesFrame
    clamp : bool
        Clip DoLP into [0, 1]. Real mosaics produce slight excursions above 1
        through noise and interpolation; the flag is recorded on the result.

    Returns
    -------
    PolarParams
        i = s0/2, p = |(s1, s2)| / max(s0, 1e-12) and phi = atan2(s2, s1)/2
        folded into [0, pi). Pixels with s0 below the floor report p = 0 and
        phi = 0 by convention.
    """
    s0 = stokes.s0
    p = np.hypot(stokes.s1, stokes.s2) / np.maximum(s0, S0_FLOOR)
    phi = np.mod(0.5 * np.arctan2(stokes.s2, stokes.s1), np.pi)
    # mod can round up to pi itself for tiny negative angles; fold it to 0
    phi = np.where(phi >= np.pi, 0.0, phi)
    dark = s0 < S0_FLOOR
    p = np.where(dark, 0.0, p)
    phi = np.where(dark, 0.0, phi)
    if clamp:
        p = np.clip(p, 0.0, 1.0)
    return PolarParams(i=0.5 * s0, p=p, phi=phi, clamped=clamp)


def polar_params(frame: PolarFrame, clamp: bool = True) -> PolarParams:
    """One-call recovery chain: directions -> Stokes -> (i, p, phi)."""
    return params_from_stokes(stokes_from_directions(frame), clamp=clamp)


def aop_distance(a, b) -> np.ndarray:
    """Angular distance between AoP values on the half circle.

    d = (a - b) mod pi, then min(d, pi - d); the result lies in [0, pi/2]
    and treats phi and phi + pi as the same angle.
    """
    d = np.mod(_as_float(a) - _as_float(b), np.pi)
    return np.minimum(d, np.pi - d)


def encode_polar_features(params: PolarParams) -> PolarFeatureStack:
    """Embed AoP on the double-angle circle: (cos 2phi, sin 2phi, p) per channel."""
    two = 2.0 * params.phi
    feats = np.stack([np.cos(two), np.sin(two), params.p], axis=1)
    c = feats.shape[0]
    return PolarFeatureStack(feats.reshape(3 * c, *feats.shape[2:]))


def _hsv_to_rgb(h, s, v):
    # sextant conversion, vectorized; h in turns, s and v in [0, 1]
    h6 = np.mod(h, 1.0) * 6.0
    k = np.floor(h6).astype(int) % 6
    f = h6 - np.floor(h6)
    a = v * (1.0 - s)
    b = v * (1.0 - s * f)
    c = v * (1.0 - s * (1.0 - f))
    r = np.select([k == 0, k == 1, k == 2, k == 3, k == 4], [v, b, a, a, c], v)
    g = np.select([k == 0, k == 1, k == 2, k == 3, k == 4], [c, v, v, b, a], a)
    bl = np.select([k == 0, k == 1, k == 2, k == 3, k == 4], [a, a, c, v, v], b)
    return np.stack([r, g, bl], axis=-1)


def hsv_visualize(params: PolarParams) -> np.ndarray:
    """Joint polarization rendering as an (H, W, 3) RGB float image.

    Hue encodes AoP (phi / pi of a full hue turn, so the pi wrap lands back
    on red), saturation the clipped DoLP, value the intensity normalized by
    the frame maximum. Multi-channel inputs are reduced first: intensity by
    the channel mean, (p, phi) by averaging the double-angle vectors
    p*(cos 2phi, sin 2phi), which is wrap-safe.
    """
    u = np.mean(params.p * np.cos(2.0 * params.phi), axis=0)
    v = np.mean(params.p * np.sin(2.0 * params.phi), axis=0)
    p = np.hypot(u, v)
    phi = np.mod(0.5 * np.arctan2(v, u), np.pi)
    phi = np.where(phi >= np.pi, 0.0, phi)
    i = params.i.mean(axis=0)
    peak = float(i.max())
    val = i / peak if peak > 0 else np.zeros_like(i)
    return _hsv_to_rgb(phi / np.pi, np.clip(p, 0.0, 1.0), np.clip(val, 0.0, 1.0))
