"""Division-of-focal-plane mosaic sampling and its bicubic pseudo-inverse.

A color-polarization sensor commits each pixel to one analyzer direction and
one color filter. The pattern repeats every 4x4 pixels (a superpixel): each
2x2 cell carries all four analyzer angles, and the four cells of a superpixel
follow an RGGB color order. The forward operator keeps exactly one of the
twelve (direction, color) planes per pixel; everything downstream works on
the sparse lattices that survive.

Per (direction, color) pair the surviving samples form regular lattices:
stride 4 in both axes for R and B, two interleaved stride-4 lattices for G.
The pseudo-inverse interpolates each lattice back to full resolution with a
Catmull-Rom kernel, which is interpolating, so re-applying the forward
operator on the reconstruction reproduces the mosaic at every pixel.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionError, DomainError, FormatError
from .stokes import PolarFrame

#: Color plane indices.
R, G, B = 0, 1, 2

_COLOR_LETTERS = {"R": R, "G": G, "B": B}
_DIRECTION_DEGREES = {0: 0, 45: 1, 90: 2, 135: 3}


@dataclass(frozen=True)
class MosaicLayout:
    """4x4 superpixel pattern: per-pixel analyzer direction and color filter.

    ``directions`` and ``colors`` are (4, 4) int tables indexed by
    (row mod 4, col mod 4); direction indices follow the fixed angular order
    0, 45, 90, 135 degrees and colors are 0=R, 1=G, 2=B. A valid table gives
    every direction one R, two G and one B sample per superpixel.
    """

    name: str
    directions: np.ndarray
    colors: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.directions, dtype=int)
        c = np.asarray(self.colors, dtype=int)
        if d.shape != (4, 4) or c.shape != (4, 4):
            raise DimensionError("layout tables must be 4x4")
        if d.min() < 0 or d.max() > 3:
            raise DomainError("direction indices must lie in 0..3")
        if c.min() < 0 or c.max() > 2:
            raise DomainError("color indices must lie in 0..2 (R, G, B)")
        for di in range(4):
            counts = np.bincount(c[d == di], minlength=3)
            if not np.array_equal(counts, [1, 2, 1]):
                raise DomainError(
                    f"layout {self.name!r}: direction {di} covers colors "
                    f"R={counts[0]} G={counts[1]} B={counts[2]}, need 1/2/1")
        object.__setattr__(self, "directions", d)
        object.__setattr__(self, "colors", c)

    def cells(self, direction: int, color: int):
        """Offsets (row, col) within the superpixel holding this plane's samples."""
        rr, cc = np.nonzero((self.directions == direction) & (self.colors == color))
        return list(zip(rr.tolist(), cc.tolist()))

    def to_text(self) -> str:
        """Serialize as the 16-line ``row col degrees colorletter`` table."""
        deg = [0, 45, 90, 135]
        letters = "RGB"
        lines = []
        for r in range(4):
            for c in range(4):
                lines.append(
                    f"{r} {c} {deg[self.directions[r, c]]} {letters[self.colors[r, c]]}")
        return "\n".join(lines) + "\n"


def _imx250myr() -> MosaicLayout:
    # analyzer angles per 2x2 cell: [[90, 45], [135, 0]]; cells RGGB over the superpixel
    directions = np.tile([[2, 1], [3, 0]], (2, 2))
    colors = np.repeat(np.repeat([[R, G], [G, B]], 2, axis=0), 2, axis=1)
    return MosaicLayout("imx250myr", directions, colors)


_PRESETS = {"imx250myr": _imx250myr}

DEFAULT_LAYOUT_NAME = "imx250myr"


def get_layout(name: str = DEFAULT_LAYOUT_NAME) -> MosaicLayout:
    """Look up a named layout preset."""
    try:
        return _PRESETS[name]()
    except KeyError:
        raise DomainError(
            f"unknown layout {name!r}; presets: {sorted(_PRESETS)}") from None


def layout_from_text(text: str, name: str = "custom") -> MosaicLayout:
    """Parse a 16-line ``row col degrees colorletter`` table into a layout.

    Raises FormatError on malformed lines and DomainError if the resulting
    table breaks the one-R/two-G/one-B per direction coverage rule.
    """
    directions = np.full((4, 4), -1, dtype=int)
    colors = np.full((4, 4), -1, dtype=int)
    rows = [ln for ln in (s.strip() for s in text.splitlines())
            if ln and not ln.startswith("#")]
    if len(rows) != 16:
        raise FormatError(f"layout table needs 16 entries, got {len(rows)}")
    for ln in rows:
        parts = ln.split()
        if len(parts) != 4:
            raise FormatError(f"bad layout line {ln!r}: need 'row col degrees color'")
        try:
            r, c, deg = int(parts[0]), int(parts[1]), int(parts[2])
        except ValueError as e:
            raise FormatError(f"bad layout line {ln!r}: {e}") from None
        if not (0 <= r < 4 and 0 <= c < 4):
            raise FormatError(f"layout position ({r}, {c}) outside the 4x4 superpixel")
        if deg not in _DIRECTION_DEGREES:
            raise FormatError(f"unknown analyzer angle {deg}, expected 0/45/90/135")
        letter = parts[3].upper()
        if letter not in _COLOR_LETTERS:
            raise FormatError(f"unknown color {parts[3]!r}, expected R/G/B")
        if directions[r, c] != -1:
            raise FormatError(f"duplicate layout entry for position ({r}, {c})")
        directions[r, c] = _DIRECTION_DEGREES[deg]
        colors[r, c] = _COLOR_LETTERS[letter]
    return MosaicLayout(name, directions, colors)


@dataclass(frozen=True)
class MosaicFrame:
    """Single-plane sensor readout (H, W) with the layout that produced it."""

    data: np.ndarray
    layout: MosaicLayout

    def __post_init__(self):
        d = np.asarray(self.data, dtype=np.float64)
        if d.ndim != 2:
            raise DimensionError(f"mosaic must be 2-D, got shape {np.shape(self.data)}")
        if d.shape[0] % 4 or d.shape[1] % 4:
            raise DimensionError(
                f"mosaic dims must be multiples of 4 (superpixel-aligned), got {d.shape}")
        object.__setattr__(self, "data", d)

    @property
    def shape(self):
        return self.data.shape


@dataclass(frozen=True)
class DegradationConfig:
    """Training-pair degradation: extra downsampling factor plus sensor noise."""

    m: int = 1
    noise_sigma: float = 0.0
    rng_seed: Optional[int] = None

    def __post_init__(self):
        if self.m not in (1, 2, 4):
            raise DomainError(f"degradation factor m must be 1, 2 or 4, got {self.m}")
        if self.noise_sigma < 0:
            raise DomainError(f"noise_sigma must be >= 0, got {self.noise_sigma}")


def _tiled_maps(layout: MosaicLayout, h: int, w: int):
    dir_map = np.tile(layout.directions, (h // 4, w // 4))
    col_map = np.tile(layout.colors, (h // 4, w // 4))
    return dir_map, col_map


def apply_forward(frame: PolarFrame, layout: Optional[MosaicLayout] = None,
                  config: Optional[DegradationConfig] = None) -> MosaicFrame:
    """Sample a full polarization stack down to the single-plane mosaic.

    Parameters
    ----------
    frame : PolarFrame
        (4, 3, H, W) stack; H and W must be multiples of 4.
    layout : MosaicLayout, optional
        Defaults to the imx250myr preset.
    config : DegradationConfig, optional
        When noise_sigma > 0, adds seeded Gaussian read noise and clips the
        readout at zero. Without noise the operator is a pure selection.

    Returns
    -------
    MosaicFrame
        Y[r, c] = X[dir(r, c), col(r, c), r, c] (+ noise).
    """
    layout = layout or get_layout()
    x = frame.data
    if frame.n_channels != 3:
        raise DimensionError(f"mosaicking needs a color stack (C=3), got C={frame.n_channels}")
    h, w = x.shape[2:]
    if h % 4 or w % 4:
        raise DimensionError(f"frame dims must be multiples of 4, got {h}x{w}")
    dir_map, col_map = _tiled_maps(layout, h, w)
    rr, cc = np.indices((h, w), sparse=True)
    y = x[dir_map, col_map, rr, cc]
    if config is not None and config.noise_sigma > 0:
        rng = np.random.default_rng(config.rng_seed)
        y = y + rng.normal(0.0, config.noise_sigma, size=y.shape)
        y = np.maximum(y, 0.0)
    return MosaicFrame(y, layout)


# ---------------------------------------------------------------------------
# Catmull-Rom interpolation


def _keys_weight(x):
    # Keys cubic with a = -0.5: interpolating, exact on linear ramps
    ax = np.abs(x)
    near = 1.5 * ax ** 3 - 2.5 * ax ** 2 + 1.0
    far = -0.5 * (ax ** 3 - 5.0 * ax ** 2 + 8.0 * ax - 4.0)
    return np.where(ax <= 1.0, near, np.where(ax < 2.0, far, 0.0))


def _resample_axis(arr: np.ndarray, pos: np.ndarray, axis: int) -> np.ndarray:
    """Catmull-Rom resample of one axis at fractional sample positions.

    Tap indices are clipped to the valid range, which replicates border
    samples. Integer positions reproduce the underlying sample exactly.
    """
    arr = np.moveaxis(arr, axis, -1)
    n = arr.shape[-1]
    base = np.floor(pos).astype(int)
    t = pos - base
    out = np.zeros(arr.shape[:-1] + (len(pos),), dtype=arr.dtype)
    for k in range(-1, 3):
        idx = np.clip(base + k, 0, n - 1)
        out += arr[..., idx] * _keys_weight(t - k)
    return np.moveaxis(out, -1, axis)


def bicubic_resize(img: np.ndarray, scale: float) -> np.ndarray:
    """Separable Catmull-Rom resize of the trailing two axes.

    Uses half-pixel center alignment (src = (dst + 0.5) / scale - 0.5) and
    replicate borders. scale = 1 is an exact identity. Raises DomainError for
    non-positive scales and DimensionError when an output axis would vanish.
    """
    if scale <= 0:
        raise DomainError(f"resize scale must be positive, got {scale}")
    img = np.asarray(img, dtype=np.float64)
    if img.ndim < 2:
        raise DimensionError("bicubic_resize needs at least 2 axes")
    h, w = img.shape[-2:]
    out_h, out_w = int(round(h * scale)), int(round(w * scale))
    if out_h < 1 or out_w < 1:
        raise DimensionError(f"scale {scale} collapses {h}x{w} to {out_h}x{out_w}")
    if (out_h, out_w) == (h, w):
        return img.copy()
    pos_r = (np.arange(out_h) + 0.5) * (h / out_h) - 0.5
    pos_c = (np.arange(out_w) + 0.5) * (w / out_w) - 0.5
    return _resample_axis(_resample_axis(img, pos_r, -2), pos_c, -1)


def bicubic_resize_to(img: np.ndarray, out_hw) -> np.ndarray:
    """Catmull-Rom resize of the trailing two axes to an explicit (H, W)."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim < 2:
        raise DimensionError("bicubic_resize_to needs at least 2 axes")
    out_h, out_w = int(out_hw[0]), int(out_hw[1])
    if out_h < 1 or out_w < 1:
        raise DimensionError(f"target shape {out_h}x{out_w} is empty")
    h, w = img.shape[-2:]
    if (out_h, out_w) == (h, w):
        return img.copy()
    pos_r = (np.arange(out_h) + 0.5) * (h / out_h) - 0.5
    pos_c = (np.arange(out_w) + 0.5) * (w / out_w) - 0.5
    return _resample_axis(_resample_axis(img, pos_r, -2), pos_c, -1)


def _interp_lattice(y: np.ndarray, r0: int, c0: int, stride: int = 4) -> np.ndarray:
    """Interpolate the (r0 + stride*i, c0 + stride*j) lattice of y to full size."""
    h, w = y.shape
    samples = y[r0::stride, c0::stride]
    pos_c = (np.arange(w) - c0) / stride
    rows = _resample_axis(samples, pos_c, -1)
    pos_r = (np.arange(h) - r0) / stride
    return _resample_axis(rows, pos_r, -2)


def _interp_green_union(y: np.ndarray, cells) -> Optional[np.ndarray]:
    """Two-pass reconstruction over both green lattices of one direction.

    Horizontal Catmull-Rom per green row class, then vertical across the
    merged stride-2 row lattice. Exact at every green sample site. Returns
    None when the two cells do not interleave into uniform rows (custom
    layouts); callers then fall back to per-lattice averaging.
    """
    (r1, c1), (r2, c2) = sorted(cells)
    if r2 - r1 != 2:
        return None
    h, w = y.shape
    rows1 = _resample_axis(y[r1::4, c1::4], (np.arange(w) - c1) / 4.0, -1)
    rows2 = _resample_axis(y[r2::4, c2::4], (np.arange(w) - c2) / 4.0, -1)
    merged = np.empty((h // 2, w), dtype=y.dtype)
    merged[0::2] = rows1
    merged[1::2] = rows2
    pos_r = (np.arange(h) - r1) / 2.0
    return _resample_axis(merged, pos_r, -2)


def pseudo_inverse(mosaic: MosaicFrame, green_mode: str = "union") -> PolarFrame:
    """Reconstruct the full (4, 3, H, W) stack from a mosaic by lattice interpolation.

    Parameters
    ----------
    mosaic : MosaicFrame
    green_mode : str
        "union" (default) runs the two-pass reconstruction across both green
        lattices per direction, which stays exact at every retained sample;
        "average" interpolates each green lattice separately and averages,
        which is cheaper but not knot-exact.

    Returns
    -------
    PolarFrame
        Applying the forward operator to the result reproduces the mosaic.
    """
    if green_mode not in ("union", "average"):
        raise DomainError(f"green_mode must be 'union' or 'average', got {green_mode!r}")
    y = mosaic.data
    h, w = y.shape
    out = np.empty((4, 3, h, w), dtype=np.float64)
    for d in range(4):
        for ch in (R, B):
            (r0, c0), = mosaic.layout.cells(d, ch)
            out[d, ch] = _interp_lattice(y, r0, c0)
        cells = mosaic.layout.cells(d, G)
        plane = _interp_green_union(y, cells) if green_mode == "union" else None
        if plane is None:
            plane = 0.5 * (_interp_lattice(y, *cells[0]) + _interp_lattice(y, *cells[1]))
        out[d, G] = plane
    return PolarFrame(out)


def difficulty_residual(frame: PolarFrame, layout: Optional[MosaicLayout] = None,
                        upscale: float = 1.0) -> np.ndarray:
    """High-frequency content lost by mosaic sampling: X - pinv(forward(X)).

    The residual vanishes on smooth regions (the pseudo-inverse reproduces
    them) and concentrates near edges and fine texture; it is upscaled
    bicubically by ``upscale`` so it can be injected at a larger working
    resolution. Returns a signed (4, C, H, W) array.
    """
    layout = layout or get_layout()
    recon = pseudo_inverse(apply_forward(frame, layout))
    res = frame.data - recon.data
    if upscale != 1.0:
        res = bicubic_resize(res, upscale)
    return res


def reorganize_proxy_gt(mosaic: MosaicFrame) -> PolarFrame:
    """Collapse each 4x4 superpixel into one quarter-resolution pixel.

    Every (direction, color) plane keeps its native samples: R and B copy
    their single sample per superpixel, the two green samples are averaged.
    No interpolation happens, so the result is alias-free ground truth at
    (4, 3, H/4, W/4) for training and evaluation.
    """
    y = mosaic.data
    h, w = y.shape
    out = np.empty((4, 3, h // 4, w // 4), dtype=np.float64)
    for d in range(4):
        for ch in (R, G, B):
            cells = mosaic.layout.cells(d, ch)
            planes = [y[r0::4, c0::4] for r0, c0 in cells]
            out[d, ch] = planes[0] if len(planes) == 1 else 0.5 * (planes[0] + planes[1])
    return PolarFrame(out)


def make_training_pair(proxy_gt: PolarFrame, config: DegradationConfig,
                       layout: Optional[MosaicLayout] = None):
    """Derive a (ground truth, degraded mosaic) pair from proxy ground truth.

    The stack is bicubically downsampled by the configured factor m and then
    pushed through the forward operator with the configured noise, so the
    input sits 2m x below the ground truth after the stride-2 initialization.

    Returns
    -------
    (PolarFrame, MosaicFrame)
        The unchanged ground truth and the degraded sensor readout.
    """
    layout = layout or get_layout()
    h, w = proxy_gt.data.shape[2:]
    if h % (4 * config.m) or w % (4 * config.m):
        raise DimensionError(
            f"proxy GT dims {h}x{w} must be multiples of 4*m = {4 * config.m}")
    x = proxy_gt.data
    if config.m > 1:
        x = bicubic_resize(x, 1.0 / config.m)
    mosaic_in = apply_forward(PolarFrame(x), layout, config)
    return proxy_gt, mosaic_in
