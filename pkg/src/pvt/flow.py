"""Dense optical flow: warping, splatting, differential structure, estimation.

Flow fields follow image conventions: ``u`` displaces along columns
(positive right), ``v`` along rows (positive down), both in pixels. A field
tagged (t_src, t_dst) gives, at each pixel of the t_src grid, where that
content lands on the t_dst grid.

Two warp primitives cover both transport directions. ``backward_warp``
gathers: the flow lives on the output grid and points at the source.
``softmax_splat`` scatters: the flow lives on the input grid, every pixel
deposits bilinearly around its target and collisions resolve by
exp(z)-weighted averaging, which degrades gracefully to plain averaging for
uniform z.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import convolve

from .errors import DimensionError, DomainError
from .mosaic import bicubic_resize, bicubic_resize_to

# replacement weights of the classic Horn-Schunck neighbourhood average
_HS_AVG = np.array([[1 / 12, 1 / 6, 1 / 12],
                    [1 / 6, 0.0, 1 / 6],
                    [1 / 12, 1 / 6, 1 / 12]])


@dataclass(frozen=True)
class FlowField:
    """Per-pixel displacement maps u (columns) and v (rows), shaped (H, W)."""

    u: np.ndarray
    v: np.ndarray
    t_src: float = 0.0
    t_dst: float = 1.0

    def __post_init__(self):
        u = np.asarray(self.u, dtype=np.float64)
        v = np.asarray(self.v, dtype=np.float64)
        if u.ndim != 2 or u.shape != v.shape:
            raise DimensionError(
                f"flow components must share one (H, W) shape, got {u.shape} and {v.shape}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def shape(self):
        return self.u.shape

    def negated(self) -> "FlowField":
        """Reverse the displacement (and swap the time tags)."""
        return FlowField(-self.u, -self.v, t_src=self.t_dst, t_dst=self.t_src)


def zero_flow(shape, t_src: float = 0.0, t_dst: float = 1.0) -> FlowField:
    """All-zero flow of the given (H, W) shape."""
    return FlowField(np.zeros(shape), np.zeros(shape), t_src, t_dst)


def _diff_cols(f):
    # forward difference, backward at the final column
    if f.shape[1] < 2:
        raise DimensionError("need at least 2 columns for derivatives")
    d = np.empty_like(f)
    d[:, :-1] = f[:, 1:] - f[:, :-1]
    d[:, -1] = f[:, -1] - f[:, -2]
    return d


def _diff_rows(f):
    if f.shape[0] < 2:
        raise DimensionError("need at least 2 rows for derivatives")
    d = np.empty_like(f)
    d[:-1] = f[1:] - f[:-1]
    d[-1] = f[-1] - f[-2]
    return d


def divergence(flow: FlowField) -> np.ndarray:
    """du/dw + dv/dh: positive where the field expands (sources)."""
    return _diff_cols(flow.u) + _diff_rows(flow.v)


def curl(flow: FlowField) -> np.ndarray:
    """dv/dw - du/dh: 2*omega inside a rigid rotation of rate omega."""
    return _diff_cols(flow.v) - _diff_rows(flow.u)


def backward_warp(img: np.ndarray, flow: FlowField) -> np.ndarray:
    """Gather-warp: output[q] = img sampled bilinearly at q + flow(q).

    The flow lives on the output grid and points into ``img``. Sampling
    clamps to the border (replicate). img may be (H, W) or (C, H, W); zero
    flow reproduces the input bit-exactly.
    """
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape[-2:]
    if flow.shape != (h, w):
        raise DimensionError(f"flow shape {flow.shape} does not match image {h}x{w}")
    rr, cc = np.indices((h, w))
    sr = np.clip(rr + flow.v, 0.0, h - 1.0)
    sc = np.clip(cc + flow.u, 0.0, w - 1.0)
    r0 = np.floor(sr).astype(int)
    c0 = np.floor(sc).astype(int)
    fr = sr - r0
    fc = sc - c0
    r1 = np.minimum(r0 + 1, h - 1)
    c1 = np.minimum(c0 + 1, w - 1)
    return (img[..., r0, c0] * (1 - fr) * (1 - fc)
            + img[..., r0, c1] * (1 - fr) * fc
            + img[..., r1, c0] * fr * (1 - fc)
            + img[..., r1, c1] * fr * fc)


def _splat_band(planes, weight, tr, tc, shape):
    """Bilinear scatter of one source band; returns (numerators, denominator)."""
    h, w = shape
    num = np.zeros((planes.shape[0], h, w))
    den = np.zeros((h, w))
    r0 = np.floor(tr).astype(int)
    c0 = np.floor(tc).astype(int)
    fr = tr - r0
    fc = tc - c0
    for dr, dc, wf in ((0, 0, (1 - fr) * (1 - fc)), (0, 1, (1 - fr) * fc),
                       (1, 0, fr * (1 - fc)), (1, 1, fr * fc)):
        r = r0 + dr
        c = c0 + dc
        ok = (r >= 0) & (r < h) & (c >= 0) & (c < w)
        if not ok.any():
            continue
        wv = (weight * wf)[ok]
        ri, ci = r[ok], c[ok]
        np.add.at(den, (ri, ci), wv)
        for k in range(planes.shape[0]):
            np.add.at(num[k], (ri, ci), planes[k][ok] * wv)
    return num, den


def _splat_accumulate(img, flow: FlowField, weight, workers: int = 1):
    img = np.asarray(img, dtype=np.float64)
    single = img.ndim == 2
    planes = img[None] if single else img
    h, w = planes.shape[-2:]
    if flow.shape != (h, w):
        raise DimensionError(f"flow shape {flow.shape} does not match image {h}x{w}")
    rr, cc = np.indices((h, w))
    tr = rr + flow.v
    tc = cc + flow.u
    if workers <= 1:
        num, den = _splat_band(planes, weight, tr, tc, (h, w))
    else:
        bounds = np.linspace(0, h, workers + 1).astype(int)
        bands = [(planes[:, a:b], weight[a:b], tr[a:b], tc[a:b])
                 for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda t: _splat_band(*t, (h, w)), bands))
        # fixed band order keeps the reduction deterministic for a given count
        num = np.zeros((planes.shape[0], h, w))
        den = np.zeros((h, w))
        for pn, pd in parts:
            num += pn
            den += pd
    return num, den, single


def softmax_splat(img: np.ndarray, flow: FlowField, z="uniform",
                  workers: int = 1):
    """Forward-warp by scattering: pixels deposit at q + flow(q).

    Parameters
    ----------
    img : ndarray
        (H, W) or (C, H, W) source.
    flow : FlowField
        Displacements on the source grid.
    z : "uniform" or (H, W) ndarray
        Importance field. Deposits carry weight exp(z); colliding sources
        therefore blend as a softmax over z, and "uniform" degrades to plain
        averaging. z is shifted by its maximum before exponentiation, so the
        result is invariant to adding a constant (and cannot overflow).
    workers : int
        Number of row bands accumulated in parallel. Band partials merge in
        a fixed order, so any worker count gives the same result up to float
        association.

    Returns
    -------
    (warped, coverage)
        warped matches img's shape, with zeros where nothing landed;
        coverage is the (H, W) sum of deposited weights.
    """
    h, w = np.shape(img)[-2:]
    if isinstance(z, str):
        if z != "uniform":
            raise DomainError(f"z must be 'uniform' or an array, got {z!r}")
        weight = np.ones((h, w))
    else:
        z = np.asarray(z, dtype=np.float64)
        if z.shape != (h, w):
            raise DimensionError(f"z shape {z.shape} does not match image {h}x{w}")
        weight = np.exp(z - z.max())
    num, den, single = _splat_accumulate(img, flow, weight, workers)
    out = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
    return (out[0] if single else out), den


def residual_importance(i0: np.ndarray, i1: np.ndarray, flow: FlowField) -> np.ndarray:
    """Importance z = -|brightness constancy residual| for softmax splatting.

    At source pixel q the residual compares i1 sampled at q + flow(q) against
    i0(q). Pixels whose motion explanation holds up keep importance near 0;
    mismatched ones (occlusions, noise) drop, so colliding consistent sources
    dominate the softmax.
    """
    i0 = np.asarray(i0, dtype=np.float64)
    if i0.ndim != 2 or i0.shape != flow.shape:
        raise DimensionError(
            f"intensity shape {i0.shape} does not match flow {flow.shape}")
    return -np.abs(backward_warp(i1, flow) - i0)


def blend_splat(frame0, frame1, flow_0t: FlowField, flow_1t: FlowField,
                t: float, workers: int = 1):
    """Interpolate between two frames by jointly normalized forward splats.

    Both frames scatter toward time t (flows must already be scaled to t),
    weighted (1 - t) and t, into shared accumulators. Pixels nobody reached
    are filled by backward-warping the temporally nearer frame with its
    negated flow.
    """
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"blend time t must lie in [0, 1], got {t}")
    n0, d0, single = _splat_accumulate(frame0, flow_0t, np.ones(flow_0t.shape), workers)
    n1, d1, _ = _splat_accumulate(frame1, flow_1t, np.ones(flow_1t.shape), workers)
    num = (1.0 - t) * n0 + t * n1
    den = (1.0 - t) * d0 + t * d1
    out = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
    holes = den == 0
    if holes.any():
        fill = (backward_warp(frame0, flow_0t.negated()) if t <= 0.5
                else backward_warp(frame1, flow_1t.negated()))
        fill = fill[None] if fill.ndim == 2 else fill
        out = np.where(holes, fill, out)
    return out[0] if single else out


def _hs_sweep(i0, i1w, alpha, iters, u, v):
    mean = 0.5 * (i0 + i1w)
    iy, ix = np.gradient(mean)
    it = i1w - i0
    den = alpha * alpha + ix * ix + iy * iy
    du = np.zeros_like(i0)
    dv = np.zeros_like(i0)
    for _ in range(iters):
        du_avg = convolve(du, _HS_AVG, mode="nearest")
        dv_avg = convolve(dv, _HS_AVG, mode="nearest")
        shared = (ix * du_avg + iy * dv_avg + it) / den
        du = du_avg - ix * shared
        dv = dv_avg - iy * shared
    return u + du, v + dv


def estimate_flow_hs(i0: np.ndarray, i1: np.ndarray, alpha: float = 0.1,
                     iters: int = 120) -> FlowField:
    """Horn-Schunck flow on a 3-level coarse-to-fine pyramid.

    Parameters
    ----------
    i0, i1 : ndarray
        Grayscale (H, W) frames; the returned field maps i0 onto i1.
    alpha : float
        Smoothness weight (squared in the data term denominator). The
        default suits images in [0, 1].
    iters : int
        Jacobi sweeps per pyramid level. Fully deterministic.
    """
    i0 = np.asarray(i0, dtype=np.float64)
    i1 = np.asarray(i1, dtype=np.float64)
    if i0.ndim != 2 or i0.shape != i1.shape:
        raise DimensionError(
            f"frames must share one (H, W) shape, got {i0.shape} and {i1.shape}")
    if alpha <= 0:
        raise DomainError(f"alpha must be > 0, got {alpha}")
    levels = [(i0, i1)]
    for _ in range(2):
        a, b = levels[-1]
        if min(a.shape) < 16:
            break
        levels.append((bicubic_resize(a, 0.5), bicubic_resize(b, 0.5)))
    u = np.zeros(levels[-1][0].shape)
    v = np.zeros_like(u)
    for li, (a, b) in enumerate(reversed(levels)):
        if li > 0:
            # displacements stretch with their own axis when moving up a level
            u = bicubic_resize_to(u, a.shape) * (a.shape[1] / u.shape[1])
            v = bicubic_resize_to(v, a.shape) * (a.shape[0] / v.shape[0])
        bw = backward_warp(b, FlowField(u, v))
        u, v = _hs_sweep(a, bw, alpha, iters, u, v)
    return FlowField(u, v, t_src=0.0, t_dst=1.0)


def scale_flow(flow: FlowField, spatial: float = 1.0, temporal: float = 1.0) -> FlowField:
    """Resize a flow field spatially and rescale its magnitude.

    Spatial resizing multiplies the displacement values by the same factor
    (pixels stretch with the grid); ``temporal`` scales magnitudes linearly
    for intermediate-time targets, updating t_dst accordingly.
    """
    u, v = flow.u, flow.v
    if spatial != 1.0:
        u = bicubic_resize(u, spatial) * spatial
        v = bicubic_resize(v, spatial) * spatial
    if temporal != 1.0:
        u = u * temporal
        v = v * temporal
    t_dst = flow.t_src + (flow.t_dst - flow.t_src) * temporal
    return FlowField(u, v, t_src=flow.t_src, t_dst=t_dst)
