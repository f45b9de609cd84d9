"""Temporal variation masks and polarization-aware training losses.

Real polarization dynamics are easy to confuse with illumination changes:
when intensity moves, DoLP and AoP estimates move with it even if the
underlying polarization state did not. The masks here measure, per pixel,
how much each quantity changed between aligned frames, and the gates damp
the DoLP/AoP variation signal wherever the intensity itself was unstable
(gate factor exp(-tau * chi_I)). Losses then concentrate supervision on
pixels whose polarization genuinely changed, plus a smoothness pull toward
the warped previous estimate elsewhere.

All distances are Charbonnier (a smooth L1 with floor eps) except AoP,
which uses the pi-periodic half-cosine (1 - cos 2*delta)/2 in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .errors import DimensionError, DomainError
from .flow import FlowField, backward_warp, softmax_splat
from .stokes import aop_distance  # noqa: F401  (re-exported convenience)

#: Charbonnier floor shared by every distance in this module.
CHARBONNIER_EPS = 1e-5
#: Intensity-gate decay rate.
MASK_DECAY_TAU = 10.0
#: Weight of the flow consistency term inside the pixel loss.
LAMBDA_FLOW = 0.1
#: Weight of the polarization terms against the pixel terms.
LAMBDA_POLAR = 0.2


def charbonnier_map(a, b, eps: float = CHARBONNIER_EPS) -> np.ndarray:
    """Elementwise sqrt((a - b)^2 + eps^2); equals eps where a == b."""
    d = np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)
    return np.sqrt(d * d + eps * eps)


def charbonnier(a, b, eps: float = CHARBONNIER_EPS) -> float:
    """Mean Charbonnier distance over all elements."""
    return float(np.mean(charbonnier_map(a, b, eps)))


def aop_cosine_map(phi_a, phi_b) -> np.ndarray:
    """Pi-periodic AoP distance (1 - cos(2*(a - b)))/2, ranged [0, 1]."""
    d = np.asarray(phi_a, dtype=np.float64) - np.asarray(phi_b, dtype=np.float64)
    return 0.5 * (1.0 - np.cos(2.0 * d))


@dataclass(frozen=True)
class VariationMasks:
    """Normalized temporal variation maps and their intensity-gated versions."""

    chi_i: np.ndarray
    chi_p: np.ndarray
    chi_phi: np.ndarray
    chi_dolp: np.ndarray
    chi_aop: np.ndarray
    tau: float = MASK_DECAY_TAU


def _minmax(d: np.ndarray) -> np.ndarray:
    lo = d.min()
    hi = d.max()
    if hi <= lo:
        # a constant distance map carries no variation signal
        return np.zeros_like(d)
    return (d - lo) / (hi - lo)


def variation_mask(v_prev: np.ndarray, v_curr: np.ndarray, flow: FlowField,
                   kind: str, eps: float = CHARBONNIER_EPS,
                   warp_mode: str = "backward") -> np.ndarray:
    """Per-pixel change of one quantity between motion-aligned frames.

    Parameters
    ----------
    v_prev, v_curr : ndarray
        (H, W) or (C, H, W) maps of the same quantity at t-1 and t.
        Channels are averaged after the distance.
    flow : FlowField
        For the default backward mode this is the reverse flow (t -> t-1) on
        the current grid; for warp_mode "forward" it is t-1 -> t and v_prev
        is splatted instead, holes falling back to the backward estimate.
    kind : str
        "intensity" or "dolp" (Charbonnier distance) or "aop" (half-cosine).
    warp_mode : str
        Which transport aligns v_prev onto the current frame; recorded by
        callers that serialize their configuration.

    Returns
    -------
    ndarray
        (H, W) map min-max normalized into [0, 1]; an everywhere-constant
        distance map (e.g. identical static frames) yields all zeros.
    """
    if kind not in ("intensity", "dolp", "aop"):
        raise DomainError(f"mask kind must be intensity/dolp/aop, got {kind!r}")
    if warp_mode not in ("backward", "forward"):
        raise DomainError(f"warp_mode must be backward or forward, got {warp_mode!r}")
    v_prev = np.asarray(v_prev, dtype=np.float64)
    v_curr = np.asarray(v_curr, dtype=np.float64)
    if v_prev.shape != v_curr.shape:
        raise DimensionError(
            f"frame shapes differ: {v_prev.shape} vs {v_curr.shape}")
    if warp_mode == "backward":
        aligned = backward_warp(v_prev, flow)
    else:
        aligned, cov = softmax_splat(v_prev, flow)
        fallback = backward_warp(v_prev, flow.negated())
        aligned = np.where(cov > 0, aligned, fallback)
    if kind == "aop":
        d = aop_cosine_map(aligned, v_curr)
    else:
        d = charbonnier_map(aligned, v_curr, eps)
    if d.ndim == 3:
        d = d.mean(axis=0)
    return _minmax(d)


def gate_masks(chi_i: np.ndarray, chi_p: np.ndarray, chi_phi: np.ndarray,
               tau: float = MASK_DECAY_TAU) -> VariationMasks:
    """Damp polarization variation where intensity itself was unstable.

    chi_dolp = exp(-tau * chi_i) * chi_p and likewise for AoP: a pixel whose
    intensity jumped (chi_i near 1) contributes at most exp(-tau) of its
    polarization variation.
    """
    maps = {"chi_i": np.asarray(chi_i, dtype=np.float64),
            "chi_p": np.asarray(chi_p, dtype=np.float64),
            "chi_phi": np.asarray(chi_phi, dtype=np.float64)}
    shape = maps["chi_i"].shape
    for name, m in maps.items():
        if m.shape != shape:
            raise DimensionError(f"{name} shape {m.shape} differs from {shape}")
        if m.min() < 0 or m.max() > 1:
            raise DomainError(f"{name} must lie in [0, 1], got "
                              f"[{m.min():.6g}, {m.max():.6g}]")
    gate = np.exp(-tau * maps["chi_i"])
    return VariationMasks(chi_i=maps["chi_i"], chi_p=maps["chi_p"],
                          chi_phi=maps["chi_phi"], chi_dolp=gate * maps["chi_p"],
                          chi_aop=gate * maps["chi_phi"], tau=tau)


def loss_var(p_pred, p_gt, phi_pred, phi_gt, masks: VariationMasks,
             eps: float = CHARBONNIER_EPS) -> float:
    """Variation loss: gated DoLP and AoP errors where polarization moved.

    mean over pixels of chi_dolp * charbonnier(p) + chi_aop * cos-distance(phi).
    Parameter maps may be (H, W) or (C, H, W); masks broadcast over channels.
    """
    dp = charbonnier_map(p_pred, p_gt, eps)
    dphi = aop_cosine_map(phi_pred, phi_gt)
    chi_dolp, chi_aop = masks.chi_dolp, masks.chi_aop
    if dp.ndim == 3:
        chi_dolp, chi_aop = chi_dolp[None], chi_aop[None]
    return float(np.mean(chi_dolp * dp + chi_aop * dphi))


def loss_smooth(p_pred, phi_pred, p_warp, phi_warp, chi_p, chi_phi,
                tau: float = MASK_DECAY_TAU, eps: float = CHARBONNIER_EPS) -> float:
    """Smoothness loss: pull static pixels toward the warped previous estimate.

    The gates here invert the logic of loss_var: exp(-tau * chi) is largest
    where the quantity did NOT change, so only temporally stable pixels are
    asked to match their motion-compensated history (p_warp, phi_warp).
    """
    wp = np.exp(-tau * np.asarray(chi_p, dtype=np.float64))
    wphi = np.exp(-tau * np.asarray(chi_phi, dtype=np.float64))
    dp = charbonnier_map(p_pred, p_warp, eps)
    dphi = aop_cosine_map(phi_pred, phi_warp)
    if dp.ndim == 3:
        wp, wphi = wp[None], wphi[None]
    return float(np.mean(wp * dp + wphi * dphi))


@dataclass(frozen=True)
class LossReport:
    """Scalar loss terms plus the composed totals and their weights."""

    l_int: float
    l_flow: float
    l_var: float
    l_smooth: float
    l_pix: float
    l_polar: float
    l_total: float
    lambda1: float = LAMBDA_FLOW
    lambda2: float = LAMBDA_POLAR
    epsilon: float = CHARBONNIER_EPS

    def as_dict(self) -> dict:
        return asdict(self)


def loss_total(l_int: float, l_flow: float, l_var: float, l_smooth: float,
               lambda1: float = LAMBDA_FLOW, lambda2: float = LAMBDA_POLAR,
               epsilon: float = CHARBONNIER_EPS) -> LossReport:
    """Compose the scalar terms: pix = int + l1*flow, total = pix + l2*(var + smooth)."""
    parts = {"l_int": l_int, "l_flow": l_flow, "l_var": l_var, "l_smooth": l_smooth}
    for name, val in parts.items():
        if not np.isfinite(val):
            raise DomainError(f"{name} must be finite, got {val!r}")
    l_pix = l_int + lambda1 * l_flow
    l_polar = l_var + l_smooth
    return LossReport(l_int=float(l_int), l_flow=float(l_flow), l_var=float(l_var),
                      l_smooth=float(l_smooth), l_pix=float(l_pix),
                      l_polar=float(l_polar),
                      l_total=float(l_pix + lambda2 * l_polar),
                      lambda1=lambda1, lambda2=lambda2, epsilon=epsilon)
