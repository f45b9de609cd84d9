"""Reconstruction quality metrics for polarization stacks.

Fidelity is scored in the parameter domain, not on raw analyzer images:
PSNR and SSIM on intensity and DoLP, mean absolute error in degrees on AoP
(with its pi periodicity respected). Intensity is normalized by the ground
truth peak before scoring so exposure conventions cancel; DoLP already
lives in [0, 1].
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy.ndimage import convolve

from .errors import DimensionError, DomainError
from .stokes import PolarFrame, aop_distance, polar_params

#: Reported PSNR for a zero-MSE pair.
PSNR_CAP = 99.0

_SSIM_WINDOW = 11
_SSIM_SIGMA = 1.5
_SSIM_K1 = 0.01
_SSIM_K2 = 0.03


def psnr(img, ref, peak: float = 1.0) -> float:
    """10 log10(peak^2 / MSE), capped at 99 dB for identical inputs."""
    img = np.asarray(img, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    if img.shape != ref.shape:
        raise DimensionError(f"shape mismatch: {img.shape} vs {ref.shape}")
    if peak <= 0:
        raise DomainError(f"peak must be > 0, got {peak}")
    mse = float(np.mean((img - ref) ** 2))
    if mse == 0.0:
        return PSNR_CAP
    return min(10.0 * np.log10(peak * peak / mse), PSNR_CAP)


def _ssim_kernel():
    half = _SSIM_WINDOW // 2
    ax = np.arange(-half, half + 1, dtype=np.float64)
    g = np.exp(-(ax ** 2) / (2 * _SSIM_SIGMA ** 2))
    k = np.outer(g, g)
    return k / k.sum()


_KERNEL = _ssim_kernel()


def _ssim_2d(a, b, peak):
    c1 = (_SSIM_K1 * peak) ** 2
    c2 = (_SSIM_K2 * peak) ** 2
    win = lambda x: convolve(x, _KERNEL, mode="constant")
    crop = _SSIM_WINDOW // 2
    mu_a = win(a)
    mu_b = win(b)
    var_a = win(a * a) - mu_a * mu_a
    var_b = win(b * b) - mu_b * mu_b
    cov = win(a * b) - mu_a * mu_b
    num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
    den = (mu_a ** 2 + mu_b ** 2 + c1) * (var_a + var_b + c2)
    ssim_map = num / den
    # keep only fully supported windows
    return float(np.mean(ssim_map[crop:-crop, crop:-crop]))


def ssim(img, ref, peak: float = 1.0) -> float:
    """Structural similarity with an 11x11 Gaussian window (sigma 1.5).

    Multi-channel inputs (C, H, W) return the channel average. Raises
    DimensionError when either spatial dim is smaller than the window.
    """
    img = np.asarray(img, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    if img.shape != ref.shape:
        raise DimensionError(f"shape mismatch: {img.shape} vs {ref.shape}")
    if peak <= 0:
        raise DomainError(f"peak must be > 0, got {peak}")
    if img.ndim == 2:
        img = img[None]
        ref = ref[None]
    if img.ndim != 3:
        raise DimensionError(f"ssim expects (H, W) or (C, H, W), got {img.shape}")
    if min(img.shape[-2:]) < _SSIM_WINDOW:
        raise DimensionError(
            f"image {img.shape[-2:]} smaller than the {_SSIM_WINDOW}x{_SSIM_WINDOW} window")
    return float(np.mean([_ssim_2d(img[c], ref[c], peak) for c in range(img.shape[0])]))


def mae_aop(phi_pred, phi_gt) -> float:
    """Mean absolute AoP error in degrees, wraparound-aware (range [0, 90])."""
    return float(np.degrees(np.mean(aop_distance(phi_pred, phi_gt))))


@dataclass(frozen=True)
class MetricsReport:
    """Parameter-domain scores for one reconstructed stack."""

    psnr_i: float
    psnr_p: float
    ssim_i: float
    ssim_p: float
    mae_aop_deg: float
    method_tag: str = ""
    normalization: float = 1.0
    dolp_clamped: bool = True
    capped: tuple = field(default_factory=tuple)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["capped"] = list(self.capped)
        return d

    def to_json(self) -> str:
        # field order is the declaration order, stable across runs
        return json.dumps(self.as_dict(), indent=2)

    def to_table(self) -> str:
        rows = [("psnr_i [dB]", f"{self.psnr_i:.4f}"),
                ("psnr_p [dB]", f"{self.psnr_p:.4f}"),
                ("ssim_i", f"{self.ssim_i:.5f}"),
                ("ssim_p", f"{self.ssim_p:.5f}"),
                ("mae_aop [deg]", f"{self.mae_aop_deg:.4f}")]
        if self.method_tag:
            rows.append(("method", self.method_tag))
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{width}}  {v:>10}" for k, v in rows)


def evaluate_reconstruction(pred: PolarFrame, gt: PolarFrame, method_tag: str = "",
                            clamp_dolp: bool = True) -> MetricsReport:
    """Score a reconstructed stack against ground truth in parameter space.

    Both stacks are converted to (intensity, DoLP, AoP); intensity is scored
    after dividing by the ground-truth peak (recorded as ``normalization``),
    DoLP against peak 1 with out-of-range values clipped when ``clamp_dolp``
    (recorded), AoP as mean wrapped error in degrees.

    Raises DomainError when the ground truth intensity is identically zero.
    """
    pp = polar_params(pred, clamp=clamp_dolp)
    gp = polar_params(gt, clamp=clamp_dolp)
    if pp.shape != gp.shape:
        raise DimensionError(f"stack shapes differ: {pp.shape} vs {gp.shape}")
    peak = float(gp.i.max())
    if peak <= 0:
        raise DomainError("ground truth intensity is identically zero")
    i_pred = pp.i / peak
    i_gt = gp.i / peak
    scores = {
        "psnr_i": psnr(i_pred, i_gt, peak=1.0),
        "psnr_p": psnr(pp.p, gp.p, peak=1.0),
        "ssim_i": ssim(i_pred, i_gt, peak=1.0),
        "ssim_p": ssim(pp.p, gp.p, peak=1.0),
    }
    capped = tuple(k for k in ("psnr_i", "psnr_p") if scores[k] >= PSNR_CAP)
    return MetricsReport(mae_aop_deg=mae_aop(pp.phi, gp.phi), method_tag=method_tag,
                         normalization=peak, dolp_clamped=clamp_dolp,
                         capped=capped, **scores)
