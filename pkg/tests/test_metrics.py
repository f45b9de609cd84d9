import json

import numpy as np
import pytest

import pvt
from pvt import DimensionError, DomainError, PolarFrame, PolarParams


def _params(rng, shape=(3, 64, 64), p_lo=0.2, p_hi=0.8):
    return PolarParams(i=rng.uniform(0.3, 1.0, shape),
                       p=rng.uniform(p_lo, p_hi, shape),
                       phi=rng.uniform(0, np.pi, shape))


# ----------------------------------------------------------------------- psnr

def test_psnr_identical_caps():
    img = np.random.default_rng(80).uniform(0, 1, (16, 16))
    assert pvt.psnr(img, img) == 99.0


def test_psnr_offset_hand_value():
    ref = np.random.default_rng(81).uniform(0, 0.9, (32, 32))
    assert pvt.psnr(ref + 0.1, ref, peak=1.0) == pytest.approx(20.0, abs=1e-6)


def test_psnr_peak_doubling():
    rng = np.random.default_rng(82)
    ref = rng.uniform(0, 1, (32, 32))
    img = ref + rng.normal(0, 0.05, (32, 32))
    base = pvt.psnr(img, ref, peak=1.0)
    assert pvt.psnr(img, ref, peak=2.0) == pytest.approx(base + 20 * np.log10(2), abs=1e-9)


def test_psnr_monotone_in_mse():
    rng = np.random.default_rng(83)
    ref = rng.uniform(0, 1, (32, 32))
    noise = rng.normal(0, 1, (32, 32))
    small = pvt.psnr(ref + 0.01 * noise, ref)
    large = pvt.psnr(ref + 0.05 * noise, ref)
    assert small > large


def test_psnr_validation():
    with pytest.raises(DimensionError):
        pvt.psnr(np.zeros((4, 4)), np.zeros((4, 5)))
    with pytest.raises(DomainError):
        pvt.psnr(np.zeros((4, 4)), np.zeros((4, 4)), peak=0.0)


# ----------------------------------------------------------------------- ssim

def test_ssim_self_is_one():
    img = np.random.default_rng(84).uniform(0, 1, (32, 32))
    assert pvt.ssim(img, img) == 1.0


def test_ssim_negated_structure():
    rng = np.random.default_rng(85)
    x = rng.uniform(-0.4, 0.4, (64, 64))
    x -= x.mean()
    assert pvt.ssim(x + 0.5, 0.5 - x) < 0.0


def test_ssim_independent_noise_near_zero():
    rng = np.random.default_rng(86)
    a = rng.uniform(0, 1, (256, 256))
    b = rng.uniform(0, 1, (256, 256))
    assert abs(pvt.ssim(a, b)) < 0.1


def test_ssim_channel_average():
    rng = np.random.default_rng(87)
    a = rng.uniform(0, 1, (2, 24, 24))
    b = rng.uniform(0, 1, (2, 24, 24))
    per = [pvt.ssim(a[c], b[c]) for c in range(2)]
    assert pvt.ssim(a, b) == pytest.approx(np.mean(per), abs=1e-12)


def test_ssim_window_too_small():
    with pytest.raises(DimensionError):
        pvt.ssim(np.zeros((10, 10)), np.zeros((10, 10)))


# -------------------------------------------------------------------- mae_aop

def test_mae_zero_at_equal():
    phi = np.random.default_rng(88).uniform(0, np.pi, (16, 16))
    assert pvt.mae_aop(phi, phi) == 0.0


def test_mae_pi_shift_is_zero():
    phi = np.random.default_rng(89).uniform(0, np.pi, (16, 16))
    assert pvt.mae_aop(phi + np.pi, phi) == pytest.approx(0.0, abs=1e-9)


def test_mae_quarter_turn_is_ninety():
    phi = np.random.default_rng(90).uniform(0, np.pi / 2, (16, 16))
    assert pvt.mae_aop(phi + np.pi / 2, phi) == pytest.approx(90.0, abs=1e-9)


def test_mae_symmetric_and_bounded():
    rng = np.random.default_rng(91)
    a = rng.uniform(0, np.pi, (16, 16))
    b = rng.uniform(0, np.pi, (16, 16))
    assert pvt.mae_aop(a, b) == pytest.approx(pvt.mae_aop(b, a), abs=1e-12)
    assert 0.0 <= pvt.mae_aop(a, b) <= 90.0


# ------------------------------------------------------ evaluate_reconstruction

def test_evaluate_self_comparison():
    rng = np.random.default_rng(92)
    frame = pvt.render_directions(_params(rng))
    report = pvt.evaluate_reconstruction(frame, frame)
    assert report.psnr_i == 99.0 and report.psnr_p == 99.0
    assert report.ssim_i == 1.0 and report.ssim_p == 1.0
    assert report.mae_aop_deg == 0.0
    assert set(report.capped) == {"psnr_i", "psnr_p"}


def test_evaluate_constant_scene_through_operator():
    # spatially constant polarized scene; a fully unpolarized stack would
    # leave AoP undefined and the comparison meaningless
    shape = (3, 32, 32)
    params = PolarParams(i=np.full(shape, 0.6), p=np.full(shape, 0.5),
                         phi=np.full(shape, 1.0))
    gt = pvt.render_directions(params)
    layout = pvt.get_layout("imx250myr")
    pred = pvt.pseudo_inverse(pvt.apply_forward(gt, layout))
    report = pvt.evaluate_reconstruction(pred, gt)
    assert report.psnr_i == 99.0 and report.psnr_p == 99.0
    assert report.ssim_i >= 1.0 - 1e-9 and report.ssim_p >= 1.0 - 1e-9
    assert report.mae_aop_deg == pytest.approx(0.0, abs=1e-6)


def test_evaluate_dolp_noise_forty_db():
    rng = np.random.default_rng(93)
    params = _params(rng)
    clean = pvt.render_directions(params)
    noisy_p = np.clip(params.p + rng.normal(0, 0.01, params.p.shape), 0.0, 1.0)
    noisy = pvt.render_directions(PolarParams(i=params.i, p=noisy_p, phi=params.phi))
    report = pvt.evaluate_reconstruction(noisy, clean)
    assert report.psnr_p == pytest.approx(40.0, abs=0.2)


def test_evaluate_scale_invariance():
    rng = np.random.default_rng(94)
    gt = pvt.render_directions(_params(rng))
    pred = pvt.render_directions(_params(rng))
    base = pvt.evaluate_reconstruction(pred, gt)
    scaled = pvt.evaluate_reconstruction(PolarFrame(2.0 * pred.data),
                                         PolarFrame(2.0 * gt.data))
    assert scaled.psnr_i == pytest.approx(base.psnr_i, abs=1e-9)
    assert scaled.ssim_i == pytest.approx(base.ssim_i, abs=1e-9)
    assert scaled.psnr_p == base.psnr_p
    assert scaled.mae_aop_deg == base.mae_aop_deg
    assert scaled.normalization == pytest.approx(2.0 * base.normalization)


def test_evaluate_rejects_dark_gt():
    dark = PolarFrame(np.zeros((4, 3, 16, 16)))
    with pytest.raises(DomainError):
        pvt.evaluate_reconstruction(dark, dark)


def test_report_serialization():
    rng = np.random.default_rng(95)
    frame = pvt.render_directions(_params(rng, shape=(3, 16, 16)))
    report = pvt.evaluate_reconstruction(frame, frame, method_tag="self")
    d = json.loads(report.to_json())
    assert list(d.keys()) == ["psnr_i", "psnr_p", "ssim_i", "ssim_p",
                              "mae_aop_deg", "method_tag", "normalization",
                              "dolp_clamped", "capped"]
    assert d["method_tag"] == "self"
    table = report.to_table()
    assert "psnr_i [dB]" in table and "mae_aop [deg]" in table
