import numpy as np
import pytest

import pvt
from pvt import CHARBONNIER_EPS, DomainError, DimensionError, FlowField


# -------------------------------------------------------------- charbonnier

def test_charbonnier_floor():
    a = np.full((6, 6), 0.3)
    assert pvt.charbonnier(a, a) == pytest.approx(1e-5, abs=1e-15)


def test_charbonnier_hand_value():
    a = np.array([[3e-5]])
    b = np.array([[0.0]])
    expected = np.sqrt(9e-10 + 1e-10)
    assert pvt.charbonnier(a, b) == pytest.approx(expected, rel=1e-12)


def test_charbonnier_asymptotic():
    a = np.ones((4, 4))
    b = np.zeros((4, 4))
    assert pvt.charbonnier(a, b) == pytest.approx(1.0, rel=1e-2)


def test_charbonnier_map_shape_mismatch():
    with pytest.raises(ValueError):
        pvt.charbonnier_map(np.zeros((4, 4)), np.zeros((4, 5)))


# ------------------------------------------------------------ aop cosine map

def test_aop_map_zero_at_equal():
    phi = np.random.default_rng(60).uniform(0, np.pi, (5, 5))
    np.testing.assert_array_equal(pvt.aop_cosine_map(phi, phi), 0.0)


def test_aop_map_pi_periodic():
    phi = np.random.default_rng(61).uniform(0, np.pi, (5, 5))
    np.testing.assert_allclose(pvt.aop_cosine_map(phi + np.pi, phi), 0.0, atol=1e-9)


def test_aop_map_quarter_turn_is_one():
    d = pvt.aop_cosine_map(np.array([np.pi / 2]), np.array([0.0]))
    assert d[0] == pytest.approx(1.0, abs=1e-12)


# ------------------------------------------------------------ variation_mask

def test_mask_static_scene_is_zero():
    v = np.random.default_rng(62).uniform(0, 1, (12, 12))
    m = pvt.variation_mask(v, v, pvt.zero_flow((12, 12)), "intensity")
    np.testing.assert_array_equal(m, 0.0)


def test_mask_concentrates_on_moving_patch():
    prev = np.full((32, 32), 0.5)
    curr = np.full((32, 32), 0.5)
    prev[8:16, 8:16] = 0.9
    curr[10:18, 11:19] = 0.9
    m = pvt.variation_mask(prev, curr, pvt.zero_flow((32, 32)), "intensity")
    bbox = m[8:18, 8:19]
    assert bbox.sum() >= 0.90 * m.sum()
    assert m.min() >= 0.0 and m.max() <= 1.0


def test_mask_aop_periodicity():
    phi = np.random.default_rng(63).uniform(0, np.pi, (10, 10))
    m = pvt.variation_mask(phi, phi + np.pi, pvt.zero_flow((10, 10)), "aop")
    np.testing.assert_array_equal(m, 0.0)


def test_mask_forward_mode_compensates_translation():
    rng = np.random.default_rng(64)
    prev = rng.uniform(0.2, 0.8, (24, 24))
    # pure integer translation: prev shifted right 3, down 2
    curr = np.roll(np.roll(prev, 2, axis=0), 3, axis=1)
    fwd = FlowField(np.full((24, 24), 3.0), np.full((24, 24), 2.0))
    m = pvt.variation_mask(prev, curr, fwd, "intensity", warp_mode="forward")
    # compensated interior carries no variation; only the wrap seam lights up
    np.testing.assert_array_equal(m[2:, 3:], 0.0)
    assert m.min() >= 0.0 and m.max() <= 1.0
    assert m.max() > 0.1


def test_mask_validation():
    v = np.zeros((8, 8))
    zf = pvt.zero_flow((8, 8))
    with pytest.raises(DomainError):
        pvt.variation_mask(v, v, zf, "colour")
    with pytest.raises(DomainError):
        pvt.variation_mask(v, v, zf, "intensity", warp_mode="sideways")
    with pytest.raises(DimensionError):
        pvt.variation_mask(v, np.zeros((8, 9)), zf, "intensity")


def test_mask_deterministic():
    rng = np.random.default_rng(65)
    prev = rng.uniform(0, 1, (16, 16))
    curr = rng.uniform(0, 1, (16, 16))
    f = FlowField(rng.uniform(-1, 1, (16, 16)), rng.uniform(-1, 1, (16, 16)))
    a = pvt.variation_mask(prev, curr, f, "dolp")
    b = pvt.variation_mask(prev, curr, f, "dolp")
    np.testing.assert_array_equal(a, b)


# ---------------------------------------------------------------- gate_masks

def test_gate_identity_at_zero_intensity_change():
    rng = np.random.default_rng(66)
    chi_p = rng.uniform(0, 1, (8, 8))
    chi_phi = rng.uniform(0, 1, (8, 8))
    masks = pvt.gate_masks(np.zeros((8, 8)), chi_p, chi_phi)
    np.testing.assert_array_equal(masks.chi_dolp, chi_p)
    np.testing.assert_array_equal(masks.chi_aop, chi_phi)


def test_gate_full_suppression_value():
    ones = np.ones((4, 4))
    masks = pvt.gate_masks(ones, ones, ones, tau=10.0)
    assert abs(masks.chi_dolp[0, 0] - 4.5399929762484854e-05) < 1e-9


def test_gate_zero_dolp_stays_zero():
    rng = np.random.default_rng(67)
    masks = pvt.gate_masks(rng.uniform(0, 1, (6, 6)), np.zeros((6, 6)),
                           rng.uniform(0, 1, (6, 6)))
    np.testing.assert_array_equal(masks.chi_dolp, 0.0)


def test_gate_never_increases():
    rng = np.random.default_rng(68)
    chi_i = rng.uniform(0, 1, (12, 12))
    chi_p = rng.uniform(0, 1, (12, 12))
    chi_phi = rng.uniform(0, 1, (12, 12))
    masks = pvt.gate_masks(chi_i, chi_p, chi_phi)
    assert (masks.chi_dolp <= chi_p).all()
    assert (masks.chi_aop <= chi_phi).all()


def test_gate_validation():
    ok = np.zeros((4, 4))
    with pytest.raises(DomainError):
        pvt.gate_masks(ok + 1.5, ok, ok)
    with pytest.raises(DimensionError):
        pvt.gate_masks(ok, np.zeros((4, 5)), ok)


# ------------------------------------------------------------------ loss_var

def _masks_from(chi_i, chi_p, chi_phi):
    return pvt.gate_masks(chi_i, chi_p, chi_phi)


def test_loss_var_perfect_prediction_floor():
    rng = np.random.default_rng(69)
    p = rng.uniform(0, 1, (8, 8))
    phi = rng.uniform(0, np.pi, (8, 8))
    masks = _masks_from(np.zeros((8, 8)), rng.uniform(0, 1, (8, 8)),
                        rng.uniform(0, 1, (8, 8)))
    val = pvt.loss_var(p, p, phi, phi, masks)
    assert val == pytest.approx(masks.chi_dolp.mean() * CHARBONNIER_EPS, rel=1e-9)


def test_loss_var_zero_masks():
    rng = np.random.default_rng(70)
    z = np.zeros((8, 8))
    masks = _masks_from(z, z, z)
    assert pvt.loss_var(rng.uniform(0, 1, (8, 8)), rng.uniform(0, 1, (8, 8)),
                        rng.uniform(0, np.pi, (8, 8)),
                        rng.uniform(0, np.pi, (8, 8)), masks) == 0.0


def test_loss_var_single_pixel_hand_value():
    h = w = 8
    chi_phi = np.zeros((h, w))
    chi_phi[3, 4] = 1.0
    masks = _masks_from(np.zeros((h, w)), np.zeros((h, w)), chi_phi)
    p = np.full((h, w), 0.4)
    phi_gt = np.zeros((h, w))
    phi_pred = phi_gt.copy()
    phi_pred[3, 4] = np.pi / 2
    val = pvt.loss_var(p, p, phi_pred, phi_gt, masks)
    assert val == pytest.approx(1.0 / (h * w), rel=1e-9)


def test_loss_var_aop_shift_invariance():
    rng = np.random.default_rng(71)
    p = rng.uniform(0, 1, (8, 8))
    phi_a = rng.uniform(0, np.pi, (8, 8))
    phi_b = rng.uniform(0, np.pi, (8, 8))
    masks = _masks_from(rng.uniform(0, 1, (8, 8)), rng.uniform(0, 1, (8, 8)),
                        rng.uniform(0, 1, (8, 8)))
    a = pvt.loss_var(p, p, phi_a, phi_b, masks)
    b = pvt.loss_var(p, p, phi_a + np.pi, phi_b, masks)
    assert abs(a - b) < 1e-9


# --------------------------------------------------------------- loss_smooth

def test_loss_smooth_fully_masked_bound():
    rng = np.random.default_rng(72)
    p_pred = rng.uniform(0, 1, (8, 8))
    p_warp = rng.uniform(0, 1, (8, 8))
    phi_pred = rng.uniform(0, np.pi, (8, 8))
    phi_warp = rng.uniform(0, np.pi, (8, 8))
    ones = np.ones((8, 8))
    val = pvt.loss_smooth(p_pred, phi_pred, p_warp, phi_warp, ones, ones, tau=10.0)
    dmax = (pvt.charbonnier_map(p_pred, p_warp).max()
            + pvt.aop_cosine_map(phi_pred, phi_warp).max())
    assert val <= np.exp(-10.0) * dmax + 1e-15


def test_loss_smooth_static_floor():
    rng = np.random.default_rng(73)
    p = rng.uniform(0, 1, (8, 8))
    phi = rng.uniform(0, np.pi, (8, 8))
    z = np.zeros((8, 8))
    val = pvt.loss_smooth(p, phi, p, phi, z, z)
    assert val == pytest.approx(CHARBONNIER_EPS, abs=1e-9)


# ---------------------------------------------------------------- loss_total

def test_loss_total_zero():
    report = pvt.loss_total(0.0, 0.0, 0.0, 0.0)
    assert report.l_total == 0.0
    assert report.l_pix == 0.0 and report.l_polar == 0.0


def test_loss_total_unit_components():
    report = pvt.loss_total(1.0, 1.0, 1.0, 1.0)
    assert report.l_total == pytest.approx(1.5, abs=1e-9)
    assert report.l_pix == pytest.approx(1.1, abs=1e-9)
    assert report.l_polar == pytest.approx(2.0, abs=1e-9)


def test_loss_total_lambda2_zero():
    report = pvt.loss_total(0.7, 0.3, 5.0, 5.0, lambda2=0.0)
    assert report.l_total == report.l_pix


def test_loss_total_composition_identities():
    rng = np.random.default_rng(74)
    for _ in range(20):
        li, lf, lv, ls = rng.uniform(0, 3, 4)
        r = pvt.loss_total(li, lf, lv, ls)
        assert abs(r.l_pix - (r.l_int + r.lambda1 * r.l_flow)) < 1e-9
        assert abs(r.l_polar - (r.l_var + r.l_smooth)) < 1e-9
        assert abs(r.l_total - (r.l_pix + r.lambda2 * r.l_polar)) < 1e-9


def test_loss_total_affine_in_components():
    base = pvt.loss_total(0.5, 0.5, 0.5, 0.5)
    delta = 0.25
    assert pvt.loss_total(0.75, 0.5, 0.5, 0.5).l_total - base.l_total == pytest.approx(delta, abs=1e-9)
    assert pvt.loss_total(0.5, 0.75, 0.5, 0.5).l_total - base.l_total == pytest.approx(0.1 * delta, abs=1e-9)
    assert pvt.loss_total(0.5, 0.5, 0.75, 0.5).l_total - base.l_total == pytest.approx(0.2 * delta, abs=1e-9)
    assert pvt.loss_total(0.5, 0.5, 0.5, 0.75).l_total - base.l_total == pytest.approx(0.2 * delta, abs=1e-9)


def test_loss_total_rejects_non_finite():
    with pytest.raises(DomainError):
        pvt.loss_total(np.nan, 0.0, 0.0, 0.0)
    with pytest.raises(DomainError):
        pvt.loss_total(0.0, np.inf, 0.0, 0.0)


def test_loss_report_records_constants():
    r = pvt.loss_total(0.0, 0.0, 0.0, 0.0)
    d = r.as_dict()
    assert d["lambda1"] == 0.1 and d["lambda2"] == 0.2 and d["epsilon"] == 1e-5
