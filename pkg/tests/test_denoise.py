import numpy as np
import pytest

import pvt
from pvt import DimensionError, DomainError, GuidedFilterConfig, StokesFrame


def _stokes(rng, c=1, h=32, w=32):
    return StokesFrame(s0=rng.uniform(1.0, 2.0, (c, h, w)),
                       s1=rng.uniform(-0.5, 0.5, (c, h, w)),
                       s2=rng.uniform(-0.5, 0.5, (c, h, w)))


def _const_stokes(s0, s1, s2, c=1, h=16, w=16):
    shape = (c, h, w)
    return StokesFrame(s0=np.full(shape, s0), s1=np.full(shape, s1),
                       s2=np.full(shape, s2))


def test_gaussian_constant_invariant():
    st = _const_stokes(2.0, 0.3, -0.2)
    out = pvt.gaussian_denoise_stokes(st, 1.5)
    np.testing.assert_allclose(out.s1, 0.3, atol=1e-10)
    np.testing.assert_allclose(out.s2, -0.2, atol=1e-10)


def test_gaussian_impulse_preserves_sum():
    s1 = np.zeros((1, 33, 33))
    s1[0, 16, 16] = 1.0
    out = pvt.gaussian_denoise_stokes(
        StokesFrame(s0=np.ones_like(s1), s1=s1, s2=np.zeros_like(s1)), 2.0)
    np.testing.assert_allclose(out.s1.sum(), 1.0, atol=1e-9)
    assert out.s1.max() < 1.0  # spread out, not a copy


def test_gaussian_contracts_variance():
    rng = np.random.default_rng(41)
    st = _stokes(rng)
    out = pvt.gaussian_denoise_stokes(st, 1.5)
    assert out.s1.var() < st.s1.var()
    assert out.s2.var() < st.s2.var()


def test_gaussian_leaves_s0_alone_and_no_overshoot():
    rng = np.random.default_rng(42)
    st = _stokes(rng)
    out = pvt.gaussian_denoise_stokes(st, 2.5)
    assert out.s0 is st.s0
    assert out.s1.max() <= st.s1.max() + 1e-9
    assert out.s1.min() >= st.s1.min() - 1e-9


def test_gaussian_rejects_bad_sigma():
    rng = np.random.default_rng(43)
    with pytest.raises(DomainError):
        pvt.gaussian_denoise_stokes(_stokes(rng), 0.0)


def test_guided_constant_invariant():
    st = _const_stokes(1.4, 0.25, -0.1)
    out = pvt.guided_denoise_stokes(st)
    np.testing.assert_allclose(out.s1, 0.25, atol=1e-10)
    np.testing.assert_allclose(out.s2, -0.1, atol=1e-10)
    assert out.s0 is st.s0


def test_guided_self_guidance_keeps_structure():
    # guide = input with tiny eps: a -> 1 where local variance dominates eps
    rng = np.random.default_rng(44)
    src = np.cumsum(rng.uniform(-1, 1, (64, 64)), axis=1) / 4.0
    eps = 1e-8
    cfg = GuidedFilterConfig(radius=4, eps=eps)
    out = pvt.guided_filter(src, src, cfg)

    from scipy.ndimage import uniform_filter
    local_mean = uniform_filter(src, size=9, mode="nearest")
    local_var = uniform_filter(src * src, size=9, mode="nearest") - local_mean ** 2
    busy = local_var > 100 * eps
    assert busy.any()
    assert np.abs(out - src)[busy].max() < 1e-3


def test_guided_keeps_edges_sharper_than_gaussian():
    # step present in both guide and S1: guided must stay steeper at the edge
    h, w = 32, 64
    step = np.zeros((1, h, w))
    step[..., w // 2:] = 1.0
    rng = np.random.default_rng(45)
    s1 = 0.5 * step + 0.01 * rng.standard_normal((1, h, w))
    st = StokesFrame(s0=2.0 * step + 1.0, s1=s1, s2=np.zeros_like(s1))

    guided = pvt.guided_denoise_stokes(st, GuidedFilterConfig(radius=4, eps=1e-4))
    gauss = pvt.gaussian_denoise_stokes(st, 2.0)
    mid = h // 2
    slope_guided = guided.s1[0, mid, w // 2] - guided.s1[0, mid, w // 2 - 1]
    slope_gauss = gauss.s1[0, mid, w // 2] - gauss.s1[0, mid, w // 2 - 1]
    assert slope_guided > slope_gauss


def test_guided_shift_equivariance():
    # two crops of one field, offset by 5 columns: where both crops see the
    # same content and sit clear of the replicated borders (box means reach
    # 2*radius inward), outputs must agree
    rng = np.random.default_rng(46)
    big_g = rng.uniform(0, 1, (48, 70))
    big_s = rng.uniform(-1, 1, (48, 70))
    cfg = GuidedFilterConfig(radius=3, eps=1e-3)
    out0 = pvt.guided_filter(big_g[:, 0:64], big_s[:, 0:64], cfg)
    out5 = pvt.guided_filter(big_g[:, 5:69], big_s[:, 5:69], cfg)
    np.testing.assert_allclose(out0[:, 13:56], out5[:, 8:51], atol=1e-10)


def test_guided_range_bound():
    rng = np.random.default_rng(47)
    st = _stokes(rng)
    out = pvt.guided_denoise_stokes(st)
    guide = 0.5 * st.s0
    r = guide.max() - guide.min()
    assert out.s1.max() <= st.s1.max() + r
    assert out.s1.min() >= st.s1.min() - r


def test_guided_external_guide_and_validation():
    rng = np.random.default_rng(48)
    st = _stokes(rng, c=3)
    clean_guide = np.broadcast_to(
        np.linspace(0, 1, 32)[None, None, :], (3, 32, 32)).copy()
    out = pvt.guided_denoise_stokes(st, guide=clean_guide)
    assert out.s1.shape == st.s1.shape
    with pytest.raises(DimensionError):
        pvt.guided_denoise_stokes(st, guide=np.zeros((3, 16, 16)))


def test_guided_per_channel_differs_from_luma():
    rng = np.random.default_rng(49)
    st = _stokes(rng, c=3)
    luma = pvt.guided_denoise_stokes(st)
    per = pvt.guided_denoise_stokes(st, per_channel=True)
    assert not np.array_equal(luma.s1, per.s1)


def test_guided_config_validation():
    with pytest.raises(DomainError):
        GuidedFilterConfig(radius=0)
    with pytest.raises(DomainError):
        GuidedFilterConfig(eps=0.0)
    with pytest.raises(DimensionError):
        pvt.guided_filter(np.zeros((4, 4)), np.zeros((4, 5)))
