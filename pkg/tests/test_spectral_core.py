import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from halfwave import spectral_core as sc


def random_field(max_mode, seed, decay=0.55):
    rng = np.random.default_rng(seed)
    k = np.arange(-max_mode, max_mode + 1, dtype=float)
    c = (rng.standard_normal(2 * max_mode + 1) + 1j * rng.standard_normal(2 * max_mode + 1))
    return sc.SpectralField(c * (1.0 + k * k) ** -decay, max_mode)


class TestField:
    def test_rejects_wrong_length(self):
        with pytest.raises(ValueError):
            sc.SpectralField(np.zeros(4, complex), 2)

    def test_rejects_nonfinite(self):
        c = np.zeros(3, complex)
        c[0] = np.nan
        with pytest.raises(ValueError):
            sc.SpectralField(c, 1)

    def test_embed_truncate_roundtrip(self):
        f = random_field(8, 1)
        g = f.embed(20)
        assert g.max_mode == 20
        assert np.array_equal(g.truncate(8).coeffs, f.coeffs)

    def test_arithmetic_promotes_band(self):
        f = sc.single_mode(1, 2.0, max_mode=1)
        g = sc.single_mode(3, 1.0, max_mode=3)
        h = f + g
        assert h.max_mode == 3
        assert h.mode(1) == 2.0 and h.mode(3) == 1.0

    def test_csv_roundtrip(self, tmp_path):
        f = random_field(12, 7)
        path = tmp_path / "field.csv"
        sc.field_to_csv(f, path)
        g = sc.field_from_csv(path)
        assert g.max_mode == 12
        np.testing.assert_array_equal(g.coeffs, f.coeffs)
        header = path.read_text().splitlines()[0]
        assert header == "k,re,im"


class TestHsNorm:
    def test_constant_one(self):
        f = sc.single_mode(0, 1.0, max_mode=2)
        assert sc.hs_norm(f, 0.7) == pytest.approx(1.0, abs=0)

    def test_single_oscillation(self):
        f = sc.single_mode(1)
        assert sc.hs_norm(f, 1.0) == pytest.approx(np.sqrt(2.0), rel=1e-15)

    def test_geometric_series(self):
        # f_k = 2^-k for k >= 0: sum 4^-k = 4/3, norm 2/sqrt(3)
        K = 40
        f = sc.zeros(K)
        f.coeffs[K:] = 2.0 ** -np.arange(K + 1.0)
        assert sc.hs_norm(f, 0.0) == pytest.approx(2.0 / np.sqrt(3.0), rel=1e-12)

    def test_zero_iff_zero(self):
        assert sc.hs_norm(sc.zeros(5), 0.3) == 0.0
        f = sc.single_mode(2, 1e-30)
        assert sc.hs_norm(f, 0.3) > 0.0

    def test_rejects_negative_sigma(self):
        with pytest.raises(ValueError):
            sc.hs_norm(sc.single_mode(1), -0.1)

    def test_parseval_against_grid(self):
        f = random_field(64, 3)
        assert sc.l2_norm_grid(f) == pytest.approx(sc.hs_norm(f, 0.0), rel=1e-12)


class TestHsInner:
    def test_same_mode(self):
        f = sc.single_mode(1)
        assert sc.hs_inner(f, f, 0.0) == pytest.approx(1.0)

    def test_disjoint_modes(self):
        f, g = sc.single_mode(1, max_mode=3), sc.single_mode(2, max_mode=3)
        for sigma in (0.0, 0.5, 2.0):
            assert sc.hs_inner(f, g, sigma) == 0.0

    def test_geometric_cross_series(self):
        # f_k = p^k, g_k = q^k (k >= 0), sigma=0 -> 1/(1 - p q)
        p, q, K = 0.6, 0.5, 120
        f, g = sc.zeros(K), sc.zeros(K)
        f.coeffs[K:] = p ** np.arange(K + 1.0)
        g.coeffs[K:] = q ** np.arange(K + 1.0)
        assert sc.hs_inner(f, g, 0.0).real == pytest.approx(1.0 / (1.0 - p * q), rel=1e-13)

    def test_inner_consistent_with_norm(self):
        f = random_field(32, 5)
        inner = sc.hs_inner(f, f, 0.4)
        assert inner.imag == pytest.approx(0.0, abs=1e-14)
        assert inner.real == pytest.approx(sc.hs_norm(f, 0.4) ** 2, rel=1e-13)


class TestProjections:
    def test_negative_exponential_vanishes(self):
        f = sc.single_mode(-1)
        assert np.all(sc.project_nonneg(f).coeffs == 0.0)

    def test_cosine_keeps_half(self):
        f = sc.zeros(1)
        f.coeffs[0] = 0.5  # e^{-ix}/2
        f.coeffs[2] = 0.5  # e^{ix}/2
        pos = sc.project_nonneg(f)
        assert pos.mode(1) == 0.5 and pos.mode(-1) == 0.0

    def test_mode_zero_belongs_to_nonneg(self):
        f = sc.single_mode(0, 1.0, max_mode=2)
        assert np.all(sc.project_neg(f).coeffs == 0.0)
        assert sc.project_nonneg(f).mode(0) == 1.0

    @given(seed=st.integers(0, 2**31), max_mode=st.integers(1, 40))
    @settings(max_examples=25, deadline=None)
    def test_complement_and_idempotence(self, seed, max_mode):
        f = random_field(max_mode, seed)
        pos, neg = sc.project_nonneg(f), sc.project_neg(f)
        np.testing.assert_array_equal((pos + neg).coeffs, f.coeffs)
        np.testing.assert_array_equal(sc.project_nonneg(pos).coeffs, pos.coeffs)
        np.testing.assert_array_equal(sc.project_neg(neg).coeffs, neg.coeffs)


class TestPropagator:
    def test_identity_at_zero(self):
        f = random_field(16, 11)
        np.testing.assert_array_equal(sc.half_wave_propagator(f, 0.0).coeffs, f.coeffs)

    def test_negative_mode_phase(self):
        # backward flow on e^{-ikx} multiplies by e^{+i tau k}
        k, tau = 4, 0.7
        f = sc.single_mode(-k)
        out = sc.half_wave_propagator(f, -tau)
        assert out.mode(-k) == pytest.approx(np.exp(1j * tau * k), rel=1e-15)

    @given(seed=st.integers(0, 2**31), t=st.floats(-5.0, 5.0))
    @settings(max_examples=25, deadline=None)
    def test_unitary_every_sigma(self, seed, t):
        f = random_field(24, seed)
        out = sc.half_wave_propagator(f, t)
        assert sc.hs_norm(out, 0.4) == pytest.approx(sc.hs_norm(f, 0.4), rel=1e-13)

    @given(seed=st.integers(0, 2**31), t1=st.floats(-2.0, 2.0), t2=st.floats(-2.0, 2.0))
    @settings(max_examples=25, deadline=None)
    def test_group_property(self, seed, t1, t2):
        f = random_field(24, seed)
        a = sc.half_wave_propagator(sc.half_wave_propagator(f, t1), t2)
        b = sc.half_wave_propagator(f, t1 + t2)
        np.testing.assert_allclose(a.coeffs, b.coeffs, rtol=1e-12, atol=1e-15)

    def test_inverse(self):
        f = random_field(24, 13)
        back = sc.half_wave_propagator(sc.half_wave_propagator(f, 0.9), -0.9)
        np.testing.assert_allclose(back.coeffs, f.coeffs, rtol=1e-13, atol=1e-16)


def cubic_convolution_oracle(u, v, w):
    """Direct O(K^2) double convolution of u * conj(v) * w."""
    K = max(u.max_mode, v.max_mode, w.max_mode)
    uc, vc, wc = u.embed(K).coeffs, v.embed(K).coeffs, w.embed(K).coeffs
    vbar = np.conj(vc[::-1])  # conj flips mode sign
    first = np.convolve(uc, vbar)
    full = np.convolve(first, wc)
    center = full.size // 2
    return sc.SpectralField(full[center - K : center + K + 1], K)


class TestCubicTerm:
    def test_constants(self):
        one = sc.single_mode(0, 1.0, max_mode=2)
        out = sc.cubic_term(one, one, one)
        assert out.mode(0) == pytest.approx(1.0, rel=1e-14)
        assert sc.hs_norm(out - one, 0.0) < 1e-14

    def test_phase_cancellation(self):
        e1 = sc.single_mode(1, 1.0, max_mode=4)
        out = sc.cubic_term(e1, e1, e1)
        assert out.mode(1) == pytest.approx(1.0, rel=1e-14)
        assert sc.hs_norm(out - e1, 0.0) < 1e-13

    def test_conjugate_flips_sign(self):
        # u = w = e^{ix}, v = e^{-ix}: u conj(v) w = e^{3ix}
        e1 = sc.single_mode(1, 1.0, max_mode=4)
        em1 = sc.single_mode(-1, 1.0, max_mode=4)
        out = sc.cubic_term(e1, em1, e1)
        assert out.mode(3) == pytest.approx(1.0, rel=1e-13)
        assert sc.hs_norm(out - sc.single_mode(3, 1.0, 4), 0.0) < 1e-13

    @pytest.mark.parametrize("max_mode", [8, 33, 64])
    def test_matches_double_convolution(self, max_mode):
        u = random_field(max_mode, 101)
        v = random_field(max_mode, 102)
        w = random_field(max_mode, 103)
        fast = sc.cubic_term(u, v, w)
        slow = cubic_convolution_oracle(u, v, w)
        np.testing.assert_allclose(fast.coeffs, slow.coeffs, atol=1e-10)

    def test_needs_dealiased_grid(self):
        # the padded grid is at least 2(2K+1) points
        assert sc.dealias_points(64) >= 2 * (2 * 64 + 1)

    @given(seed=st.integers(0, 2**31))
    @settings(max_examples=15, deadline=None)
    def test_trilinearity(self, seed):
        u = random_field(16, seed)
        v = random_field(16, seed + 1)
        w = random_field(16, seed + 2)
        lam = 0.7 - 1.3j
        scaled_u = sc.cubic_term(lam * u, v, w)
        base = sc.cubic_term(u, v, w)
        np.testing.assert_allclose(scaled_u.coeffs, lam * base.coeffs, rtol=1e-12, atol=1e-14)
        # the middle slot is conjugated, so it scales antilinearly
        scaled_v = sc.cubic_term(u, lam * v, w)
        np.testing.assert_allclose(scaled_v.coeffs, np.conj(lam) * base.coeffs,
                                   rtol=1e-12, atol=1e-14)
