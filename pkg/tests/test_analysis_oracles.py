import math

import numpy as np
import pytest
from scipy import integrate

from halfwave import analysis_oracles as ao
from halfwave import spectral_core as sc
from halfwave import szego_family as sz


class TestNegativePart:
    def test_zero_pole_gives_zero(self):
        for fn in (ao.negative_part_closed, ao.negative_part_bruteforce):
            out = fn(1.3 - 0.2j, 0.0, 64)
            assert sc.hs_norm(out, 0.0) < 1e-14

    def test_hand_value_at_first_mode(self):
        # A=1, P=1/2: coefficient at k=-1 is (1/(1-1/4)^2) * (1/2) = 8/9
        out = ao.negative_part_closed(1.0, 0.5, 128)
        assert out.mode(-1) == pytest.approx(8.0 / 9.0, rel=1e-14)
        brute = ao.negative_part_bruteforce(1.0, 0.5, 128)
        assert brute.mode(-1) == pytest.approx(8.0 / 9.0, rel=1e-12)

    def test_amplitude_rotation_linearity(self):
        base = ao.negative_part_closed(1.0 + 0.5j, 0.4 + 0.3j, 64)
        theta = 1.1
        rotated = ao.negative_part_closed((1.0 + 0.5j) * np.exp(1j * theta), 0.4 + 0.3j, 64)
        np.testing.assert_allclose(rotated.coeffs, base.coeffs * np.exp(1j * theta), atol=1e-15)

    def test_matches_bruteforce_hard_pole(self):
        closed = ao.negative_part_closed(1.0 + 1.0j, 0.9 * np.exp(0.3j), 1024)
        brute = ao.negative_part_bruteforce(1.0 + 1.0j, 0.9 * np.exp(0.3j), 1024)
        assert float(np.max(np.abs(closed.coeffs - brute.coeffs))) <= 1e-10

    def test_moduli_decay_geometric(self):
        pole = 0.8 * np.exp(1.7j)
        out = ao.negative_part_bruteforce(0.7 - 0.1j, pole, 512)
        k = np.arange(1, 51)
        moduli = np.abs([out.mode(-int(j)) for j in k])
        slope = np.polyfit(k, np.log(moduli), 1)[0]
        assert slope == pytest.approx(math.log(abs(pole)), rel=1e-6)

    def test_support_strictly_negative(self):
        out = ao.negative_part_closed(2.0, 0.7j, 128)
        assert np.all(out.coeffs[128:] == 0.0)

    def test_rejects_unit_pole(self):
        with pytest.raises(ValueError):
            ao.negative_part_closed(1.0, 1.0, 64)

    def test_rejects_fat_tail(self):
        with pytest.raises(ValueError, match="need K >="):
            ao.negative_part_closed(1.0, 0.95, 100)


class TestLambda:
    def test_resonant_value_is_t(self):
        for t in (0.0, 0.5, 1.3):
            lam = ao.lambda_osc(ao.OscPhase(t=t, k=0, omega=0.0, c=0.0))
            assert lam == pytest.approx(t, abs=1e-16)

    def test_pi_value(self):
        lam = ao.lambda_osc(ao.OscPhase(t=1.0, k=0, omega=np.pi, c=0.0))
        assert lam == pytest.approx(2.0 / (1j * np.pi), rel=1e-14)
        assert abs(lam) == pytest.approx(2.0 / np.pi, rel=1e-14)

    def test_triangle_bound(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            t = rng.uniform(0.0, 2.0)
            om = 20.0 * rng.standard_normal()
            lam = ao.lambda_osc(ao.OscPhase(t=t, k=0, omega=om, c=0.0))
            bound = t if om == 0.0 else min(t, 2.0 / abs(om))
            assert abs(lam) <= bound + 1e-14

    def test_detuning_composition(self):
        phase = ao.OscPhase(t=0.4, k=7, omega=3.0, c=0.25)
        assert phase.detuning == pytest.approx(3.0 - 7 * 2.25, abs=0)

    def test_reduced_frequency_diagnostics(self):
        phase = ao.OscPhase(t=0.0, k=0, omega=5.3, c=0.65)
        assert phase.reduced_frequency == pytest.approx(2.0, abs=1e-12)
        assert phase.resonant_mode == 2
        # the detuning vanishes exactly at the reduced frequency
        at_res = ao.OscPhase(t=0.0, k=2, omega=5.3, c=0.65)
        assert at_res.detuning == pytest.approx(0.0, abs=1e-12)

    def test_quadrature_agreement_including_seam(self):
        rng = np.random.default_rng(2)
        cases = [(rng.uniform(0.05, 1.5), 10.0 * rng.standard_normal()) for _ in range(30)]
        cases += [(0.5, x / 0.5) for x in np.geomspace(1e-10, 1e-6, 10)]
        for t, om in cases:
            lam = ao.lambda_osc(ao.OscPhase(t=float(t), k=0, omega=float(om), c=0.0))
            re, _ = integrate.quad(lambda x: math.cos(om * x), 0.0, t, epsabs=1e-13, epsrel=1e-12)
            im, _ = integrate.quad(lambda x: -math.sin(om * x), 0.0, t, epsabs=1e-13, epsrel=1e-12)
            assert abs(lam - (re + 1j * im)) <= 1e-9 * abs(lam)

    def test_no_jump_at_branch_threshold(self):
        for t in (0.3, 0.9):
            om = ao.RESONANCE_THRESHOLD / t
            below = ao.lambda_osc(ao.OscPhase(t=t, k=0, omega=om * (1 - 1e-9), c=0.0))
            above = ao.lambda_osc(ao.OscPhase(t=t, k=0, omega=om * (1 + 1e-9), c=0.0))
            assert abs(below - above) <= 1e-9 * abs(above)

    def test_rejects_negative_time(self):
        with pytest.raises(ValueError):
            ao.OscPhase(t=-0.1, k=0, omega=1.0, c=0.0)


class TestDuhamel:
    def test_vanishing_amplitude(self):
        # the prefactor is alpha^3/eps^2, so shrinking alpha by 1e-4 shrinks
        # the whole term by 1e-12 (omega and c shrink with it, only helping)
        eps, s = 0.3, 0.4
        base = sz.make_params(eps, s)
        scale = 1e-4
        small = sz.SzegoParams(
            eps=eps, s=s, alpha=base.alpha * scale, p=base.p,
            omega=base.omega * scale**2, c=base.c * scale**2, delta=0.0,
        )
        grid = np.linspace(0.0, 1.0, 16)
        sup_base, _ = ao.duhamel_negative_norm(base, 0.3, grid, 256)
        sup_small, _ = ao.duhamel_negative_norm(small, 0.3, grid, 256)
        assert sup_small <= scale**3 * sup_base * 1e3
        assert sup_small > 0.0

    def test_support_strictly_negative(self):
        params = sz.make_params(0.2, 0.35)
        field = ao.duhamel_field(params, 0.37, 128)
        assert np.all(field.coeffs[128:] == 0.0)
        assert np.any(field.coeffs[:128] != 0.0)

    def test_series_matches_field_norms(self):
        params = sz.make_params(0.15, 0.4)
        K = sz.required_modes(0.15)
        ts = np.asarray([0.2, 0.8])
        _, series = ao.duhamel_negative_norm(params, 0.6, ts, K)
        for t, val in zip(ts, series.column("duhamel_hsig")):
            direct = sc.hs_norm(ao.duhamel_field(params, float(t), K), 0.6)
            assert val == pytest.approx(direct, rel=1e-12)

    def test_simpson_oracle_agreement(self):
        params = sz.make_params(0.1, 0.4)
        K = sz.required_modes(0.1)
        _, series = ao.duhamel_negative_norm(params, 0.6, np.asarray([0.5]), K)
        simpson = ao.duhamel_norm_quadrature(params, 0.6, 0.5, K, panels=4096)
        assert simpson == pytest.approx(series.column("duhamel_hsig")[0], rel=1e-6)

    def test_regime_rejection(self):
        params = sz.make_params(0.1, 0.4)
        with pytest.raises(ValueError, match="outside the smoothing regimes"):
            ao.duhamel_negative_norm(params, 0.7, np.asarray([0.5]), 64)  # 0.7 > 1/(4*0.4)
        low_s = sz.make_params(0.1, 0.2)
        with pytest.raises(ValueError, match="outside the smoothing regimes"):
            ao.duhamel_negative_norm(low_s, 0.6, np.asarray([0.5]), 64)  # case b needs s > 1/4

    def test_t_grid_validation(self):
        params = sz.make_params(0.1, 0.4)
        with pytest.raises(ValueError):
            ao.duhamel_negative_norm(params, 0.3, np.asarray([0.5, 1.2]), 64)


class TestVestBounds:
    def test_exact_linf_at_zero(self):
        params = sz.make_params(0.3, 0.35)
        linf, _ = ao.vest_bounds(params, 0.0, np.asarray([0.0]))
        assert linf == pytest.approx(params.alpha / (1.0 - params.p), rel=1e-12)

    def test_linf_time_invariant_to_grid_resolution(self):
        # |v(t, .)| is a translate of |v(0, .)|; the grid max moves only by
        # the sampling error of the peak, quadratic in the grid spacing
        params = sz.make_params(0.25, 0.3)
        base, _ = ao.vest_bounds(params, 0.0, np.asarray([0.0]))
        for t in (0.31, 0.77):
            linf, _ = ao.vest_bounds(params, 0.0, np.asarray([t]))
            assert linf == pytest.approx(base, rel=1e-3)
            assert linf <= base + 1e-12

    def test_hsig_matches_field_norm(self):
        params = sz.make_params(0.2, 0.3)
        _, hsig = ao.vest_bounds(params, 1.0, np.asarray([0.0]))
        K = sz.required_modes(0.2)
        direct = sc.hs_norm(sz.szego_coeffs(params, 0.0, K), 1.0)
        assert hsig == pytest.approx(direct, rel=1e-12)

    def test_linf_scaling_slope(self):
        s = 0.3
        eps_values = np.geomspace(1e-3, 1e-1, 5)
        linfs = [ao.vest_bounds(sz.make_params(float(e), s), 0.0, np.asarray([0.0]))[0]
                 for e in eps_values]
        slope = ao.fit_scaling(eps_values, linfs).slope
        assert slope == pytest.approx(s - 0.5, abs=0.05)

    def test_hsig_scaling_slope(self):
        s = 0.3
        eps_values = np.geomspace(1e-3, 1e-1, 5)
        hsigs = [ao.vest_bounds(sz.make_params(float(e), s), 1.0, np.asarray([0.0]))[1]
                 for e in eps_values]
        slope = ao.fit_scaling(eps_values, hsigs).slope
        assert slope == pytest.approx(s - 1.0, abs=0.05)


class TestGeometricMoment:
    def test_sigma_zero_exact(self):
        for eps in (0.5, 0.1, 1e-3):
            assert ao.geometric_moment(eps, 0.0) == pytest.approx(1.0 / eps, rel=1e-12)

    def test_sigma_one_envelope(self):
        ratios = []
        for eps in np.geomspace(1e-4, 1e-1, 7):
            ratios.append(ao.geometric_moment(float(eps), 1.0) / float(eps) ** -3.0)
        assert max(ratios) <= 2.0 + 1e-12
        assert max(ratios) >= 0.95 * 2.0

    def test_monotone_in_sigma(self):
        for eps in (0.1, 0.4):
            sigmas = np.linspace(0.1, 1.0, 10)
            vals = [ao.geometric_moment(eps, float(s)) for s in sigmas]
            assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_too_small_kmax_rejected(self):
        with pytest.raises(ValueError):
            ao.geometric_moment(1e-3, 0.5, k_max=100)


class TestProbes:
    def test_interpolation_constant(self):
        one = sc.single_mode(0, 1.0, max_mode=2)
        assert ao.interpolation_probe(one, 1.0) == pytest.approx(1.0, rel=1e-12)

    def test_interpolation_single_mode_closed_form(self):
        for N in (1, 5, 40):
            f = sc.single_mode(N)
            got = ao.interpolation_probe(f, 1.0)
            assert got == pytest.approx((1.0 + N * N) ** -0.25, rel=1e-12)
            assert got <= 1.0

    def test_interpolation_rejects_zero_and_low_sigma(self):
        with pytest.raises(ValueError):
            ao.interpolation_probe(sc.zeros(4), 1.0)
        with pytest.raises(ValueError):
            ao.interpolation_probe(sc.single_mode(1), 0.5)

    def test_product_constants(self):
        one = sc.single_mode(0, 1.0, max_mode=1)
        assert ao.product_probe(one, one, 0.75) == pytest.approx(0.5, rel=1e-12)

    def test_product_conjugate_modes(self):
        # f = e^{ix}, g = e^{-ix}, sigma=1: ||fg|| = 1, rhs = 2 sqrt(2)
        f, g = sc.single_mode(1), sc.single_mode(-1)
        assert ao.product_probe(f, g, 1.0) == pytest.approx(1.0 / (2.0 * math.sqrt(2.0)), rel=1e-12)

    def test_scale_invariance(self):
        f = ao.random_probe_field(64, 0.75, seed=3)
        g = ao.random_probe_field(64, 0.75, seed=4)
        base_i = ao.interpolation_probe(f, 0.75)
        base_p = ao.product_probe(f, g, 0.75)
        for lam in (1e-6, 3.7, 1e6):
            assert ao.interpolation_probe(lam * f, 0.75) == pytest.approx(base_i, rel=1e-12)
            assert ao.product_probe(lam * f, lam * g, 0.75) == pytest.approx(base_p, rel=1e-12)

    def test_probe_field_determinism(self):
        a = ao.random_probe_field(32, 0.75, seed=9)
        b = ao.random_probe_field(32, 0.75, seed=9)
        np.testing.assert_array_equal(a.coeffs, b.coeffs)


class TestQLemma:
    def test_zero_perturbation(self):
        params = sz.make_params(0.1, 0.4)
        w = sc.zeros(16)
        for which in ao.QLemma:
            assert ao.q_lemma_probe(w, params, 0.75, which) == 0.0

    def test_cubic_single_mode_closed_form(self):
        # w = e^{ix}: w^2 wbar = e^{ix}; H^1 ratio sqrt(2)/2, L2 ratio 1/sqrt(2)
        params = sz.make_params(0.1, 0.4)
        w = sc.single_mode(1)
        got = ao.q_lemma_probe(w, params, 1.0, ao.QLemma.Q3)
        assert got == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-12)

    def test_bounded_and_eps_stable(self):
        sigma, s = 0.75, 0.4
        maxima = {}
        for eps in (0.1, 0.01):
            params = sz.make_params(eps, s)
            rng = np.random.default_rng(0)
            worst = {which: 0.0 for which in ao.QLemma}
            for _ in range(40):
                w = ao.random_probe_field(128, sigma, rng=rng)
                for which in ao.QLemma:
                    worst[which] = max(worst[which], ao.q_lemma_probe(w, params, sigma, which))
            maxima[eps] = worst
        for which in ao.QLemma:
            hi = max(maxima[0.1][which], maxima[0.01][which])
            lo = min(maxima[0.1][which], maxima[0.01][which])
            assert hi < 1e3
            assert hi / lo <= 2.0

    def test_rejects_bad_regularity(self):
        params = sz.make_params(0.1, 0.4)
        with pytest.raises(ValueError):
            ao.q_lemma_probe(sc.single_mode(1), params, 0.5, ao.QLemma.Q1)


class TestGronwall:
    def test_degenerate_forcing(self):
        theta, eps, A = 1.0, 1e-3, 1.0
        ratio, series = ao.gronwall_extremal(theta, 0.0, eps, A)
        assert ratio == pytest.approx(A * eps ** (theta / 2.0), rel=1e-15)
        assert np.all(series.column("g") == series.column("g")[0])

    def test_reference_point(self):
        ratio, _ = ao.gronwall_extremal(1.0, 1.0, 1e-3, 1.0)
        assert ratio < 1.0
        assert ratio == pytest.approx(0.4377, abs=1e-3)

    def test_monotone_tail(self):
        ratios = [ao.gronwall_extremal(1.0, 1.0, 10.0**-j, 1.0)[0] for j in range(2, 9)]
        assert all(a > b for a, b in zip(ratios, ratios[1:]))

    def test_regime_violation_reported(self):
        # large C pushes A eps^(theta/2) e^(C^2 sqrt|ln eps|) past 1
        with pytest.raises(ValueError, match="smallness regime"):
            ao.gronwall_extremal(1.0, 3.0, 1e-2, 1.0)

    def test_series_has_window_endpoint(self):
        eps = 1e-3
        _, series = ao.gronwall_extremal(1.0, 1.0, eps, 1.0)
        assert series.times[-1] == pytest.approx(eps * abs(math.log(eps)) ** 0.5, rel=1e-12)


class TestScalingFit:
    def test_recovers_power_law(self):
        eps = np.geomspace(1e-4, 1e-1, 8)
        vals = 3.7 * eps**1.25
        fit = ao.fit_scaling(eps, vals)
        assert fit.slope == pytest.approx(1.25, rel=1e-12)
        assert fit.r2 == pytest.approx(1.0, abs=1e-12)

    def test_r2_within_unit_interval(self):
        rng = np.random.default_rng(0)
        eps = np.geomspace(1e-3, 1e-1, 10)
        vals = eps**0.5 * np.exp(0.3 * rng.standard_normal(10))
        fit = ao.fit_scaling(eps, vals)
        assert 0.0 <= fit.r2 <= 1.0

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            ao.fit_scaling([0.1, 0.2], [1.0, -1.0])


def test_probe_report_schema(tmp_path):
    path = tmp_path / "probes.csv"
    ao.write_probe_report(path, [(0.1, 0.4, 0.6, "duhamel_hsig_sup", 0.5, 0.58, 0.55, 0.999)])
    lines = path.read_text().splitlines()
    assert lines[0] == "eps,s,sigma,quantity,value,predicted_exponent,fitted_slope,r2"
    assert len(lines) == 2
