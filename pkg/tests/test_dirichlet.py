"""Approximation layer: weights, targets, regime tags, polynomial routes."""

import math

import numpy as np
import pytest

from fflab.dirichlet import (
    ApproxParams,
    MomentTargets,
    ShiftPlan,
    asymptotic_cov_target,
    classify_regime,
    cosine_sum_check,
    dirichlet_poly_direct,
    dirichlet_poly_from_phases,
    moment_targets,
    predicted_cov_finite,
    predicted_mean_finite,
    prime_poly_direct,
    prime_poly_from_phases,
    vm_weight,
    weighted_von_mangoldt,
)
from fflab.fieldpoly import Fq, FqPoly
from fflab.lfunctions import eigenphases, l_star

F5 = Fq.get(5)


class TestVmWeight:
    @pytest.mark.parametrize("X", [2, 3, 5, 8])
    def test_branch_values_pinned(self, X):
        # the display is reproduced verbatim, discontinuity at deg = X included
        assert vm_weight(X, X) == 2 * X * X
        assert vm_weight(X + 1, X) == X * X - (X + 1) ** 2 + 2 * (X + 1) * X - 3 * X - (X + 1) - 2
        assert vm_weight(2 * X, X) == X * X - 4 * X * X + 4 * X * X - 3 * X - 2 * X - 2
        assert vm_weight(2 * X + 1, X) == X * (X + 1)
        assert vm_weight(3 * X, X) == 2
        assert vm_weight(3 * X + 1, X) == 0

    def test_discontinuity_at_cutoff(self):
        X = 6
        inner = vm_weight(X, X)
        outer_formula = X * X - X * X + 2 * X * X - 3 * X - X - 2  # second branch at deg=X
        assert inner == 2 * X * X
        assert outer_formula == 2 * X * X - 4 * X - 2  # differs: by design

    def test_weighted_von_mangoldt(self):
        t = FqPoly.x(F5)
        one = FqPoly.one(F5)
        assert weighted_von_mangoldt(t * t, 3) == 2 * 9 * 1
        assert weighted_von_mangoldt((t + one) * (t + one + one), 3) == 0


class TestRegimes:
    def test_thresholds(self):
        q = 5
        kappa = 200  # gamma = 100
        micro_edge = 10.0 * (2 * math.pi / math.log(q)) / 100.0
        assert classify_regime(0.0, kappa, q) == "microscopic"
        assert classify_regime(micro_edge * 0.99, kappa, q) == "microscopic"
        assert classify_regime(micro_edge * 1.01, kappa, q) == "mesoscopic"
        assert classify_regime(100 ** -0.1 * 0.99, kappa, q) == "mesoscopic"
        assert classify_regime(1.0, kappa, q) == "macroscopic"
        with pytest.raises(ValueError):
            classify_regime(7.0, kappa, q)

    def test_plan_validation(self):
        with pytest.raises(ValueError):
            ShiftPlan(a=(1.0,), t=(), kappa=10, q=5)
        plan = ShiftPlan(a=(1.0, -1.0), t=(0.0, 0.3), kappa=400, q=5)
        assert plan.regimes()[0] == "microscopic"


class TestMomentTargets:
    def test_single_zero_shift(self):
        plan = ShiftPlan(a=(1.0,), t=(0.0,), kappa=24, q=5)
        tg = moment_targets(plan, scale=13.0)
        assert abs(tg.mean - 0.5 * math.log(13)) < 1e-12
        assert abs(tg.var_re - math.log(13)) < 1e-12
        assert abs(tg.var_im) < 1e-12
        assert tg.degenerate_im

    def test_equal_shift_cancellation(self):
        t0 = 0.2
        plan = ShiftPlan(a=(1.0, -1.0), t=(t0, t0), kappa=24, q=5)
        tg = moment_targets(plan, scale=50.0)
        # a=(1,-1), equal shifts: |t1-t2| clamp hits scale, full cancellation
        # of the diagonal: var_re = log(scale) + log min(scale,1/(2t))
        #   - log(min(scale,1/(2t))^... ) worked out directly:
        expected = (
            math.log(50.0)
            + math.log(min(50.0, 1 / (2 * t0)))
            - math.log(min(50.0, 1 / (2 * t0)) * 50.0)
        )
        assert abs(tg.var_re - expected) < 1e-12

    def test_mesoscopic_difference_variance(self):
        # a=(1,-1), theta_j = alpha_j kappa^-delta: V_im ~ (1-delta) log n
        q, kappa, n = 5, 400, 401
        delta = 0.3
        tshift = 2 * math.pi / math.log(q) * (1.0 / kappa ** delta)
        tshift2 = 2 * math.pi / math.log(q) * (2.5 / kappa ** delta)
        plan = ShiftPlan(a=(1.0, -1.0), t=(tshift, tshift2), kappa=kappa, q=q)
        tg = moment_targets(plan, scale=float(n))
        assert abs(tg.var_im - (1 - delta) * math.log(n)) < 0.35 * math.log(n)

    def test_symmetries(self):
        plan1 = ShiftPlan(a=(1.0, 2.0), t=(0.1, 0.4), kappa=100, q=5)
        plan2 = ShiftPlan(a=(2.0, 1.0), t=(0.4, 0.1), kappa=100, q=5)
        plan3 = ShiftPlan(a=(1.0, 2.0), t=(-0.1, -0.4), kappa=100, q=5)
        for scale in (20.0, 200.0):
            t1, t2, t3 = (
                moment_targets(plan1, scale),
                moment_targets(plan2, scale),
                moment_targets(plan3, scale),
            )
            assert abs(t1.mean - t2.mean) < 1e-12 and abs(t1.mean - t3.mean) < 1e-12
            assert abs(t1.var_re - t2.var_re) < 1e-12 and abs(t1.var_re - t3.var_re) < 1e-12
            assert abs(t1.var_im - t2.var_im) < 1e-12 and abs(t1.var_im - t3.var_im) < 1e-12

    def test_approx_params(self):
        ap = ApproxParams(X=11)
        s0 = ap.sigma0(5)
        assert 0.5 < s0 < 0.52
        with pytest.raises(ValueError):
            ApproxParams(X=1)
        with pytest.raises(ValueError):
            ApproxParams(X=5, c=1.0).sigma0(5)


class TestDirichletPolynomials:
    @staticmethod
    def _omega_and_D():
        D = FqPoly.from_coeffs(F5, [2, 3, 1, 0, 0, 1])  # degree 5
        if not D.is_squarefree():
            D = FqPoly.from_coeffs(F5, [1, 1, 0, 1, 0, 1])
        assert D.is_squarefree()
        L = l_star(D)
        omega = eigenphases(L).zero_angles()[None, :]
        return D, L, omega

    def test_phase_route_equals_direct(self):
        D, L, omega = self._omega_and_D()
        for X in (1, 2, 3):
            for s in (0.55 + 0.0j, 0.5 + 0.3j, 0.9 - 0.2j):
                direct = dirichlet_poly_direct(D, X, s)
                fast = dirichlet_poly_from_phases(omega, 5, X, s, eta=L.eta)[0]
                assert abs(direct - fast) < 1e-9

    def test_single_term_cutoff_manual(self):
        # X = 1: sum over the 5 monic linear polynomials of chi_D(f)/q^s
        from fflab.characters import chi
        from fflab.fieldpoly import enumerate_monic

        D, L, omega = self._omega_and_D()
        s = 0.6 + 0.1j
        manual = sum(chi(D, f) for f in enumerate_monic(F5, 1)) * 5.0 ** (-s)
        assert abs(dirichlet_poly_from_phases(omega, 5, 1, s, eta=L.eta)[0] - manual) < 1e-10

    def test_prime_poly_routes_agree(self):
        D, L, omega = self._omega_and_D()
        for X in (2, 3, 4):
            s = 0.52 + 0.17j
            direct = prime_poly_direct(D, X, s)
            fast = prime_poly_from_phases(omega, 5, X, s, L.eta, [D])[0]
            assert abs(direct - fast) < 1e-9

    def test_tail_bound_at_large_sigma(self):
        # |D_X - log L| at Re s = 2 bounded by the geometric tail
        from fflab.lfunctions import log_abs_from_coeffs

        D, L, omega = self._omega_and_D()
        s = 2.0 + 0.0j
        X = 9
        got = dirichlet_poly_from_phases(omega, 5, X, s, eta=L.eta)[0]
        ref = log_abs_from_coeffs(L, s)
        tail = sum(5.0 ** (-2 * k + k) / k for k in range(X + 1, 40))  # sums ~ q^k terms
        assert abs(got.real - ref) <= tail + 1e-9


class TestCosineSum:
    def test_zero_shift_euler_mascheroni(self):
        c, clamp, disc, s = cosine_sum_check(10 ** 5, 0.0)
        assert abs(disc - 0.5772156649) < 1e-4
        assert s == 0.0

    def test_large_shift_bounded(self):
        c, clamp, disc, s = cosine_sum_check(10 ** 5, 1.0)
        assert clamp == math.log(0.5)
        assert abs(disc) < 3.0

    def test_sine_bounded_on_grid(self):
        for t in np.linspace(0.01, 1.5, 25):
            _, _, disc, s = cosine_sum_check(10 ** 5, float(t))
            assert abs(s) <= 3.0
            assert abs(disc) <= 3.0


class TestFinitePredictions:
    def test_mean_matches_asymptotic_shape(self):
        q, X = 5, 11
        s0 = ApproxParams(X=X).sigma0(q)
        m0 = predicted_mean_finite(q, X, 0.0, s0)
        assert abs(m0 - 0.5 * math.log(X)) < 1.0  # O(1) apart
        # decreasing in |t|
        assert predicted_mean_finite(q, X, 0.5, s0) < m0

    def test_cov_diagonal_matches_asymptotic_shape(self):
        q, X = 5, 11
        s0 = ApproxParams(X=X).sigma0(q)
        v = predicted_cov_finite(q, X, 0.0, 0.0, s0)
        assert abs(v - math.log(X)) < 1.2
        target = asymptotic_cov_target(X, 0.12, 0.12)
        fine = predicted_cov_finite(q, X, 0.12, 0.12, s0)
        assert abs(fine - target) < 1.2
