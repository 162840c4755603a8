"""Haar sampling correctness and characteristic-polynomial statistics."""

import math

import numpy as np
import pytest

from fflab.rmt import (
    count_fluctuation,
    exact_mean_re_log,
    log_char_poly,
    log_char_poly_determinant,
    mean_log_target,
    paired_angles,
    sample_haar_angles,
    sample_so_batch,
    sample_u_batch,
    sample_usp_batch,
    structure_residual,
    trace_power,
    weyl_rejection_angles,
)


def _rng(seed):
    return np.random.Generator(np.random.Philox(key=seed, counter=0))


def _ks_against(sample, cdf):
    x = np.sort(sample)
    n = len(x)
    F = cdf(x)
    up = np.max(np.arange(1, n + 1) / n - F)
    dn = np.max(F - np.arange(0, n) / n)
    return max(up, dn)


class TestSamplers:
    @pytest.mark.parametrize("N", [1, 3, 8, 32])
    def test_usp_structure(self, N):
        mats = sample_usp_batch(N, 6, _rng(3 + N))
        assert structure_residual(mats, "usp") <= 1e-10
        ang = paired_angles(mats, "usp")
        assert np.all((ang > 0) & (ang < np.pi))

    @pytest.mark.parametrize("N", [2, 8, 24])
    def test_so_structure(self, N):
        mats = sample_so_batch(N, 6, _rng(11 + N))
        assert structure_residual(mats, "so") <= 1e-10
        assert np.allclose(np.linalg.det(mats), 1.0)

    def test_u_structure(self, N=9):
        mats = sample_u_batch(N, 6, _rng(123))
        assert structure_residual(mats, "u") <= 1e-10

    def test_determinism_and_sharding(self):
        a = sample_haar_angles("usp", 6, 700, seed=42, chunk=512)
        b = sample_haar_angles("usp", 6, 700, seed=42, chunk=512)
        assert np.array_equal(a, b)
        c = sample_haar_angles("usp", 6, 700, seed=43, chunk=512)
        assert not np.array_equal(a, c)

    def test_usp_n1_matches_weyl_oracle(self):
        # N=1: Haar eigenangle density prop. to sin^2; exact CDF known
        got = sample_haar_angles("usp", 1, 4000, seed=7)[:, 0]
        ref = weyl_rejection_angles("usp", 1, 4000, seed=8)[:, 0]

        def cdf(tt):
            return (tt - np.sin(tt) * np.cos(tt)) / np.pi

        assert _ks_against(got, cdf) < 0.035
        assert _ks_against(ref, cdf) < 0.035

    def test_usp_n2_matches_weyl_oracle_moments(self):
        got = sample_haar_angles("usp", 2, 4000, seed=9)
        ref = weyl_rejection_angles("usp", 2, 4000, seed=10)
        for f in (lambda a: a.min(axis=1), lambda a: a.max(axis=1), lambda a: np.cos(a).sum(axis=1)):
            x, y = f(got), f(ref)
            se = math.hypot(x.std() / math.sqrt(len(x)), y.std() / math.sqrt(len(y)))
            assert abs(x.mean() - y.mean()) < 4 * se

    def test_trace_moments(self):
        ang = sample_haar_angles("usp", 20, 20000, seed=12)
        tr2 = trace_power(ang, 2)
        se = tr2.std() / math.sqrt(len(tr2))
        assert abs(tr2.mean() + 1.0) <= 3 * se
        tr1 = trace_power(ang, 1)
        assert abs(tr1.mean()) <= 3 * tr1.std() / math.sqrt(len(tr1))
        angu = sample_haar_angles("u", 12, 8000, seed=13)
        tru = np.exp(1j * angu).sum(axis=1)
        assert abs(tru.mean()) <= 4 / math.sqrt(len(tru))


class TestLogCharPoly:
    def test_real_at_symmetry_points(self):
        ang = sample_haar_angles("usp", 8, 50, seed=21)
        z0 = log_char_poly(ang, 0.0)
        assert np.allclose(z0.imag, 0.0, atol=1e-9)
        zpi = log_char_poly(ang, np.pi)
        assert np.allclose(zpi.imag, 0.0, atol=1e-9)

    def test_against_determinant_oracle(self):
        mats = sample_usp_batch(8, 10, _rng(31))
        ang = paired_angles(mats, "usp")
        for theta in (0.3, 1.1, 2.7):
            fast = log_char_poly(ang, theta)
            for i in range(10):
                ref = log_char_poly_determinant(mats[i], theta)
                assert abs(fast[i].real - ref.real) < 1e-8
                # arg agrees modulo the per-factor convention: compare sums
                assert abs(fast[i].imag - ref.imag) < 1e-8

    def test_mean_value_formula(self):
        # E[Re log Z(theta)] exactly (1/2) sum_{k<=N} cos(2k theta)/k;
        # Monte Carlo within 4 SE, and the smooth-branch log-min target
        N = 64
        ang = sample_haar_angles("usp", N, 4000, seed=22)
        for theta in (0.05, 0.2, 0.8):
            vals = log_char_poly(ang, theta).real
            se = vals.std() / math.sqrt(len(vals))
            assert abs(vals.mean() - exact_mean_re_log(N, theta)) < 4 * se
            assert abs(exact_mean_re_log(N, theta) - mean_log_target(N, theta)) < 0.35

    def test_imaginary_mean_bounded(self):
        N = 64
        ang = sample_haar_angles("usp", N, 3000, seed=23)
        for theta in (0.1, 0.7):
            vals = log_char_poly(ang, theta).imag
            se = vals.std() / math.sqrt(len(vals))
            assert abs(vals.mean()) <= 1.0 + 3 * se


class TestCountFluctuations:
    def test_total_count(self):
        ang = sample_haar_angles("usp", 16, 40, seed=41)
        from fflab.rmt import count_in_arc

        assert np.all(count_in_arc(ang, 0.0, 1.0 - 1e-12) == 32)

    def test_variance_scaling_negative_control(self):
        # i.i.d. uniform angles have Poissonian count variance, far above
        # the rigid Haar fluctuations
        N = 64
        rng = _rng(55)
        ang = np.sort(rng.uniform(0, np.pi, size=(1500, N)), axis=1)
        haar = sample_haar_angles("usp", N, 1500, seed=56)
        lo, hi = 0.02, 0.10
        v_pois = count_fluctuation(ang, lo, hi).var()
        v_haar = count_fluctuation(haar, lo, hi).var()
        assert v_pois > 5 * v_haar
