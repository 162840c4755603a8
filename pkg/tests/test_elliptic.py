"""Twisted elliptic L-functions: traces, conductor, functional equation."""

import math

import numpy as np
import pytest

from fflab.characters import chi
from fflab.elliptic import (
    FunctionalEquationError,
    PointCountBudgetError,
    TwistCoefficientCache,
    coprime_family_digits,
    frobenius_trace,
    functional_equation_residual,
    make_curve,
    plus_family_sign,
    select_plus_family,
    toy_curve,
    twist_l,
    untwisted_l_series,
)
from fflab.fieldpoly import Fq, FqPoly, enumerate_monic, ext_tables, primes_with_roots
from fflab.lfunctions import eigenphases, log_abs_from_coeffs, unit_circle_roots

F5 = Fq.get(5)
T = FqPoly.x(F5)
ONE = FqPoly.one(F5)


@pytest.fixture(scope="module")
def curve():
    return toy_curve(F5)


@pytest.fixture(scope="module")
def cache(curve):
    return TwistCoefficientCache(curve, budget=6)


class TestCurveSetup:
    def test_discriminant_shape(self, curve):
        # 16 t^2 (t-1)^2 normalized monic = (t^2 + 4t)^2
        expect = (T * (T + FqPoly.constant(F5, 4))) ** 2 if hasattr(T, "__pow__") else None
        tt = T * (T + FqPoly.constant(F5, 4))
        assert curve.discriminant == tt * tt

    def test_reduction_types(self, curve):
        assert len(curve.mult_primes) == 2 and not curve.add_primes
        names = sorted(str(P) for P, _ in curve.mult_primes)
        assert names == ["t", "t + 4"]
        # both nodes are split: slope^2 = 4 and 1, both squares mod 5
        assert all(a == 1 for _, a in curve.mult_primes)

    def test_conductor_degree_detected(self, curve):
        assert curve.conductor_degree == 4
        # even-degree twists are the artifact-free parity for this curve;
        # odd-degree twists shed one split factor at the infinite place
        assert curve.parity_artifacts == (0, 1)
        assert curve.series_degree(3) == 6
        assert curve.twist_degree(3) == 5
        assert curve.twist_degree(2) == 4

    def test_untwisted_l_is_constant(self, curve, cache):
        # conductor degree 4 means the untwisted polynomial has degree 0
        coef = untwisted_l_series(curve, 6, cache)
        assert coef == [1, 0, 0, 0, 0, 0, 0]

    def test_rejects_singular(self):
        with pytest.raises(ValueError):
            make_curve(FqPoly.zero(F5), FqPoly.zero(F5))


class TestTraces:
    def test_known_good_prime(self, curve):
        # P = t + 1 (t = -1 = 4): reduced curve y^2 = x(x-1)(x-4) over F_5
        # has 8 points, frozen from the 25-case count: a_P = -2
        a, typ = frobenius_trace(curve, T + ONE)
        assert (a, typ) == (-2, "good")

    def test_known_bad_primes(self, curve):
        a, typ = frobenius_trace(curve, T)
        assert typ == "multiplicative" and a == 1
        a, typ = frobenius_trace(curve, T + FqPoly.constant(F5, 4))
        assert typ == "multiplicative" and a == 1

    def test_brute_force_oracle_degree_one(self, curve):
        # direct 25-case point count for every good linear prime
        for r in range(5):
            P = FqPoly.from_coeffs(F5, [(-r) % 5, 1])
            if (curve.discriminant % P).is_zero:
                continue
            Ar = curve.A.evaluate(r)
            Br = curve.B.evaluate(r)
            count = 0
            for x in range(5):
                fx = (x * x * x + Ar * x + Br) % 5
                if fx == 0:
                    count += 1
                elif F5.unit_quadratic_character(fx) == 1:
                    count += 2
            count += 1  # point at infinity
            a, typ = frobenius_trace(curve, P)
            assert typ == "good" and a == 5 + 1 - count

    def test_brute_force_oracle_degree_two(self, curve, cache):
        # independent scalar count over F_25 via the table field
        Tt = ext_tables(F5, 2)
        coeffs, rho = primes_with_roots(F5, 2)[3]
        P = FqPoly(F5, coeffs)
        Abar = Tt.embed_poly(curve.A, rho)
        Bbar = Tt.embed_poly(curve.B, rho)
        count = 0
        for x in range(25):
            x3 = Tt._mul_scalar(Tt._mul_scalar(x, x), x)
            ax = Tt._mul_scalar(Abar, x)
            fx = int(Tt.add_idx(Tt.add_idx(x3, ax), Bbar))
            if fx == 0:
                count += 1
            elif Tt.chi2[fx] == 1:
                count += 2
        count += 1
        a, typ = cache.trace(P)
        assert typ == "good"
        assert a == 25 + 1 - count

    def test_hasse_bound(self, curve, cache):
        for d in (1, 2, 3, 4):
            _, a_vals, types = cache.degree_data(d)
            good = a_vals[types == 0]
            assert np.all(np.abs(good) <= 2 * math.sqrt(5.0 ** d))

    def test_budget_error(self, curve):
        P7 = None
        for f in enumerate_monic(F5, 7):
            if f.is_irreducible():
                P7 = f
                break
        with pytest.raises(PointCountBudgetError):
            frobenius_trace(curve, P7, budget=4)

    def test_multiplicative_extension(self, curve, cache):
        # a(P^2) = a(P)^2 - |P| at good P; additive kills powers
        P = T + ONE
        a, _ = cache.trace(P)
        assert cache.coefficient(P * P) == a * a - 5
        assert cache.coefficient(P * P * P) == a ** 3 - 2 * 5 * a

    def test_lambda_squared_prime_census(self, curve, cache):
        # sum over deg P <= X of lambda(P)^2 / |P| = log X + O(1), X <= 6
        totals = {}
        acc = 0.0
        for X in range(1, 7):
            _, a_vals, types = cache.degree_data(X)
            norm = 5.0 ** X
            lam2 = (a_vals[types == 0].astype(float) / math.sqrt(norm)) ** 2
            acc += float(lam2.sum() / norm)
            totals[X] = acc
        for X in range(2, 7):
            assert abs(totals[X] - math.log(X)) <= 3.0

    def test_symmetric_square_identity(self, curve, cache):
        # lambda(P)^2 = lambda(P^2) + 1 in normalized form:
        # a(P)^2 = a(P^2) + |P| for good P
        for d in (1, 2, 3):
            coeffs, a_vals, types = cache.degree_data(d)
            for i, pc in enumerate(coeffs):
                if types[i] != 0:
                    continue
                P = FqPoly(F5, pc)
                assert cache.coefficient(P * P) == int(a_vals[i]) ** 2 - 5 ** d


class TestTwists:
    def test_functional_equation_and_rh(self, curve, cache):
        fam = coprime_family_digits(curve, 3)
        assert len(fam) >= 50
        for D in fam[:50]:
            L = twist_l(curve, D, cache)
            assert L.kappa == 5
            assert functional_equation_residual(L) <= 1e-8
            omega, resid = unit_circle_roots(L.unit_coeffs()[None, :])
            assert resid[0] <= 1e-8
            assert L.sign in (-1, 1)

    def test_even_degree_twists_clean(self, curve, cache):
        for D in coprime_family_digits(curve, 2)[:10]:
            L = twist_l(curve, D, cache)
            assert L.kappa == 4
            assert functional_equation_residual(L) <= 1e-8

    def test_sign_product_formula(self, curve, cache):
        # eps(E_D) = s_n * chi_D(M_E) with s_n constant across the family
        per_degree = {}
        for n in (1, 2, 3):
            fam = coprime_family_digits(curve, n)
            signs = []
            for D in fam[:24]:
                L = twist_l(curve, D, cache)
                signs.append(L.sign * chi(D, curve.mult_conductor))
            assert len(set(signs)) == 1
            per_degree[n] = signs[0]
        # the constant depends only on the parity of deg(D)
        assert per_degree[1] == per_degree[3]
        assert plus_family_sign(curve, 3) == per_degree[3]
        assert plus_family_sign(curve, 2) == per_degree[2]

    def test_minus_sign_forces_central_zero(self, curve, cache):
        found_minus = 0
        for D in coprime_family_digits(curve, 3)[:60]:
            L = twist_l(curve, D, cache)
            if L.sign == -1:
                found_minus += 1
                u = 5.0 ** -0.5
                k = np.arange(L.kappa + 1)
                vals = np.asarray(L.coeffs, dtype=float) * 5.0 ** (-k / 2.0)
                central = abs(np.polyval(vals[::-1], u))
                assert central <= 1e-8 * max(abs(vals))
        assert found_minus > 0

    def test_rejects_bad_twists(self, curve):
        with pytest.raises(ValueError):
            twist_l(curve, T)  # divides the discriminant
        with pytest.raises(ValueError):
            twist_l(curve, (T + ONE) * (T + ONE))

    def test_wrong_conductor_rejected(self, curve, cache):
        from fflab.elliptic import EllipticCurveFF

        wrong = EllipticCurveFF(
            A=curve.A,
            B=curve.B,
            discriminant=curve.discriminant,
            mult_primes=curve.mult_primes,
            add_primes=curve.add_primes,
            conductor_degree=6,
        )
        D = coprime_family_digits(curve, 2)[0]
        with pytest.raises(FunctionalEquationError):
            twist_l(wrong, D, cache)


class TestPlusFamily:
    def test_half_census(self, curve):
        # |plus family| / |coprime family| -> 1/2 for nontrivial M_E
        for n in (3, 4, 5):
            fam = coprime_family_digits(curve, n)
            s_n = plus_family_sign(curve, n)
            plus = [D for D in fam if chi(D, curve.mult_conductor) == s_n]
            assert abs(len(plus) / len(fam) - 0.5) <= 5.0 ** (-n / 2) * 6.0

    def test_progression_census(self, curve):
        # |H_n in a unit progression| matches |H_n|/units * prod |P|/(|P|+1)
        mod = curve.finite_conductor  # t(t+4), 16 units
        n = 5
        fam = coprime_family_digits(curve, n)
        unit_count = 16
        target = (5 ** (n - 1) * 4) / unit_count * (5 / 6.0) ** 2
        buckets: dict[tuple, int] = {}
        for D in fam:
            r = D % mod
            buckets[r.coeffs] = buckets.get(r.coeffs, 0) + 1
        assert len(buckets) == unit_count
        for cnt in buckets.values():
            assert abs(cnt - target) <= 5.0 ** (0.25 * n + 1)

    def test_select_plus_family_yields_plus_signs(self, curve, cache):
        got = list(select_plus_family(curve, 2))
        assert got
        for D in got[:6]:
            assert twist_l(curve, D, cache).sign == 1

    def test_square_sum_orthogonality_in_progressions(self, curve):
        # sum over D in a progression of chi_D(l^2) is close to
        # |H_n| / units * prod over P | l N of (1+1/|P|)^{-1}
        n = 6
        mod = curve.finite_conductor
        fam = coprime_family_digits(curve, n)
        ell = T + FqPoly.constant(F5, 2)  # coprime to N_E
        C = ONE
        total = 0
        count = 0
        for D in fam:
            if ((D - C) % mod).is_zero:
                count += 1
                total += chi(D, ell * ell)
        target = (5 ** (n - 1) * 4) / 16.0 * (5 / 6.0) ** 2 * (1 / (1 + 1 / 5.0))
        assert abs(total - target) <= 5.0 ** ((0.25 + 0.05) * n) + 10
