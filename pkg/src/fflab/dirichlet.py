"""Dirichlet-polynomial approximation layer.

Holds the weighted von Mangoldt cutoff, the truncated log-derivative
polynomials, shift plans with their regime tags, and the closed-form
mean/variance targets used to standardize ensemble statistics.

Two evaluation routes exist for the truncated polynomials:

  * `dirichlet_poly_direct` enumerates monic polynomials -- the oracle,
    viable only for small cutoffs;
  * `dirichlet_poly_from_phases` uses the exact identity between the
    degree-k von Mangoldt character sum and the power sums of the zeros,

        sum_{deg f = k} Lambda(f) chi_D(f) = -eta - q^(k/2) sum_j cos(2 pi k omega_j),

    which is how full-size sweeps stay tractable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .characters import chi
from .fieldpoly import FqPoly, count_irreducibles, enumerate_monic, factor, von_mangoldt
from .lfunctions import phase_power_cosines

MICRO_SPACINGS = 10.0  # microscopic band: within this many mean spacings of 0


# ---------------------------------------------------------------------------
# weighted von Mangoldt cutoff
# ---------------------------------------------------------------------------


def vm_weight(deg: int, X: int) -> int:
    """Multiplier w(deg) with Lambda_cutoff(f) = w(deg f) Lambda(f).

    The three-branch display is reproduced verbatim, including its
    discontinuity at deg = X (no smoothing is applied).
    """
    if X < 1:
        raise ValueError("cutoff must be >= 1")
    if deg <= 0 or deg > 3 * X:
        return 0
    if deg <= X:
        return 2 * X * X
    if deg <= 2 * X:
        return X * X - deg * deg + 2 * deg * X - 3 * X - deg - 2
    return (3 * X - deg + 1) * (3 * X - deg + 2)


def weighted_von_mangoldt(f: FqPoly, X: int) -> int:
    """The weighted von Mangoldt value for the quadratic family."""
    lam = von_mangoldt(f)
    if lam == 0:
        return 0
    return vm_weight(f.degree, X) * lam


# ---------------------------------------------------------------------------
# shift plans and regimes
# ---------------------------------------------------------------------------


def classify_regime(t: float, kappa: int, q: int) -> str:
    """Deterministic regime tag for a shift t relative to kappa phases.

    gamma = kappa/2 plays the role of the genus.  Microscopic means within
    MICRO_SPACINGS mean spacings of the central point; mesoscopic up to
    gamma^(-0.1); macroscopic beyond, requiring |t| < 2 pi.
    """
    if abs(t) >= 2 * math.pi:
        raise ValueError("shifts must satisfy |t| < 2 pi")
    gamma = max(kappa / 2.0, 1.0)
    micro_edge = MICRO_SPACINGS * (2 * math.pi / math.log(q)) / gamma
    if abs(t) <= micro_edge:
        return "microscopic"
    if abs(t) <= gamma ** -0.1:
        return "mesoscopic"
    return "macroscopic"


def _clamp(scale: float, denom: float) -> float:
    """min{scale, 1/denom} with the denom -> 0 branch equal to scale."""
    if denom <= 0:
        return scale
    return min(scale, 1.0 / denom)


@dataclass(frozen=True)
class ShiftPlan:
    """Coefficients a and shifts t of a linear combination of logarithms."""

    a: tuple[float, ...]
    t: tuple[float, ...]
    kappa: int
    q: int

    def __post_init__(self):
        if len(self.a) != len(self.t) or not self.a:
            raise ValueError("a and t must be equal-length nonempty vectors")
        for tj in self.t:
            if abs(tj) >= 2 * math.pi:
                raise ValueError("shifts must satisfy |t| < 2 pi")

    @property
    def k(self) -> int:
        return len(self.a)

    def regimes(self) -> tuple[str, ...]:
        return tuple(classify_regime(tj, self.kappa, self.q) for tj in self.t)


@dataclass(frozen=True)
class MomentTargets:
    mean: float
    var_re: float
    var_im: float
    sign: int  # +1 quadratic family, -1 elliptic twists
    degenerate_im: bool


DEGENERATE_VAR_EPS = 1e-9


def moment_targets(plan: ShiftPlan, scale: float, sign: int = 1) -> MomentTargets:
    """Closed-form mean and variances of the standardized log statistics.

    `scale` is the large parameter of the family (n, m, the cutoff, or the
    matrix half-dimension); all clamps are min{scale, .}.
    """
    a, t = plan.a, plan.t
    mean = sum(aj / 2.0 * math.log(_clamp(scale, 2 * abs(tj))) for aj, tj in zip(a, t))
    sum_a2 = sum(aj * aj for aj in a)
    var_re = 0.5 * sum_a2 * math.log(scale)
    var_im = 0.5 * sum_a2 * math.log(scale)
    for aj, tj in zip(a, t):
        var_re += 0.5 * aj * aj * math.log(_clamp(scale, 2 * abs(tj)))
        var_im -= 0.5 * aj * aj * math.log(_clamp(scale, 2 * abs(tj)))
    k = len(a)
    for i in range(k):
        for j in range(i + 1, k):
            minus = _clamp(scale, abs(t[i] - t[j]))
            plus = _clamp(scale, abs(t[i] + t[j]))
            var_re += a[i] * a[j] * math.log(minus * plus)
            var_im += a[i] * a[j] * math.log(minus / plus)
    return MomentTargets(
        mean=mean,
        var_re=var_re,
        var_im=var_im,
        sign=sign,
        degenerate_im=abs(var_im) < max(DEGENERATE_VAR_EPS, 0.05 * abs(var_re)),
    )


@dataclass(frozen=True)
class ApproxParams:
    """Truncation degree X and the offset constant c with sigma0 = 1/2 + c/X."""

    X: int
    c: float | None = None

    def __post_init__(self):
        if self.X < 2:
            raise ValueError("truncation degree must be >= 2")

    def offset(self, q: int) -> float:
        c = self.c if self.c is not None else 0.25 / math.log(q)
        if not (0 < c < 1 / (2 * math.log(q))):
            raise ValueError("require 0 < c < 1/(2 log q)")
        return c

    def sigma0(self, q: int) -> float:
        return 0.5 + self.offset(q) / self.X


# ---------------------------------------------------------------------------
# Dirichlet polynomials
# ---------------------------------------------------------------------------


def dirichlet_poly_direct(D: FqPoly, X: int, s: complex) -> complex:
    """Oracle: sum over monic f with deg <= X of Lambda(f) chi_D(f) / (deg f |f|^s)."""
    field = D.field
    total = 0.0 + 0.0j
    for k in range(1, X + 1):
        qs = field.q ** (-s * k)
        for f in enumerate_monic(field, k):
            lam = von_mangoldt(f)
            if lam:
                c = chi(D, f)
                if c:
                    total += lam * c / k * qs
    return complex(total)


def von_mangoldt_degree_sums(omega: np.ndarray, q: int, kmax: int, eta: int = 0) -> np.ndarray:
    """Exact sum_{deg f = k} Lambda(f) chi_D(f) from zero angles, k = 1..kmax."""
    p = phase_power_cosines(omega, kmax)  # (N, kmax)
    k = np.arange(1, kmax + 1)
    return -float(eta) - np.power(float(q), k / 2.0) * p


def dirichlet_poly_from_phases(
    omega: np.ndarray, q: int, X: int, s: complex, eta: int = 0
) -> np.ndarray:
    """D_X(s) for every row of zero angles, via the zero-side identity."""
    sums = von_mangoldt_degree_sums(omega, q, X, eta)
    k = np.arange(1, X + 1)
    w = np.power(complex(q), -s * k) / k
    return sums @ w


def weighted_tail_from_phases(
    omega: np.ndarray, q: int, X: int, s: complex, eta: int = 0
) -> np.ndarray:
    """(1/(2X^2)) sum over X < deg f <= 3X of the weighted terms of D (per row)."""
    kmax = 3 * X
    sums = von_mangoldt_degree_sums(omega, q, kmax, eta)
    k = np.arange(1, kmax + 1)
    w = np.array([vm_weight(int(kk), X) for kk in k], dtype=float)
    w[: X] = 0.0
    coeff = w * np.power(complex(q), -s * k) / k / (2.0 * X * X)
    return sums @ coeff


def prime_degree_sums_quadratic(
    omega: np.ndarray, q: int, kmax: int, eta: int, D_list: list[FqPoly]
) -> np.ndarray:
    """S_k = sum over degree-k primes of chi_D(P), exactly, k = 1..kmax.

    Inverts the prime-power decomposition of the von Mangoldt sums; even
    character powers count primes not dividing D, which is read off each
    D's factorization.
    """
    N = omega.shape[0]
    lsum = von_mangoldt_degree_sums(omega, q, kmax, eta)  # (N, kmax)
    prime_div_degrees = []
    for D in D_list:
        degs = [P.degree for P, _ in factor(D).factors]
        prime_div_degrees.append(degs)
    S = np.zeros((N, kmax + 1))
    for k in range(1, kmax + 1):
        acc = lsum[:, k - 1].astype(float).copy()
        for j in range(2, k + 1):
            if k % j:
                continue
            d = k // j
            if j % 2 == 1:
                acc -= d * S[:, d]
            else:
                cnt = count_irreducibles_cached(q, d) - np.array(
                    [degs.count(d) for degs in prime_div_degrees], dtype=float
                )
                acc -= d * cnt
        S[:, k] = acc / k
    return S[:, 1:]


_irred_cache: dict[tuple[int, int], int] = {}


def count_irreducibles_cached(q: int, d: int) -> int:
    key = (q, d)
    if key not in _irred_cache:
        from .fieldpoly import Fq

        _irred_cache[key] = count_irreducibles(Fq.get(q), d)
    return _irred_cache[key]


def prime_poly_from_phases(
    omega: np.ndarray, q: int, X: int, s: complex, eta: int, D_list: list[FqPoly]
) -> np.ndarray:
    """P_X(s) = sum over primes of degree <= X of deg(P) chi_D(P) / |P|^s."""
    S = prime_degree_sums_quadratic(omega, q, X, eta, D_list)
    k = np.arange(1, X + 1)
    w = k * np.power(complex(q), -s * k)
    return S @ w


def prime_poly_direct(D: FqPoly, X: int, s: complex) -> complex:
    """Oracle for P_X by enumerating irreducibles."""
    field = D.field
    total = 0.0 + 0.0j
    for k in range(1, X + 1):
        qs = field.q ** (-s * k)
        for f in enumerate_monic(field, k):
            if f.is_irreducible():
                c = chi(D, f)
                if c:
                    total += k * c * qs
    return complex(total)


def linear_combo_from_phases(
    omega: np.ndarray, q: int, X: int, sigma0: float, plan: ShiftPlan, eta: int = 0
) -> np.ndarray:
    """sum_j a_j D_X(sigma0 + i t_j) for every row; complex array."""
    out = np.zeros(omega.shape[0], dtype=complex)
    for aj, tj in zip(plan.a, plan.t):
        out += aj * dirichlet_poly_from_phases(omega, q, X, sigma0 + 1j * tj, eta)
    return out


# ---------------------------------------------------------------------------
# trigonometric sums
# ---------------------------------------------------------------------------


def cosine_sum_check(X: int, t: float) -> tuple[float, float, float, float]:
    """(cos sum, clamp, cos discrepancy, sine sum).

    cos sum = sum_{n <= X} cos(2 n t)/n, clamp = log min{X, 1/(2|t|)};
    the sine variant is returned for comparison against 0.
    """
    if X < 2:
        raise ValueError("X must be >= 2")
    n = np.arange(1, X + 1, dtype=float)
    c = float(np.sum(np.cos(2 * n * t) / n))
    s = float(np.sum(np.sin(2 * n * t) / n))
    clamp = math.log(_clamp(float(X), 2 * abs(t)))
    return c, clamp, c - clamp, s


# ---------------------------------------------------------------------------
# finite-form predictions (pre-asymptotic targets for Monte Carlo gates)
# ---------------------------------------------------------------------------


def predicted_mean_finite(q: int, X: int, t: float, sigma0: float) -> float:
    """E[Re D_X(sigma0 + it)] from even prime powers, exact prime counts.

    Keeps the (1+1/|P|)^-1 orthogonality weight and all even powers; the
    asymptotic form is (1/2) log min{X, 1/(2|t|)} + O(1).
    """
    L = math.log(q)
    total = 0.0
    for d in range(1, X // 2 + 1):
        nP = count_irreducibles_cached(q, d)
        w = q ** d / (q ** d + 1.0)
        m = 2
        while m * d <= X:
            total += nP * w * d * math.cos(m * d * t * L) / (m * d * q ** (m * d * sigma0))
            m += 2
    return total


def predicted_cov_finite(
    q: int, X: int, ti: float, tj: float, sigma0: float, im: bool = False
) -> float:
    """Finite-sample prediction of Cov(Re D_X(ti), Re D_X(tj)) (or Im, Im).

    Sums the square-pairing contributions (P^a, P^b), a and b odd, with the
    exact orthogonality weight; the asymptotic limit is the half-log-clamp
    formula.
    """
    L = math.log(q)
    total = 0.0
    for d in range(1, X + 1):
        nP = count_irreducibles_cached(q, d)
        w = q ** d / (q ** d + 1.0)
        amax = X // d
        for a in range(1, amax + 1, 2):
            for b in range(1, amax + 1, 2):
                if im:
                    tri = math.sin(a * d * ti * L) * math.sin(b * d * tj * L)
                else:
                    tri = math.cos(a * d * ti * L) * math.cos(b * d * tj * L)
                total += nP * w * tri / (a * b * q ** ((a + b) * d * sigma0))
    return total


def asymptotic_cov_target(X: int, ti: float, tj: float, im: bool = False) -> float:
    """(1/2) log min{X, 1/|ti-tj|} +- (1/2) log min{X, 1/|ti+tj|}."""
    minus = math.log(_clamp(float(X), abs(ti - tj)))
    plus = math.log(_clamp(float(X), abs(ti + tj)))
    return 0.5 * (minus - plus) if im else 0.5 * (minus + plus)
