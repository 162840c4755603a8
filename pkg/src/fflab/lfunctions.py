"""L-polynomials of quadratic characters: exact coefficients, eigenphases,
argument and zero-counting functions on the critical circle.

Conventions.  A completed L-polynomial of degree kappa with integer
coefficient vector c satisfies c_0 = 1 and has all zeros on |u| = q^(-1/2).
In the unitarized variable z = sqrt(q) u the polynomial

    p(z) = sum_k c_k q^(-k w) z^k        (w = 1/2 quadratic, w = 1 twists)

has all roots on the unit circle.  A zero at z = e(omega) has zero angle
omega in [0, 1); the spec-facing eigenphase is theta = -omega reduced to
[-1/2, 1/2) (the multiset is symmetric under negation, so both describe
the same set).  The continuous-branch argument used throughout is

    arg L*(q^(-1/2) e(theta)) = sum_j Arg(1 - e(omega_j - theta)),

the branch for which N(theta) = kappa * theta + (1/pi) arg holds exactly
with N counting zero angles in (0, theta] (half weight at an angle of 0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .characters import chi
from .fieldpoly import Fq, FqPoly, enumerate_monic
from .sweep import lstar_raw_coefficients

RH_TOL = 1e-9
NEWTON_STEPS = 20
NEWTON_TOL = 1e-12
FULL_COEFF_MAX_N = 8  # up to here the whole raw coefficient vector is computed


class CircleResidualError(Exception):
    """A root left the critical circle beyond tolerance: implementation bug."""


@dataclass(frozen=True)
class LPolynomial:
    """Completed L-polynomial with exact integer coefficients."""

    family: str  # "quadratic" | "elliptic-twist"
    q: int
    coeffs: tuple[int, ...]
    eta: int = 0
    sign: int = 1  # functional-equation sign

    @property
    def kappa(self) -> int:
        return len(self.coeffs) - 1

    @property
    def genus(self) -> int:
        if self.family != "quadratic":
            raise ValueError("genus is defined for the quadratic family")
        return self.kappa // 2

    @property
    def coeff_weight(self) -> float:
        # z-coefficient = coeffs[k] * q^(-k * coeff_weight)
        return 0.5 if self.family == "quadratic" else 1.0

    def unit_coeffs(self) -> np.ndarray:
        k = np.arange(len(self.coeffs))
        return np.asarray(self.coeffs, dtype=float) * float(self.q) ** (-k * self.coeff_weight)

    def check_symmetry(self):
        """Exact integer functional-equation symmetry; raises on violation."""
        c = self.coeffs
        m = self.kappa
        q = self.q
        if self.family == "quadratic":
            g = m // 2
            for k in range(m + 1):
                if k <= g and c[m - k] != q ** (g - k) * c[k]:
                    raise AssertionError(f"coefficient symmetry broken at k={k}")
        else:
            for k in range(m // 2 + 1):
                if c[m - k] != self.sign * c[k] * q ** (m - 2 * k):
                    raise AssertionError(f"twist symmetry broken at k={k}")

    def weil_coefficient_bounds_ok(self) -> bool:
        from math import comb

        m = self.kappa
        w = self.coeff_weight
        return all(
            abs(self.coeffs[k]) <= comb(m, k) * self.q ** (k * w) + 1e-9 for k in range(m + 1)
        )


@dataclass(frozen=True)
class EigenphaseSet:
    """Sorted eigenphases theta in [-1/2, 1/2); zero at u = q^(-1/2) e(-theta)."""

    phases: np.ndarray
    residual: float
    method: str

    @property
    def kappa(self) -> int:
        return len(self.phases)

    def zero_angles(self) -> np.ndarray:
        """Angles omega in [0, 1) of the zeros on the unitarized circle."""
        return np.sort(np.mod(-self.phases, 1.0))


# ---------------------------------------------------------------------------
# scalar construction (spec-literal path; the batch engine is the fast path)
# ---------------------------------------------------------------------------


def l_star(D: FqPoly) -> LPolynomial:
    """L*(u, chi_D) by direct enumeration of monic f of each degree.

    Exact integers; asserts the vanishing of the degree-n coefficient
    (the raw series is a polynomial of degree n-1) and, for even n, exact
    divisibility by the trivial-zero factor.
    """
    field = D.field
    n = D.degree
    if not D.is_monic or n < 1:
        raise ValueError("D must be monic of degree >= 1")
    if not D.is_squarefree():
        raise ValueError("D must be square-free")
    a = []
    for k in range(n + 1):
        a.append(sum(chi(D, f) for f in enumerate_monic(field, k)))
    if a[n] != 0:
        raise AssertionError("raw coefficient beyond the polynomial degree must vanish")
    eta = 1 if n % 2 == 0 else 0
    if eta:
        # divide by (1 - u): prefix sums; the last prefix must vanish exactly
        b = list(np.cumsum(a[:n]))
        if b[-1] != 0:
            raise AssertionError("trivial zero (1 - u) does not divide exactly")
        b = [int(x) for x in b[: n - 1]]
    else:
        b = a[:n]
    L = LPolynomial(family="quadratic", q=field.q, coeffs=tuple(b), eta=eta)
    L.check_symmetry()
    return L


def l_star_batch(field: Fq, n: int, digits: np.ndarray) -> np.ndarray:
    """Completed coefficient matrix b of shape (N, 2g+1), exact int64.

    For n <= FULL_COEFF_MAX_N every raw coefficient is computed directly
    and the functional-equation symmetry is asserted.  For larger n the
    raw coefficients are computed up to degree g and the upper half is
    completed through the exact symmetry b_{2g-k} = q^(g-k) b_k (a theorem
    for this family, validated exhaustively at small n).
    """
    eta = 1 if n % 2 == 0 else 0
    g = (n - 1 - eta) // 2
    kappa = 2 * g
    N = digits.shape[0]
    full = n <= FULL_COEFF_MAX_N
    kmax = n - 1 if full else g
    a = lstar_raw_coefficients(field, digits, kmax)  # (kmax+1, N)
    if eta:
        pref = np.cumsum(a, axis=0)
        if full:
            if not (pref[n - 1] == 0).all():
                raise AssertionError("trivial zero division not exact")
        b_low = pref[: min(kmax, kappa) + 1]
    else:
        b_low = a[: min(kmax, kappa) + 1]
    b = np.zeros((kappa + 1, N), dtype=np.int64)
    b[: b_low.shape[0]] = b_low
    q = field.q
    if full:
        for k in range(g + 1):
            if not (b[kappa - k] == q ** (g - k) * b[k]).all():
                raise AssertionError("functional-equation symmetry violated")
    else:
        for k in range(g):
            b[kappa - k] = q ** (g - k) * b[k]
    return b.T.copy()


# ---------------------------------------------------------------------------
# root extraction
# ---------------------------------------------------------------------------


def _batch_polyval(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Horner over the last axis: coeffs (N, M+1), z (N, K) -> (N, K)."""
    out = np.zeros_like(z)
    for k in range(coeffs.shape[1] - 1, -1, -1):
        out = out * z + coeffs[:, k, None]
    return out


def _batch_polyval_diff(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    out = np.zeros_like(z)
    for k in range(coeffs.shape[1] - 1, 0, -1):
        out = out * z + k * coeffs[:, k, None]
    return out


def unit_circle_roots(ucoeffs: np.ndarray, chunk: int = 8192) -> tuple[np.ndarray, np.ndarray]:
    """Roots of unitarized polynomials, rows of ucoeffs = c_0..c_kappa.

    Companion-matrix eigenvalues polished by Newton; clusters of nearly
    coincident roots are re-centered on their centroid before a
    multiplicity-aware Newton step so multiple roots also reach circle
    residuals ~1e-12.  Returns (zero angles in [0,1) sorted row-wise,
    per-row circle residuals).
    """
    N, M1 = ucoeffs.shape
    kappa = M1 - 1
    if kappa == 0:
        return np.zeros((N, 0)), np.zeros(N)
    angles = np.empty((N, kappa))
    resid = np.empty(N)
    for lo in range(0, N, chunk):
        hi = min(lo + chunk, N)
        c = ucoeffs[lo:hi]
        comp = np.zeros((hi - lo, kappa, kappa), dtype=complex)
        if kappa > 1:
            idx = np.arange(kappa - 1)
            comp[:, idx + 1, idx] = 1.0
        comp[:, :, -1] = -c[:, :-1] / c[:, -1:]
        z = np.linalg.eigvals(comp)
        cc = c.astype(complex)
        floor = 1e-14 * np.abs(c).max(axis=1, keepdims=True)
        for _ in range(NEWTON_STEPS):
            p = _batch_polyval(cc, z)
            # near a multiple root p and p' both sit at the noise floor and
            # their ratio is garbage: freeze roots that already evaluate to 0
            active = np.abs(p) > floor
            if not active.any():
                break
            dp = _batch_polyval_diff(cc, z)
            step = np.where(active, p / np.where(dp == 0, 1.0, dp), 0.0)
            step = np.where(np.abs(step) > 0.5, 0.0, step)  # keep Newton local
            z = z - step
        rr = np.abs(np.abs(z) - 1.0)
        bad = np.nonzero(rr.max(axis=1) > RH_TOL / 10)[0]
        for i in bad:
            z[i] = _fix_multiple_roots(c[i].astype(complex), z[i])
        angles[lo:hi] = np.sort(np.mod(np.angle(z) / (2 * np.pi), 1.0), axis=1)
        resid[lo:hi] = np.abs(np.abs(z) - 1.0).max(axis=1)
    return angles, resid


def _fix_multiple_roots(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Cluster near-coincident eigenvalues and polish cluster centroids.

    The centroid of an eigenvalue cluster of a multiple root is first-order
    accurate, and the multiplicity-aware Newton step z <- z - m p/p'
    converges quadratically from there.
    """
    order = np.argsort(np.angle(z))
    zs = z[order]
    clusters: list[list[complex]] = []
    for w in zs:
        if clusters and abs(w - clusters[-1][-1]) < 1e-4:
            clusters[-1].append(w)
        else:
            clusters.append([w])
    # wraparound at angle +-pi
    if len(clusters) > 1 and abs(clusters[0][0] - clusters[-1][-1]) < 1e-4:
        clusters[0] = clusters.pop() + clusters[0]
    out: list[complex] = []
    for cl in clusters:
        m = len(cl)
        center = complex(np.mean(cl))
        if m > 1:
            # an m-fold root is a simple root of the (m-1)-st derivative,
            # where Newton evaluates without the cancellation that caps
            # direct evaluation near a multiple root at ~sqrt(eps)
            dm = c
            for _ in range(m - 1):
                dm = np.polynomial.polynomial.polyder(dm)
            dm1 = np.polynomial.polynomial.polyder(dm)
            for _ in range(NEWTON_STEPS):
                p = np.polynomial.polynomial.polyval(center, dm)
                dp = np.polynomial.polynomial.polyval(center, dm1)
                if dp == 0:
                    break
                step = p / dp
                if abs(step) > 1e-3:
                    break
                center = center - step
        out.extend([center] * m)
    return np.asarray(out, dtype=complex)


def eigenphases(L: LPolynomial) -> EigenphaseSet:
    """Eigenphases by companion matrix + Newton; hard error off the circle."""
    if L.kappa == 0:
        return EigenphaseSet(phases=np.zeros(0), residual=0.0, method="companion-newton")
    omega, resid = unit_circle_roots(L.unit_coeffs()[None, :])
    r = float(resid[0])
    if r > RH_TOL:
        raise CircleResidualError(
            f"root residual {r:.3e} exceeds {RH_TOL}: coefficients are inconsistent"
        )
    theta = np.sort(np.mod(-omega[0] + 0.5, 1.0) - 0.5)
    return EigenphaseSet(phases=theta, residual=r, method="companion-newton")


def eigenphases_by_sign_change(L: LPolynomial, grid_mult: int = 64) -> np.ndarray:
    """Zero angles from sign changes of the real rotated polynomial on the
    circle, refined by bisection.  Misses even-multiplicity zeros; used as
    the independent cross-check on generic inputs.
    """
    kappa = L.kappa
    if kappa == 0:
        return np.zeros(0)
    c = L.unit_coeffs()

    def xi(theta):
        z = np.exp(2j * np.pi * np.asarray(theta, dtype=float))
        val = np.polyval(c[::-1], z) * np.exp(-1j * np.pi * kappa * np.asarray(theta))
        return val.real if L.sign == 1 else val.imag

    M = grid_mult * kappa
    grid = np.arange(M + 1) / M
    vals = xi(grid)
    roots = []
    for i in range(M):
        a, b = grid[i], grid[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0:
            roots.append(a)
            continue
        if fa * fb < 0:
            for _ in range(60):
                mid = 0.5 * (a + b)
                fm = xi(mid)
                if fa * fm <= 0:
                    b, fb = mid, fm
                else:
                    a, fa = mid, fm
            roots.append(0.5 * (a + b))
    return np.sort(np.mod(np.asarray(roots), 1.0))


# ---------------------------------------------------------------------------
# circle statistics from zero angles
# ---------------------------------------------------------------------------


def circle_arg(omega: np.ndarray, theta: float) -> np.ndarray:
    """Continuous-branch arg L* at angle theta from zero angles (rows).

    Per root: Arg(1 - e(omega - theta)) = pi (frac(omega - theta) - 1/2),
    with an exact hit contributing 0 (midpoint of the one-sided limits).
    """
    beta = np.mod(omega - theta, 1.0)
    contrib = np.where(beta == 0.0, 0.0, beta - 0.5)
    return np.pi * contrib.sum(axis=-1)


def count_zeros_upto(omega: np.ndarray, theta: float) -> np.ndarray:
    """N(theta): zero angles in (0, theta], half weight at an angle of 0."""
    inside = (omega > 0) & (omega <= theta)
    return inside.sum(axis=-1) + 0.5 * (omega == 0.0).sum(axis=-1)


def fluctuation_s(omega: np.ndarray, theta: float) -> np.ndarray:
    """S(theta) = (1/pi) arg L*; N(theta) = kappa theta + S(theta)."""
    return circle_arg(omega, theta) / np.pi


def circle_log_abs(omega: np.ndarray, theta: float) -> np.ndarray:
    """log |L*(q^(-1/2) e(theta))| = sum_j log 2|sin(pi (omega_j - theta))|.

    Rows with a zero hit return -inf.
    """
    s = 2.0 * np.abs(np.sin(np.pi * (omega - theta)))
    with np.errstate(divide="ignore"):
        return np.log(s).sum(axis=-1)


def log_abs_at(omega: np.ndarray, q: int, s: complex, eta: int = 0) -> np.ndarray:
    """log |L(q^-s)| from zero angles; includes the trivial factor for eta=1.

    Valid for Re(s) >= 1/2.  Exact zeros give -inf.
    """
    u = q ** (-s)
    w = np.sqrt(q) * u
    fac = 1.0 - w * np.exp(-2j * np.pi * omega)
    with np.errstate(divide="ignore"):
        out = np.log(np.abs(fac)).sum(axis=-1)
    if eta:
        out = out + np.log(abs(1.0 - u))
    return out


def log_abs_from_coeffs(L: LPolynomial, s: complex) -> float:
    """Cross path: evaluate the coefficient polynomial directly at u = q^-s."""
    u = L.q ** (-s)
    k = np.arange(len(L.coeffs))
    vals = np.asarray(L.coeffs, dtype=float) * (float(L.q) ** (-k * (L.coeff_weight - 0.5)))
    # vals are the analytically normalized coefficients; polynomial in u
    tot = np.polyval(vals[::-1], u)
    if L.family == "quadratic" and L.eta:
        tot = tot * (1.0 - u)
    a = np.abs(tot)
    return float(np.log(a)) if a > 0 else float("-inf")


def phase_power_cosines(omega: np.ndarray, kmax: int) -> np.ndarray:
    """p_k = sum_j cos(2 pi k omega_j) for k = 1..kmax; shape (N, kmax)."""
    k = np.arange(1, kmax + 1)
    ang = 2.0 * np.pi * omega[..., None] * k  # (N, kappa, kmax)
    return np.cos(ang).sum(axis=-2)
