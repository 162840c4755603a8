"""Vectorized batch kernels for character sweeps over many D at once.

The working representation is a digit matrix: row i holds the little-endian
coefficients (c_0 .. c_{n-1}, 1) of a monic degree-n polynomial D.  For an
irreducible P with root rho in the canonical extension F_{q^d},

    chi_D(P) = chi2(D(rho))

where chi2 is the quadratic character of F_{q^d}.  D(rho) for a whole digit
matrix is one (fused, BLAS-backed) matrix multiply against the stacked digit
vectors of 1, rho, rho^2, ...  All kernels require a prime base field; the
scalar paths in `characters` remain the oracle and the e > 1 fallback.
"""

from __future__ import annotations

import functools

import numpy as np

from .fieldpoly import Fq, FqPoly, ext_tables, factor, monic_digit_matrix, primes_with_roots

_PRIME_BLOCK = 384  # primes per fused matmul block (memory control)


def _require_prime_field(field: Fq):
    if field.e != 1:
        raise NotImplementedError("batch sweeps require a prime base field")


@functools.lru_cache(maxsize=None)
def _root_power_digits(field: Fq, d: int, rows: int) -> tuple[tuple[tuple[int, ...], ...], np.ndarray]:
    """Per prime of degree d: digit vectors of rho^j, j < rows.

    Returns (prime coefficient tuples, W) with W of shape (nP, rows, d).
    """
    prs = primes_with_roots(field, d)
    T = ext_tables(field, d)
    nP = len(prs)
    W = np.zeros((nP, rows, d), dtype=np.int64)
    for i, (_, rho) in enumerate(prs):
        cur = 1
        for j in range(rows):
            W[i, j] = T.idx2vec[cur]
            cur = T._mul_scalar(cur, rho)
    return tuple(p for p, _ in prs), W


def eval_at_prime_roots(field: Fq, digits: np.ndarray, d: int) -> tuple[tuple[tuple[int, ...], ...], np.ndarray]:
    """D(rho_P) as canonical-field element indices, all D x all degree-d P.

    Returns (prime tuples, idx matrix of shape (N, nP)).
    """
    _require_prime_field(field)
    p = field.q
    rows = digits.shape[1]
    primes, W = _root_power_digits(field, d, rows)
    T = ext_tables(field, d)
    N, nP = digits.shape[0], len(primes)
    out = np.empty((N, nP), dtype=np.int32)
    A = digits.astype(np.float32)
    for lo in range(0, nP, _PRIME_BLOCK):
        hi = min(lo + _PRIME_BLOCK, nP)
        blk = W[lo:hi]  # (b, rows, d)
        flat = blk.transpose(1, 0, 2).reshape(rows, -1).astype(np.float32)
        R = A @ flat  # (N, b*d); exact: values < q^2 * rows << 2^24
        R %= p
        R = R.reshape(N, hi - lo, d)
        idx = R @ T.powvec.astype(np.float32)
        out[:, lo:hi] = idx.astype(np.int32)
    return primes, out


def chi_prime_matrix(field: Fq, digits: np.ndarray, d: int) -> tuple[tuple[tuple[int, ...], ...], np.ndarray]:
    """chi_D(P) in {-1, 0, +1} for every row D and every prime P of degree d."""
    T = ext_tables(field, d)
    primes, idx = eval_at_prime_roots(field, digits, d)
    return primes, T.chi2[idx]


def chi_column(field: Fq, digits: np.ndarray, f: FqPoly) -> np.ndarray:
    """chi_D(f) for every row D of the digit matrix (f monic, any degree)."""
    _require_prime_field(field)
    if f.degree == 0:
        return np.ones(digits.shape[0], dtype=np.int8)
    out = np.ones(digits.shape[0], dtype=np.int8)
    for P, m in factor(f).factors:
        d = P.degree
        T = ext_tables(field, d)
        prs = primes_with_roots(field, d)
        rho = next(r for c, r in prs if c == P.coeffs)
        rows = digits.shape[1]
        W = np.zeros((rows, d), dtype=np.float32)
        cur = 1
        for j in range(rows):
            W[j] = T.idx2vec[cur]
            cur = T._mul_scalar(cur, rho)
        R = (digits.astype(np.float32) @ W) % field.q
        idx = (R @ T.powvec.astype(np.float32)).astype(np.int32)
        col = T.chi2[idx]
        if m % 2 == 0:
            col = (col != 0).astype(np.int8)
        out *= col
    return out


def squarefree_mask(field: Fq, digits: np.ndarray) -> np.ndarray:
    """Vectorized square-free test: P^2 | D iff D(rho) = D'(rho) = 0."""
    _require_prime_field(field)
    p = field.q
    N, rows = digits.shape
    n = rows - 1
    deriv = (digits * (np.arange(rows) % p)).astype(np.int16)[:, 1:]
    bad = np.zeros(N, dtype=bool)
    for d in range(1, n // 2 + 1):
        _, val = eval_at_prime_roots(field, digits, d)
        _, dval = eval_at_prime_roots(field, deriv, d)
        bad |= ((val == 0) & (dval == 0)).any(axis=1)
    return ~bad


def hyperelliptic_digits(field: Fq, n: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Digit rows of the monic square-free degree-n D in an index range."""
    digits = monic_digit_matrix(field, n, start, stop)
    if n < 2:
        return digits
    return digits[squarefree_mask(field, digits)]


def lstar_raw_coefficients(field: Fq, digits: np.ndarray, kmax: int) -> np.ndarray:
    """a_k(D) = sum over monic f of degree k of chi_D(f), for k = 0..kmax.

    Computed as the degree-truncated Euler product over primes of degree
    <= kmax (every monic of degree <= kmax factors within that set).
    Exact int64; returns shape (kmax+1, N).
    """
    _require_prime_field(field)
    N = digits.shape[0]
    coef = np.zeros((kmax + 1, N), dtype=np.int64)
    coef[0] = 1
    for d in range(1, kmax + 1):
        primes, chis = chi_prime_matrix(field, digits, d)
        # multiply the series by (1 - chi u^d)^-1 for each prime: ascending
        # update coef[k] += chi * coef[k-d]
        for i in range(len(primes)):
            col = chis[:, i].astype(np.int64)
            for k in range(d, kmax + 1):
                coef[k] += col * coef[k - d]
    return coef


def ensemble_character_sum(field: Fq, digits: np.ndarray, f: FqPoly) -> int:
    """Exact sum over rows D of chi_D(f)."""
    return int(chi_column(field, digits, f).astype(np.int64).sum())
