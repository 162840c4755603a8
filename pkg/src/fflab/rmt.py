"""Haar sampling on USp(2N), SO(2N), U(N) and eigenangle statistics.

USp(2N) is sampled by structure-preserving Gram-Schmidt of a quaternionic
Ginibre matrix: each orthonormalized column u_k is paired with its exact
symplectic partner -J conj(u_k), and the positive-real normalization fixes
the quaternionic phase, so the result is Haar distributed.  A rejection
sampler from the Weyl eigenangle density at tiny N is kept as the
distributional oracle.

Eigenangles of USp/SO samples are read from the Hermitian part (U+U*)/2,
whose spectrum is the doubled multiset {cos theta_j}; angles live in
(0, pi) with the conjugate pair implied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ENSEMBLES = ("usp", "so", "u")
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class RmtSample:
    """One matrix's fundamental eigenangles (radians) and seed lineage."""

    ensemble: str
    half_dim: int  # N for USp(2N)/SO(2N)/U(N)
    angles: np.ndarray
    seed: int
    index: int


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=stream))


def _quaternionic_ginibre(rng, batch: int, N: int) -> np.ndarray:
    X = rng.standard_normal((batch, N, N)) + 1j * rng.standard_normal((batch, N, N))
    Y = rng.standard_normal((batch, N, N)) + 1j * rng.standard_normal((batch, N, N))
    Z = np.empty((batch, 2 * N, 2 * N), dtype=complex)
    Z[:, :N, :N] = X
    Z[:, :N, N:] = Y
    Z[:, N:, :N] = -np.conj(Y)
    Z[:, N:, N:] = np.conj(X)
    return Z


def _apply_j(v: np.ndarray) -> np.ndarray:
    """J v with J = [[0, I], [-I, 0]], batched over leading axes."""
    N2 = v.shape[-1]
    N = N2 // 2
    out = np.empty_like(v)
    out[..., :N] = v[..., N:]
    out[..., N:] = -v[..., :N]
    return out


def sample_usp_batch(N: int, batch: int, rng) -> np.ndarray:
    """Haar USp(2N) matrices, shape (batch, 2N, 2N).

    Gram-Schmidt over quaternionic pairs: each orthonormalized column is
    stored together with its symplectic partner -J conj(u); columns are
    re-orthogonalized once (CGS2) to keep residuals at the 1e-13 level.
    """
    Z = _quaternionic_ginibre(rng, batch, N)
    B = batch
    # P interleaves [u_0, w_0, u_1, w_1, ...] for one growing GEMM per step
    P = np.zeros((B, 2 * N, 2 * N), dtype=complex)
    for k in range(N):
        v = Z[:, :, k].copy()
        if k:
            basis = P[:, :, : 2 * k]
            for _ in range(2):  # CGS2
                coef = np.matmul(np.conj(basis).swapaxes(1, 2), v[:, :, None])
                v -= np.matmul(basis, coef)[:, :, 0]
        norms = np.linalg.norm(v, axis=1, keepdims=True)
        if np.any(norms < 1e-12):
            raise FloatingPointError("degenerate Ginibre column")
        u = v / norms
        P[:, :, 2 * k] = u
        P[:, :, 2 * k + 1] = -_apply_j(np.conj(u))
    # reorder to [u's | w's]
    return np.concatenate([P[:, :, 0::2], P[:, :, 1::2]], axis=2)


def sample_so_batch(N: int, batch: int, rng) -> np.ndarray:
    """Haar SO(2N) matrices, shape (batch, 2N, 2N)."""
    M = rng.standard_normal((batch, 2 * N, 2 * N))
    Q, R = np.linalg.qr(M)
    sgn = np.sign(np.einsum("bii->bi", R))
    sgn[sgn == 0] = 1.0
    Q = Q * sgn[:, None, :]
    det = np.linalg.det(Q)
    flip = det < 0
    Q[flip, :, -1] *= -1.0
    return Q


def sample_u_batch(N: int, batch: int, rng) -> np.ndarray:
    """Haar U(N) matrices, shape (batch, N, N)."""
    M = rng.standard_normal((batch, N, N)) + 1j * rng.standard_normal((batch, N, N))
    Q, R = np.linalg.qr(M)
    d = np.einsum("bii->bi", R)
    ph = d / np.abs(d)
    return Q * np.conj(ph)[:, None, :]


def structure_residual(mat: np.ndarray, ensemble: str) -> float:
    """max of the unitarity and (for usp) symplecticity defects."""
    n = mat.shape[-1]
    eye = np.eye(n)
    uni = np.abs(np.swapaxes(np.conj(mat), -1, -2) @ mat - eye).max()
    if ensemble == "usp":
        N = n // 2
        J = np.zeros((n, n))
        J[:N, N:] = np.eye(N)
        J[N:, :N] = -np.eye(N)
        sym = np.abs(np.swapaxes(mat, -1, -2) @ J @ mat - J).max()
        return float(max(uni, sym))
    return float(uni)


def paired_angles(mat: np.ndarray, ensemble: str) -> np.ndarray:
    """Fundamental angles in (0, pi) from the doubled cos-spectrum."""
    H = (mat + np.swapaxes(np.conj(mat), -1, -2)) / 2.0
    if ensemble == "so":
        x = np.linalg.eigvalsh(H.real)
    else:
        x = np.linalg.eigvalsh(H)
    pair_gap = np.abs(x[..., 0::2] - x[..., 1::2]).max()
    if pair_gap > 1e-8:
        raise FloatingPointError(f"cos-spectrum not doubled (gap {pair_gap:.2e})")
    c = np.clip(x[..., 0::2], -1.0, 1.0)
    return np.sort(np.arccos(c), axis=-1)


def sample_haar_angles(
    ensemble: str,
    N: int,
    count: int,
    seed: int,
    chunk: int = 512,
    shard_offset: int = 0,
) -> np.ndarray:
    """Eigenangle matrix (count, N) for usp/so, (count, N) on [0, 2pi) for u.

    Deterministic per (seed, shard): chunk i draws from the Philox stream
    with counter shard_offset + i; independent of chunk size policy used
    to produce the same indices.
    """
    if ensemble not in ENSEMBLES:
        raise ValueError(f"ensemble must be one of {ENSEMBLES}")
    if N > 512:
        raise ValueError("half-dimension capped at 512")
    out = np.empty((count, N))
    done = 0
    block = 0
    while done < count:
        b = min(chunk, count - done)
        rng = _rng(seed, (shard_offset + block) * 1000003 + N)
        if ensemble == "usp":
            mats = sample_usp_batch(N, b, rng)
        elif ensemble == "so":
            mats = sample_so_batch(N, b, rng)
        else:
            mats = sample_u_batch(N, b, rng)
        res = structure_residual(mats[:1], ensemble)
        if res > RESIDUAL_TOL:
            raise FloatingPointError(f"structure residual {res:.2e} over tolerance")
        if ensemble == "u":
            ang = np.sort(np.mod(np.angle(np.linalg.eigvals(mats)), 2 * np.pi), axis=-1)
        else:
            ang = paired_angles(mats, ensemble)
        out[done : done + b] = ang
        done += b
        block += 1
    return out


def weyl_rejection_angles(ensemble: str, N: int, count: int, seed: int) -> np.ndarray:
    """Oracle sampler from the eigenangle density at tiny N (rejection).

    usp: density prop. to prod (cos ti - cos tj)^2 prod sin^2 t on (0,pi)^N.
    """
    if ensemble != "usp" or N > 3:
        raise ValueError("the rejection oracle covers usp with N <= 3")
    rng = _rng(seed, 77)
    out = np.empty((count, N))
    got = 0
    envelope = 4.0 ** (N * (N - 1) // 2)
    while got < count:
        draw = rng.uniform(0.0, np.pi, size=(4096, N))
        dens = np.ones(4096)
        for j in range(N):
            dens *= np.sin(draw[:, j]) ** 2
            for i in range(j):
                dens *= (np.cos(draw[:, i]) - np.cos(draw[:, j])) ** 2
        accept = rng.uniform(0.0, envelope, size=4096) < dens
        acc = draw[accept]
        take = min(len(acc), count - got)
        out[got : got + take] = np.sort(acc[:take], axis=1)
        got += take
    return out


# ---------------------------------------------------------------------------
# characteristic polynomial statistics
# ---------------------------------------------------------------------------


def _arg_one_minus_exp(alpha: np.ndarray) -> np.ndarray:
    """Principal Arg(1 - e^{i alpha}); exact hits contribute 0."""
    a = np.mod(alpha + np.pi, 2 * np.pi) - np.pi  # wrap to (-pi, pi]
    return np.where(a == 0.0, 0.0, a / 2.0 - np.sign(a) * np.pi / 2.0)


def log_char_poly(angles: np.ndarray, theta: float) -> np.ndarray:
    """log Z(theta) = sum_j log(1-e^{i(t_j - th)}) + log(1-e^{-i(t_j + th)}).

    Rows of fundamental angles; complex result with the per-factor
    principal branch (midpoint convention at exact angle hits).
    """
    a1 = angles - theta
    a2 = -(angles + theta)
    with np.errstate(divide="ignore"):
        re = np.log(2.0 * np.abs(np.sin(a1 / 2.0))).sum(axis=-1) + np.log(
            2.0 * np.abs(np.sin(a2 / 2.0))
        ).sum(axis=-1)
    im = _arg_one_minus_exp(a1).sum(axis=-1) + _arg_one_minus_exp(a2).sum(axis=-1)
    return re + 1j * im


def log_char_poly_determinant(mat: np.ndarray, theta: float) -> complex:
    """Oracle: log det directly from one matrix (principal per-factor sum)."""
    ev = np.linalg.eigvals(mat)
    fac = 1.0 - ev * np.exp(-1j * theta)
    re = np.log(np.abs(fac)).sum()
    im = _arg_one_minus_exp(np.angle(ev) - theta).sum()
    return complex(re + 1j * im)


def trace_power(angles: np.ndarray, k: int) -> np.ndarray:
    """Tr A^k from fundamental angles (conjugate pairs included)."""
    return 2.0 * np.cos(k * angles).sum(axis=-1)


def count_in_arc(angles: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Zero-angle count in the circle-fraction interval (lo, hi].

    Angles in paper units: the full spectrum is {t_j/(2pi)} U {1 - t_j/(2pi)}.
    """
    om = angles / (2 * np.pi)
    c = ((om > lo) & (om <= hi)).sum(axis=-1)
    om2 = 1.0 - om
    c = c + ((om2 > lo) & (om2 <= hi)).sum(axis=-1)
    return c


def count_fluctuation(angles: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Centered count: zeros in (lo, hi] minus the mean 2N (hi - lo)."""
    kappa = 2 * angles.shape[-1]
    return count_in_arc(angles, lo, hi) - kappa * (hi - lo)


def mean_log_target(N: int, theta: float) -> float:
    """(1/2) log min{N, 1/(2|theta|)} -- the smooth-branch mean of Re log Z."""
    return 0.5 * math.log(min(float(N), 1.0 / (2.0 * abs(theta)))) if theta else 0.5 * math.log(N)


def exact_mean_re_log(N: int, theta: float) -> float:
    """E[Re log Z(theta)] over USp(2N) exactly: (1/2) sum_{k<=N} cos(2k th)/k."""
    k = np.arange(1, N + 1)
    return float(0.5 * np.sum(np.cos(2 * k * theta) / k))
