"""Exact arithmetic in F_q (q = p^e, p odd) and in F_q[t].

Field elements are plain ints in [0, q).  For a prime field they are the
residues mod p.  For e > 1 an element is the base-p encoding of its
coefficient vector in the basis 1, x, ..., x^(e-1) of F_p[x]/(modulus),
where the modulus is the least monic irreducible of degree e in
enumeration order (deterministic across runs).

Polynomials over F_q are coefficient tuples in little-endian order with
no trailing zeros; () is the zero polynomial.  The `FqPoly` wrapper adds
operators, factorization and serialization on top of the tuple kernel.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

MAX_DEGREE = 64
MAX_Q = 1 << 16
_TABLE_Q_LIMIT = 1024  # e > 1 fields use dense mul tables; keep them small

FACTOR_SEED = 0x5EED  # default seed for the equal-degree splitting RNG


def is_prime_int(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors_int(n: int) -> list[int]:
    """Distinct prime factors of n by trial division (n stays desk-sized)."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out.append(n)
    return out


class Fq:
    """The finite field F_q with q = p^e, p an odd prime.

    Instances are interned per (p, e): `Fq.get(5)` and `Fq.get(5, 1)`
    return the same object.
    """

    _cache: dict[tuple[int, int], "Fq"] = {}

    def __init__(self, p: int, e: int = 1):
        if not is_prime_int(p) or p < 3:
            raise ValueError(f"p must be an odd prime, got {p}")
        if e < 1:
            raise ValueError(f"extension degree must be >= 1, got {e}")
        q = p ** e
        if q > MAX_Q:
            raise ValueError(f"q = {q} exceeds the supported bound {MAX_Q}")
        self.p = p
        self.e = e
        self.q = q
        if e == 1:
            self.modulus: tuple[int, ...] | None = None
        else:
            if q > _TABLE_Q_LIMIT:
                raise ValueError(
                    f"extension fields are table-backed and limited to q <= {_TABLE_Q_LIMIT}"
                )
            self.modulus = _least_irreducible_modulus(p, e)
            self._build_tables()

    @classmethod
    def get(cls, p: int, e: int = 1) -> "Fq":
        key = (p, e)
        if key not in cls._cache:
            cls._cache[key] = cls(p, e)
        return cls._cache[key]

    # -- element codec -------------------------------------------------

    def element_vector(self, a: int) -> tuple[int, ...]:
        """Coefficient vector of `a` in the modulus basis (length e)."""
        v = []
        for _ in range(self.e):
            a, r = divmod(a, self.p)
            v.append(r)
        return tuple(v)

    def element_from_vector(self, v: Sequence[int]) -> int:
        a = 0
        for c in reversed(v):
            a = a * self.p + (c % self.p)
        return a

    # -- arithmetic ----------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        return int(self._add_table[a, b])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def neg(self, a: int) -> int:
        if self.e == 1:
            return (-a) % self.p
        return int(self._neg_table[a])

    def mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a * b) % self.p
        return int(self._mul_table[a, b])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in F_q")
        if self.e == 1:
            return pow(a, self.p - 2, self.p)
        return int(self._inv_table[a])

    def pow(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        if self.e == 1:
            return pow(a, k, self.p)
        r = 1
        while k:
            if k & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            k >>= 1
        return r

    def is_square(self, a: int) -> bool:
        """True iff a is a (possibly zero) square in F_q."""
        if a == 0:
            return True
        return self.pow(a, (self.q - 1) // 2) == 1

    def unit_quadratic_character(self, a: int) -> int:
        """+1/-1 for nonzero squares/non-squares, 0 at zero."""
        if a == 0:
            return 0
        return 1 if self.pow(a, (self.q - 1) // 2) == 1 else -1

    def _build_tables(self):
        p, e, q = self.p, self.e, self.q
        mod = self.modulus
        vecs = np.zeros((q, e), dtype=np.int64)
        for a in range(q):
            vecs[a] = self.element_vector(a)
        self._add_table = np.zeros((q, q), dtype=np.int32)
        self._mul_table = np.zeros((q, q), dtype=np.int32)
        pw = p ** np.arange(e, dtype=np.int64)
        for a in range(q):
            self._add_table[a] = ((vecs[a] + vecs) % p) @ pw
        # schoolbook products reduced by the modulus, one row at a time
        red = _power_reduction_rows(p, mod, 2 * e - 1)  # t^j mod modulus
        for a in range(q):
            va = vecs[a]
            conv = np.zeros((q, 2 * e - 1), dtype=np.int64)
            for i in range(e):
                conv[:, i : i + e] += va[i] * vecs
            self._mul_table[a] = ((((conv % p) @ red) % p) @ pw)
        self._neg_table = ((-vecs) % p) @ pw
        self._inv_table = np.zeros(q, dtype=np.int32)
        for a in range(1, q):
            self._inv_table[a] = self.pow(a, q - 2)

    def __repr__(self):
        return f"Fq({self.p}^{self.e})"

    def header(self) -> str:
        """Serialization header "p^e:modulus-digits" (empty for e = 1)."""
        if self.e == 1:
            return f"{self.p}^1:"
        return f"{self.p}^{self.e}:" + ",".join(str(c) for c in self.modulus)


def _power_reduction_rows(p: int, mod: tuple[int, ...], count: int) -> np.ndarray:
    """Rows t^j mod (monic `mod` over F_p) for j = 0..count-1, as an array."""
    e = len(mod) - 1
    rows = np.zeros((count, e), dtype=np.int64)
    cur = [0] * e
    cur[0] = 1
    for j in range(count):
        rows[j] = cur
        lead = cur[e - 1]
        nxt = [0] + cur[:-1]
        if lead:
            for i in range(e):
                nxt[i] = (nxt[i] - lead * mod[i]) % p
        nxt = nxt[:e]
        cur = [c % p for c in nxt]
    return rows


@functools.lru_cache(maxsize=None)
def _least_irreducible_modulus(p: int, e: int) -> tuple[int, ...]:
    """First monic irreducible of degree e over F_p in counter order."""
    base = Fq.get(p, 1)
    for idx in range(p ** e):
        coeffs = _index_to_monic(idx, e, p)
        f = FqPoly(base, coeffs)
        if f.is_irreducible():
            return coeffs
    raise RuntimeError("unreachable: irreducibles of every degree exist")


def _index_to_monic(idx: int, n: int, q: int) -> tuple[int, ...]:
    digits = []
    for _ in range(n):
        idx, r = divmod(idx, q)
        digits.append(r)
    return tuple(digits) + (1,)


# ---------------------------------------------------------------------------
# polynomial kernel on coefficient tuples
# ---------------------------------------------------------------------------


def _trim(c: list[int]) -> tuple[int, ...]:
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class FqPoly:
    """A polynomial over F_q; coeffs little-endian, no trailing zeros."""

    field: Fq
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if self.coeffs and self.coeffs[-1] == 0:
            object.__setattr__(self, "coeffs", _trim(list(self.coeffs)))
        if len(self.coeffs) - 1 > MAX_DEGREE:
            raise ValueError(f"degree {len(self.coeffs) - 1} exceeds bound {MAX_DEGREE}")

    # -- constructors ----------------------------------------------------

    @staticmethod
    def from_coeffs(field: Fq, coeffs: Sequence[int]) -> "FqPoly":
        if field.e == 1:
            return FqPoly(field, _trim([c % field.q for c in coeffs]))
        if any(not (0 <= c < field.q) for c in coeffs):
            raise ValueError("extension-field coefficients must be element indices in [0, q)")
        return FqPoly(field, _trim(list(coeffs)))

    @staticmethod
    def zero(field: Fq) -> "FqPoly":
        return FqPoly(field, ())

    @staticmethod
    def one(field: Fq) -> "FqPoly":
        return FqPoly(field, (1,))

    @staticmethod
    def x(field: Fq) -> "FqPoly":
        return FqPoly(field, (0, 1))

    @staticmethod
    def constant(field: Fq, c: int) -> "FqPoly":
        return FqPoly(field, (c,) if c else ())

    # -- basic queries ---------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    @property
    def norm(self) -> int:
        """|f| = q^deg(f) for nonzero f."""
        if self.is_zero:
            raise ValueError("|0| undefined")
        return self.field.q ** self.degree

    def __bool__(self):
        return bool(self.coeffs)

    def __getitem__(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "FqPoly") -> "FqPoly":
        F = self.field
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = F.add(out[i], c)
        return FqPoly(F, _trim(out))

    def __neg__(self) -> "FqPoly":
        F = self.field
        return FqPoly(F, tuple(F.neg(c) for c in self.coeffs))

    def __sub__(self, other: "FqPoly") -> "FqPoly":
        return self + (-other)

    def __mul__(self, other: "FqPoly") -> "FqPoly":
        F = self.field
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return FqPoly.zero(F)
        out = [0] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca == 0:
                continue
            for j, cb in enumerate(b):
                if cb:
                    out[i + j] = F.add(out[i + j], F.mul(ca, cb))
        return FqPoly(F, _trim(out))

    def scale(self, c: int) -> "FqPoly":
        F = self.field
        if c == 0:
            return FqPoly.zero(F)
        return FqPoly(F, _trim([F.mul(c, x) for x in self.coeffs]))

    def __divmod__(self, other: "FqPoly") -> tuple["FqPoly", "FqPoly"]:
        F = self.field
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        d = other.degree
        inv_lead = F.inv(other.coeffs[-1])
        qcoef = [0] * max(0, len(r) - d)
        for i in range(len(r) - 1, d - 1, -1):
            c = r[i]
            if c == 0:
                continue
            factor = F.mul(c, inv_lead)
            qcoef[i - d] = factor
            for j, oc in enumerate(other.coeffs):
                r[i - d + j] = F.sub(r[i - d + j], F.mul(factor, oc))
        return FqPoly(F, _trim(qcoef)), FqPoly(F, _trim(r))

    def __floordiv__(self, other: "FqPoly") -> "FqPoly":
        return divmod(self, other)[0]

    def __mod__(self, other: "FqPoly") -> "FqPoly":
        return divmod(self, other)[1]

    def gcd(self, other: "FqPoly") -> "FqPoly":
        a, b = self, other
        while not b.is_zero:
            a, b = b, a % b
        if a.is_zero:
            return a
        return a.monic()

    def monic(self) -> "FqPoly":
        if self.is_zero:
            raise ValueError("cannot normalize the zero polynomial")
        if self.is_monic:
            return self
        return self.scale(self.field.inv(self.coeffs[-1]))

    def derivative(self) -> "FqPoly":
        F = self.field
        out = []
        for i in range(1, len(self.coeffs)):
            k = i % F.p
            out.append(F.mul(k, self.coeffs[i]) if k else 0)
        return FqPoly(F, _trim(out))

    def evaluate(self, x: int) -> int:
        F = self.field
        acc = 0
        for c in reversed(self.coeffs):
            acc = F.add(F.mul(acc, x), c)
        return acc

    def pow_mod(self, k: int, mod: "FqPoly") -> "FqPoly":
        base = self % mod
        out = FqPoly.one(self.field)
        while k:
            if k & 1:
                out = (out * base) % mod
            base = (base * base) % mod
            k >>= 1
        return out

    def shift_mul_x(self) -> "FqPoly":
        if self.is_zero:
            return self
        return FqPoly(self.field, (0,) + self.coeffs)

    # -- predicates --------------------------------------------------------

    def is_irreducible(self) -> bool:
        """Rabin's test; rejects non-monic input."""
        if not self.is_monic:
            raise ValueError("irreducibility is tested on monic polynomials")
        n = self.degree
        if n < 1:
            return False
        F = self.field
        x = FqPoly.x(F)
        # x^(q^n) == x mod f
        xp = x.pow_mod(F.q ** n, self)
        if xp != x % self:
            return False
        for r in prime_factors_int(n):
            h = x.pow_mod(F.q ** (n // r), self) - (x % self)
            if not self.gcd(h).degree == 0:
                return False
        return True

    def is_squarefree(self) -> bool:
        if not self.is_monic:
            raise ValueError("square-freeness is tested on monic polynomials")
        if self.degree == 0:
            return True
        d = self.derivative()
        if d.is_zero:
            return False
        return self.gcd(d).degree == 0

    # -- serialization -------------------------------------------------------

    def digits(self) -> str:
        return ",".join(str(c) for c in self.coeffs)

    @staticmethod
    def from_digits(field: Fq, s: str) -> "FqPoly":
        if not s.strip():
            return FqPoly.zero(field)
        return FqPoly.from_coeffs(field, [int(x) for x in s.split(",")])

    def __str__(self):
        if self.is_zero:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*t" if c != 1 else "t")
            else:
                terms.append(f"{c}*t^{i}" if c != 1 else f"t^{i}")
        return " + ".join(reversed(terms))


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


def monic_from_index(field: Fq, n: int, idx: int) -> FqPoly:
    """The idx-th monic polynomial of degree n in counter order."""
    return FqPoly(field, _index_to_monic(idx, n, field.q))


def enumerate_monic(field: Fq, n: int, start: int = 0, stop: int | None = None) -> Iterator[FqPoly]:
    """Monic degree-n polynomials in base-q little-endian counter order.

    `start`/`stop` select an index sub-range so streams shard cleanly.
    """
    if n < 0:
        raise ValueError("degree must be >= 0")
    total = field.q ** n
    if stop is None:
        stop = total
    for idx in range(start, min(stop, total)):
        yield monic_from_index(field, n, idx)


def monic_digit_matrix(field: Fq, n: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Coefficient rows (c0..c_{n-1}, 1) of monic degree-n polys, vectorized."""
    q = field.q
    total = q ** n
    if stop is None:
        stop = total
    idx = np.arange(start, min(stop, total), dtype=np.int64)
    out = np.empty((len(idx), n + 1), dtype=np.int16)
    for i in range(n):
        out[:, i] = idx % q
        idx //= q
    out[:, n] = 1
    return out


def von_mangoldt(f: FqPoly) -> int:
    """d(P) if f = P^k for an irreducible P, else 0."""
    if not f.is_monic or f.degree < 1:
        raise ValueError("von Mangoldt is defined for monic f of degree >= 1")
    fac = factor(f)
    if len(fac.factors) == 1:
        return fac.factors[0][0].degree
    return 0


# ---------------------------------------------------------------------------
# factorization (squarefree / distinct-degree / equal-degree)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Factorization:
    unit: int
    factors: tuple[tuple[FqPoly, int], ...]  # (monic irreducible, multiplicity)

    def product(self, field: Fq) -> FqPoly:
        out = FqPoly.constant(field, self.unit)
        for p, m in self.factors:
            for _ in range(m):
                out = out * p
        return out


def factor(f: FqPoly, seed: int = FACTOR_SEED) -> Factorization:
    """Complete factorization into monic irreducibles.

    Deterministic: the equal-degree stage draws its splitting elements
    from a counter-based RNG keyed by (seed, polynomial digits).
    """
    if f.is_zero:
        raise ValueError("cannot factor the zero polynomial")
    unit = f.coeffs[-1]
    found = _factor_monic(f.monic(), seed)
    factors = tuple(sorted(found.items(), key=lambda kv: (kv[0].degree, kv[0].coeffs)))
    return Factorization(unit=unit, factors=factors)


def _factor_monic(f: FqPoly, seed: int) -> dict[FqPoly, int]:
    """Monic factorization with multiplicities (any characteristic p > 2)."""
    F = f.field
    out: dict[FqPoly, int] = {}
    while f.degree > 0:
        der = f.derivative()
        if der.is_zero:
            # f = h(t)^p where h's coefficients are p-th roots of f's
            root_pow = F.q // F.p  # x -> x^(q/p) inverts Frobenius
            coeffs = [F.pow(f.coeffs[i], root_pow) for i in range(0, len(f.coeffs), F.p)]
            h = FqPoly(F, _trim(coeffs))
            for p_, m_ in _factor_monic(h, seed).items():
                out[p_] = out.get(p_, 0) + m_ * F.p
            return out
        sqfree = f // f.gcd(der)  # distinct primes with multiplicity not == 0 mod p
        for p_ in _factor_squarefree(sqfree, seed):
            k = 0
            while True:
                quo, rem = divmod(f, p_)
                if not rem.is_zero:
                    break
                f = quo
                k += 1
            out[p_] = out.get(p_, 0) + k
    return out


def _factor_squarefree(f: FqPoly, seed: int) -> list[FqPoly]:
    """Distinct-degree then Cantor-Zassenhaus on a squarefree monic f."""
    F = f.field
    out: list[FqPoly] = []
    x = FqPoly.x(F)
    h = x % f
    rem = f
    d = 0
    while rem.degree > 0:
        d += 1
        if 2 * d > rem.degree:
            out.append(rem)
            break
        h = h.pow_mod(F.q, rem)
        g = rem.gcd(h - (x % rem))
        if g.degree > 0:
            out.extend(_equal_degree(g, d, seed))
            rem = rem // g
            h = h % rem
    return out


def _poly_counter(f: FqPoly) -> int:
    acc = 0
    for c in reversed(f.coeffs):
        acc = (acc * f.field.q + c) & 0x7FFFFFFFFFFFFFFF
    return acc


def _equal_degree(f: FqPoly, d: int, seed: int) -> list[FqPoly]:
    """Split a product of distinct degree-d irreducibles (odd q)."""
    F = f.field
    if f.degree == d:
        return [f]
    rng = np.random.Generator(np.random.Philox(key=seed, counter=_poly_counter(f)))
    exponent = (F.q ** d - 1) // 2
    while True:
        coeffs = [int(c) for c in rng.integers(0, F.q, size=f.degree)]
        a = FqPoly.from_coeffs(F, coeffs)
        if a.degree < 1:
            continue
        g = f.gcd(a)
        if not (0 < g.degree < f.degree):
            b = a.pow_mod(exponent, f) - FqPoly.one(F)
            g = f.gcd(b)
            if not (0 < g.degree < f.degree):
                continue
        left = _equal_degree(g, d, seed)
        right = _equal_degree(f // g, d, seed)
        return sorted(left + right, key=lambda p: p.coeffs)


# ---------------------------------------------------------------------------
# canonical extension fields with dense tables (vectorized kernels)
# ---------------------------------------------------------------------------


class ExtTables:
    """F_{q^d} for prime q, with log/exp tables for vectorized kernels.

    Elements are indices encoding base-q digit vectors in the power basis
    of the canonical (least-in-counter-order) irreducible modulus of
    degree d.  Used for point counting and residue-character evaluation.
    """

    def __init__(self, field: Fq, d: int):
        if field.e != 1:
            raise NotImplementedError("vectorized extension tables need a prime base field")
        self.base = field
        self.d = d
        self.q = field.q
        self.size = field.q ** d
        self.modulus = _canonical_modulus(field, d)
        p = field.q
        self.idx2vec = np.empty((self.size, d), dtype=np.int16)
        tmp = np.arange(self.size, dtype=np.int64)
        for i in range(d):
            self.idx2vec[:, i] = tmp % p
            tmp //= p
        self.powvec = p ** np.arange(d, dtype=np.int64)
        self.red_rows = _power_reduction_rows_fq(field, self.modulus, 2 * d - 1)
        self._build_logexp()

    # index arithmetic ----------------------------------------------------

    def mul_idx(self, a, b):
        """Vectorized field multiply on element indices."""
        a, b = np.broadcast_arrays(np.asarray(a), np.asarray(b))
        out = np.zeros(a.shape, dtype=np.int64)
        nz = (a != 0) & (b != 0)
        s = self.log[a[nz]] + self.log[b[nz]]
        s %= self.size - 1
        out[nz] = self.exp[s]
        return out

    def add_idx(self, a, b):
        va = self.idx2vec[np.asarray(a)]
        vb = self.idx2vec[np.asarray(b)]
        return ((va + vb) % self.q) @ self.powvec

    def pow_idx_scalar(self, a: int, k: int) -> int:
        if a == 0:
            return 0
        return int(self.exp[(int(self.log[a]) * k) % (self.size - 1)])

    def _mul_scalar(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        va = self.idx2vec[a]
        vb = self.idx2vec[b]
        conv = np.zeros(2 * self.d - 1, dtype=np.int64)
        for i in range(self.d):
            if va[i]:
                conv[i : i + self.d] += int(va[i]) * vb
        conv %= self.q
        return int((conv @ self.red_rows % self.q) @ self.powvec)

    def _mul_matrix(self, b: int) -> np.ndarray:
        """Digit-vector matrix of multiplication by the fixed element b."""
        d, q = self.d, self.q
        M = np.empty((d, d), dtype=np.int64)
        for j in range(d):
            M[j] = self.idx2vec[self._mul_scalar(b, q ** j)]  # t^j has index q^j
        return M

    def _build_logexp(self):
        n = self.size
        order = n - 1
        rs = prime_factors_int(order)
        gen = None
        for cand in range(2, n):
            if all(self._pow_scalar(cand, order // r) != 1 for r in rs):
                gen = cand
                break
        if gen is None:
            raise RuntimeError("no generator found (impossible for a field)")
        # exp table by doubling: powers g^k .. g^(2k-1) = g^k * (g^0 .. g^(k-1))
        q, d = self.q, self.d
        exp_digits = np.zeros((order, d), dtype=np.int64)
        exp_digits[0] = self.idx2vec[1]
        k = 1
        cur_pow = gen  # g^k as an element index
        while k < order:
            m = min(k, order - k)
            M = self._mul_matrix(cur_pow)
            exp_digits[k : k + m] = (exp_digits[:m] @ M) % q
            if 2 * k < order:
                cur_pow = self._mul_scalar(cur_pow, cur_pow)
            k += m
        self.exp = exp_digits @ self.powvec
        self.log = np.zeros(n, dtype=np.int64)
        self.log[self.exp] = np.arange(order, dtype=np.int64)
        # quadratic character: even log <-> square (odd order group /2)
        self.chi2 = np.zeros(n, dtype=np.int8)
        self.chi2[self.exp[0::2]] = 1
        self.chi2[self.exp[1::2]] = -1

    def _pow_scalar(self, a: int, k: int) -> int:
        r = 1
        while k:
            if k & 1:
                r = self._mul_scalar(r, a)
            a = self._mul_scalar(a, a)
            k >>= 1
        return r

    def embed_poly(self, f: FqPoly, x_idx: int) -> int:
        """Evaluate f (over the base field) at an element of F_{q^d}."""
        acc = 0
        for c in reversed(f.coeffs):
            acc = self._mul_scalar(acc, x_idx)
            acc = int(self.add_idx(acc, int(c)))
        return acc


def _power_reduction_rows_fq(field: Fq, mod: tuple[int, ...], count: int) -> np.ndarray:
    e = len(mod) - 1
    rows = np.zeros((count, e), dtype=np.int64)
    cur = [0] * e
    cur[0] = 1
    for j in range(count):
        rows[j] = cur
        lead = cur[e - 1]
        nxt = [0] + cur[:-1]
        if lead:
            for i in range(e):
                nxt[i] = (nxt[i] - lead * mod[i]) % field.q
        cur = [c % field.q for c in nxt[:e]]
    return rows


@functools.lru_cache(maxsize=None)
def _canonical_modulus(field: Fq, d: int) -> tuple[int, ...]:
    if d == 1:
        return (0, 1)
    for idx in range(field.q ** d):
        f = monic_from_index(field, d, idx)
        if f.is_irreducible():
            return f.coeffs
    raise RuntimeError("unreachable")


@functools.lru_cache(maxsize=None)
def ext_tables(field: Fq, d: int) -> ExtTables:
    return ExtTables(field, d)


@functools.lru_cache(maxsize=None)
def prime_root_reps(field: Fq, d: int) -> np.ndarray:
    """One root in F_{q^d} per monic irreducible of degree d (orbit reps)."""
    if d == 1:
        return np.arange(field.q, dtype=np.int64)
    T = ext_tables(field, d)
    q, size = field.q, T.size
    order = size - 1
    idx = np.arange(1, size, dtype=np.int64)
    frob = np.zeros(size, dtype=np.int64)
    frob[idx] = T.exp[(T.log[idx] * q) % order]
    skip = np.zeros(size, dtype=bool)
    skip[0] = True
    for e_sub in range(1, d):
        if d % e_sub == 0:
            sub_exp = pow(q, e_sub, order) if order > 1 else 0
            fixed = T.exp[(T.log[idx] * sub_exp) % order] == idx
            skip[idx[fixed]] = True
    reps = []
    seen = skip.copy()
    for a in range(1, size):
        if seen[a]:
            continue
        reps.append(a)
        cur = a
        while not seen[cur]:
            seen[cur] = True
            cur = int(frob[cur])
    return np.asarray(reps, dtype=np.int64)


@functools.lru_cache(maxsize=None)
def primes_with_roots(field: Fq, d: int) -> list[tuple[tuple[int, ...], int]]:
    """All monic irreducibles of degree d, each with one root in F_{q^d}.

    Enumerated by grouping degree-d elements of the canonical extension
    into Frobenius orbits; the minimal polynomial of an orbit is the
    irreducible.  Returned sorted by coefficient counter order.
    """
    if d == 1:
        lin = [(((-r) % field.q, 1), r) for r in range(field.q)]
        lin.sort(key=lambda t: t[0][:-1][::-1])
        return lin
    T = ext_tables(field, d)
    q = field.q
    order = T.size - 1
    reps = prime_root_reps(field, d)
    n = len(reps)
    # conjugate matrix (n, d) and the product of (x - conjugate), vectorized
    conj = np.empty((n, d), dtype=np.int64)
    cur = reps.copy()
    for i in range(d):
        conj[:, i] = cur
        cur = T.exp[(T.log[cur] * q) % order]
    poly = np.zeros((n, d + 1), dtype=np.int64)
    poly[:, 0] = 1
    deg = 0
    for i in range(d):
        neg_c = ((q - T.idx2vec[conj[:, i]]) % q) @ T.powvec
        nxt = np.zeros_like(poly)
        nxt[:, 1 : deg + 2] = poly[:, : deg + 1]
        for k in range(deg + 1):
            nxt[:, k] = T.add_idx(nxt[:, k], T.mul_idx(poly[:, k], neg_c))
        poly = nxt
        deg += 1
    vecs = T.idx2vec[poly]  # (n, d+1, d); all rows must be base-field constants
    assert not vecs[:, :, 1:].any(), "minimal polynomial coefficient outside base field"
    coeff_rows = vecs[:, :, 0]
    out = [(tuple(int(c) for c in coeff_rows[i]), int(reps[i])) for i in range(n)]
    out.sort(key=lambda t: t[0][:-1][::-1])
    return out


def count_irreducibles(field: Fq, d: int) -> int:
    """Necklace count (1/d) sum_{e|d} mu(d/e) q^e."""
    q = field.q
    total = 0
    for e in range(1, d + 1):
        if d % e == 0:
            total += _moebius(d // e) * q ** e
    return total // d


def _moebius(n: int) -> int:
    if n == 1:
        return 1
    m = 1
    for p in prime_factors_int(n):
        if n % (p * p) == 0:
            return 0
        m = -m
    return m
