"""Quadratic residue symbols on F_q[t].

`symbol_definition(P, f)` is the residue-field symbol (f/P) computed by
exponentiation -- the slow, authoritative path.  `chi(D, f)` evaluates
chi_D(f) = (D/f), the symbol extended multiplicatively over the
factorization of the modulus side f.  For q = 1 (mod 4) the fast path is
a Jacobi-style Euclidean reduction using reciprocity ((A/B) = (B/A) for
monic A, B); other q fall back to factoring f.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fieldpoly import Fq, FqPoly, factor


def symbol_definition(P: FqPoly, f: FqPoly) -> int:
    """(f/P) for irreducible P: +1 nonzero square mod P, -1 non-square, 0 if P | f.

    Computed as f^((|P|-1)/2) in F_q[t]/(P); rejects reducible P.
    """
    if not P.is_monic or P.degree < 1 or not P.is_irreducible():
        raise ValueError("modulus of the residue symbol must be monic irreducible")
    F = P.field
    r = f % P
    if r.is_zero:
        return 0
    e = (P.norm - 1) // 2
    s = r.pow_mod(e, P)
    if s == FqPoly.one(F):
        return 1
    if s == FqPoly.constant(F, F.neg(1)):
        return -1
    raise AssertionError("Euler criterion returned a non-unit value")


def _unit_symbol(field: Fq, c: int, deg_mod: int) -> int:
    """(c/B) for a unit c and monic B: chi2(c)^deg(B)."""
    s = field.unit_quadratic_character(c)
    if s == 0:
        raise ValueError("unit symbol of zero")
    return s if deg_mod % 2 else 1


def jacobi_symbol(A: FqPoly, B: FqPoly) -> int:
    """(A/B) for monic B via Euclidean reciprocity; requires q = 1 (mod 4)."""
    F = A.field
    if F.q % 4 != 1:
        raise ValueError("reciprocity path requires q = 1 (mod 4)")
    if not B.is_monic:
        raise ValueError("the modulus side must be monic")
    sign = 1
    while True:
        if B.degree == 0:
            return sign  # (A/1) = 1, the empty product
        A = A % B
        if A.is_zero:
            return 0
        lead = A.coeffs[-1]
        if lead != 1:
            sign *= _unit_symbol(F, lead, B.degree)
            A = A.monic()
        if A.degree == 0:
            return sign
        # (A/B) = (B/A): no sign factor since q = 1 (mod 4)
        A, B = B, A


@dataclass(frozen=True)
class QuadChar:
    """The quadratic character chi_D attached to a monic square-free D."""

    D: FqPoly

    def __post_init__(self):
        if not self.D.is_monic or not self.D.is_squarefree():
            raise ValueError("chi_D requires monic square-free D")

    @property
    def field(self) -> Fq:
        return self.D.field

    def __call__(self, f: FqPoly) -> int:
        return chi(self.D, f)


def chi(D: FqPoly, f: FqPoly) -> int:
    """chi_D(f) = (D/f) in {-1, 0, +1}.

    chi_D(f) = 0 iff gcd(D, f) != 1; completely multiplicative in f.
    Units on the modulus side contribute nothing (they carry no primes).
    """
    F = D.field
    if f.is_zero:
        raise ValueError("chi_D(0) undefined")
    if f.degree == 0:
        return 1
    g = f if f.is_monic else f.monic()
    if F.q % 4 == 1:
        return jacobi_symbol(D, g)
    return chi_by_factoring(D, g)


def chi_by_factoring(D: FqPoly, f: FqPoly) -> int:
    """Definition path: product of residue symbols over the factorization of f."""
    out = 1
    for P, m in factor(f if f.is_monic else f.monic()).factors:
        s = symbol_definition(P, D)
        if s == 0:
            return 0
        if m % 2:
            out *= s
    return out
