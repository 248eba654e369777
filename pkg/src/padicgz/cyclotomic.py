"""Exact arithmetic in the k-th cyclotomic field Q(zeta_k).

Elements are polynomials in zeta_k with Fraction coefficients, reduced
modulo the k-th cyclotomic polynomial.  Phi_k is irreducible over Q, so
every nonzero element is invertible (extended Euclid in Q[x]).  Used for
character values chi(omega) of order > 2, where no rational value exists;
everything stays exact, no floating point.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Tuple

Poly = Tuple[Fraction, ...]  # coefficients, low degree first


def _trim(p: Sequence[Fraction]) -> Poly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def _add(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                  for i in range(n)])


def _neg(a: Poly) -> Poly:
    return tuple(-c for c in a)


def _mul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        for j, cb in enumerate(b):
            out[i + j] += ca * cb
    return _trim(out)


def _divmod(a: Poly, b: Poly) -> Tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    q = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    lead = b[-1]
    while len(a) >= len(b) and _trim(a):
        if a[-1] == 0:
            a.pop()
            continue
        shift = len(a) - len(b)
        c = a[-1] / lead
        q[shift] = c
        for i, cb in enumerate(b):
            a[shift + i] -= c * cb
        a.pop()
    return _trim(q), _trim(a)


@lru_cache(maxsize=None)
def cyclotomic_poly(k: int) -> Poly:
    """Coefficients of Phi_k, low degree first (monic, integral)."""
    if k < 1:
        raise ValueError("cyclotomic index must be >= 1")
    num: Poly = tuple([Fraction(-1)] + [Fraction(0)] * (k - 1) + [Fraction(1)])
    for d in range(1, k):
        if k % d == 0:
            num, rem = _divmod(num, cyclotomic_poly(d))
            assert not rem
    return num


class CycloNumber:
    """An element of Q(zeta_k), stored reduced mod Phi_k."""

    __slots__ = ("k", "coeffs")

    def __init__(self, k: int, coeffs: Sequence):
        phi = cyclotomic_poly(k)
        deg = len(phi) - 1
        poly = _trim([Fraction(c) for c in coeffs])
        if len(poly) > deg:
            _, poly = _divmod(poly, phi)
        self.k = k
        self.coeffs: Poly = tuple(poly) + (Fraction(0),) * (deg - len(poly))

    @classmethod
    def zeta(cls, k: int, j: int = 1) -> "CycloNumber":
        j %= k
        return cls(k, [Fraction(0)] * j + [Fraction(1)])

    @classmethod
    def from_rational(cls, k: int, x) -> "CycloNumber":
        return cls(k, [Fraction(x)])

    def _coerce(self, other) -> "CycloNumber":
        if isinstance(other, CycloNumber):
            if other.k != self.k:
                raise ValueError(
                    f"mixing cyclotomic fields k={self.k} and k={other.k}")
            return other
        return CycloNumber.from_rational(self.k, other)

    def __add__(self, other):
        o = self._coerce(other)
        return CycloNumber(self.k, _add(self.coeffs, o.coeffs))

    __radd__ = __add__

    def __neg__(self):
        return CycloNumber(self.k, _neg(self.coeffs))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        return CycloNumber(self.k, _mul(self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def inverse(self) -> "CycloNumber":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in cyclotomic field")
        # extended Euclid: u*self + v*Phi = gcd = constant
        phi = cyclotomic_poly(self.k)
        r0, r1 = _trim(self.coeffs), phi
        u0, u1 = (Fraction(1),), ()
        while r1:
            q, r = _divmod(r0, r1)
            r0, r1 = r1, r
            u0, u1 = u1, _add(u0, _neg(_mul(q, u1)))
        assert len(r0) == 1  # Phi_k irreducible over Q
        inv_g = (Fraction(1) / r0[0],)
        return CycloNumber(self.k, _mul(u0, inv_g))

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = CycloNumber.from_rational(self.k, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def as_rational(self):
        """The Fraction value when the element is rational, else None."""
        if all(c == 0 for c in self.coeffs[1:]):
            return self.coeffs[0] if self.coeffs else Fraction(0)
        return None

    def is_root_of_unity(self) -> bool:
        return (self ** self.k) == 1 or (self ** (2 * self.k)) == 1

    def __eq__(self, other):
        if isinstance(other, CycloNumber):
            return self.k == other.k and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.as_rational() == Fraction(other)
        return NotImplemented

    def __hash__(self):
        r = self.as_rational()
        return hash(r) if r is not None else hash((self.k, self.coeffs))

    def __repr__(self):
        if self.is_zero():
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*z{self.k}")
            else:
                terms.append(f"{c}*z{self.k}^{i}")
        return " + ".join(terms)
