"""Coefficient ring Z/p^N viewed as a chain ring.

Every element is p^e * unit; the ideals form the single chain (p) > (p^2) >
... > 0, which is what makes canonical matrix normal forms over this ring
work.  Elements are plain ints in [0, M).
"""

from __future__ import annotations

from .padic import PrimeContext


class ResidueRing:
    """Z/p^N with valuation bookkeeping."""

    def __init__(self, p: int, N: int):
        self.ctx = PrimeContext(p, N)  # validates p prime, N sane
        self.p = p
        self.N = N
        self.M = p ** N

    def norm(self, x: int) -> int:
        return x % self.M

    def val(self, x: int) -> int:
        x %= self.M
        if x == 0:
            return self.N
        v = 0
        while x % self.p == 0:
            x //= self.p
            v += 1
        return v

    def unit_part(self, x: int) -> int:
        """u with x = p^val(x) * u; u = 1 for x = 0."""
        x %= self.M
        if x == 0:
            return 1
        return (x // self.p ** self.val(x)) % self.M

    def is_unit(self, x: int) -> bool:
        return x % self.p != 0

    def inv(self, x: int) -> int:
        if not self.is_unit(x):
            raise ZeroDivisionError(f"{x} is not a unit mod {self.p}^{self.N}")
        return pow(x, -1, self.M)

    def __eq__(self, other):
        return (isinstance(other, ResidueRing) and self.p == other.p
                and self.N == other.N)

    def __hash__(self):
        return hash((self.p, self.N))

    def __repr__(self):
        return f"Z/{self.p}^{self.N}"
