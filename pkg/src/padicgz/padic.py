"""Bounded-precision p-adic scalars, quadratic extensions and torus elements.

A scalar is p^v * u with the unit residue u carried mod p^N and an explicit
relative precision (number of meaningful unit digits).  All arithmetic is
exact integer arithmetic on residues; precision only shrinks, it never
silently grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (ContextMismatch, NotSquareError, PrecisionError,
                     UnsupportedError)

INF = math.inf


def _ival(n: int, p: int, cap: int) -> int:
    """Exact valuation of the integer n, capped at cap; n == 0 gives cap."""
    if n == 0:
        return cap
    v = 0
    while n % p == 0 and v < cap:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class PrimeContext:
    """Working prime p and absolute precision exponent N (units mod p^N)."""

    p: int
    N: int

    def __post_init__(self):
        if self.p < 2 or any(self.p % d == 0 for d in range(2, int(self.p ** 0.5) + 1)):
            raise ValueError(f"p={self.p} is not prime")
        if not 1 <= self.N <= 64:
            raise ValueError("precision exponent must be in 1..64")

    @property
    def modulus(self) -> int:
        return self.p ** self.N

    # residue cardinality of the base field
    @property
    def q(self) -> int:
        return self.p

    def zero(self) -> "PadicScalar":
        return PadicScalar(self, 0, 0, self.N, _zero=True)

    def one(self) -> "PadicScalar":
        return PadicScalar(self, 0, 1, self.N)

    def from_int(self, n: int) -> "PadicScalar":
        if n == 0:
            return self.zero()
        v = _ival(n, self.p, 10 ** 9)
        return PadicScalar(self, v, (n // self.p ** v) % self.modulus, self.N)

    def from_rational(self, num: int, den: int = 1) -> "PadicScalar":
        if den == 0:
            raise ZeroDivisionError("denominator is zero")
        if isinstance(num, Fraction):
            num, den = num.numerator, den * num.denominator
        if num == 0:
            return self.zero()
        vn = _ival(num, self.p, 10 ** 9)
        vd = _ival(den, self.p, 10 ** 9)
        un = (num // self.p ** vn) % self.modulus
        ud = (den // self.p ** vd) % self.modulus
        return PadicScalar(self, vn - vd, un * pow(ud, -1, self.modulus) % self.modulus,
                           self.N)

    def teichmuller(self, a: int) -> "PadicScalar":
        """Teichmuller lift of the unit residue a: the x^p-iteration fixpoint."""
        if a % self.p == 0:
            raise ValueError("Teichmuller lift needs a unit residue")
        return self.from_int(self.teich_residue(a))

    def teich_residue(self, a: int) -> int:
        x = a % self.modulus
        for _ in range(self.N + 2):
            y = pow(x, self.p, self.modulus)
            if y == x:
                break
            x = y
        return x

    def teich_digit_center(self, c: int, n: int) -> int:
        """Canonical sample residue mod p^N of the depth-n disc around c.

        Digits are replaced by their Teichmuller lifts level by level; the
        result is refinement-stable (the 0-extension child keeps it).
        """
        if n > self.N:
            raise PrecisionError(f"depth {n} exceeds context precision {self.N}")
        x = 0
        cc = c % self.p ** n
        for i in range(n):
            d = cc % self.p
            t = 0 if d == 0 else self.teich_residue(d)
            x = (x + t * self.p ** i) % self.modulus
            cc = ((cc - t) % self.p ** (n - i)) // self.p
        return x

    def is_square(self, x: "PadicScalar") -> bool:
        if x.is_zero:
            return True
        if x.v % 2 != 0:
            return False
        if self.p == 2:
            if x.prec < 3:
                raise PrecisionError("squareness mod 2 needs 3 unit digits")
            return x.u % 8 == 1
        return pow(x.u, (self.p - 1) // 2, self.p) == 1


class PadicScalar:
    """p^v * u with u a unit mod p^N; prec = meaningful unit digits (<= N)."""

    __slots__ = ("ctx", "v", "u", "prec", "is_zero")
    __hash__ = None  # equality is congruence at shared precision

    def __init__(self, ctx: PrimeContext, v: int, u: int, prec: int, _zero=False):
        self.ctx = ctx
        self.is_zero = _zero
        if _zero:
            self.v, self.u, self.prec = 0, 0, ctx.N
            return
        u %= ctx.modulus
        if u % ctx.p == 0:
            raise ValueError("unit residue divisible by p")
        self.v, self.u, self.prec = v, u, max(0, min(prec, ctx.N))

    # -- helpers -------------------------------------------------------------
    def _chk(self, other) -> "PadicScalar":
        if isinstance(other, int):
            other = self.ctx.from_int(other)
        elif isinstance(other, Fraction):
            other = self.ctx.from_rational(other.numerator, other.denominator)
        if not isinstance(other, PadicScalar):
            return NotImplemented
        if other.ctx.p != self.ctx.p or other.ctx.N != self.ctx.N:
            raise ContextMismatch("scalars from different contexts")
        return other

    def val(self):
        """Valuation; +inf for zero."""
        return INF if self.is_zero else self.v

    @property
    def abs_prec(self):
        return INF if self.is_zero else self.v + self.prec

    def unit_residue(self, k: int) -> int:
        """u mod p^k; requires k meaningful digits."""
        if self.is_zero:
            raise ZeroDivisionError("zero has no unit residue")
        if k > self.prec:
            raise PrecisionError(f"need {k} unit digits, have {self.prec}")
        return self.u % self.ctx.p ** k

    def residue(self, k: int) -> int:
        """Value mod p^k for integral scalars (v >= 0)."""
        if self.is_zero:
            return 0
        if self.v < 0:
            raise ValueError("negative valuation has no mod-p^k residue")
        if self.v >= k:
            return 0
        if self.v + self.prec < k:
            raise PrecisionError(f"residue mod p^{k} beyond absolute precision")
        return (self.u * self.ctx.p ** self.v) % self.ctx.p ** k

    # -- arithmetic ----------------------------------------------------------
    def __mul__(self, other):
        other = self._chk(other)
        if other is NotImplemented:
            return other
        if self.is_zero or other.is_zero:
            return self.ctx.zero()
        return PadicScalar(self.ctx, self.v + other.v,
                           self.u * other.u, min(self.prec, other.prec))

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero")
        return PadicScalar(self.ctx, -self.v,
                           pow(self.u, -1, self.ctx.modulus), self.prec)

    def __truediv__(self, other):
        other = self._chk(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._chk(other)
        return other * self.inverse()

    def __pow__(self, n: int):
        if n == 0:
            return self.ctx.one()
        base = self.inverse() if n < 0 else self
        out = base
        for _ in range(abs(n) - 1):
            out = out * base
        return out

    def __neg__(self):
        if self.is_zero:
            return self
        return PadicScalar(self.ctx, self.v, -self.u, self.prec)

    def __add__(self, other):
        other = self._chk(other)
        if other is NotImplemented:
            return other
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        vmin = min(self.v, other.v)
        # absolute precision of the sum
        a = min(self.v + self.prec, other.v + other.prec)
        width = min(a - vmin, self.ctx.N)
        mod = self.ctx.modulus
        inner = (self.u * self.ctx.p ** (self.v - vmin)
                 + other.u * self.ctx.p ** (other.v - vmin)) % mod
        w = _ival(inner, self.ctx.p, width)
        if w >= width:
            # cancellation to (at least) the joint precision: exact zero here
            return self.ctx.zero()
        return PadicScalar(self.ctx, vmin + w, inner // self.ctx.p ** w, width - w)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._chk(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._chk(other)
        return other + (-self)

    def __eq__(self, other):
        try:
            other = self._chk(other)
        except (ContextMismatch, TypeError):
            return NotImplemented
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero or other.is_zero:
            return self.is_zero and other.is_zero
        if self.v != other.v:
            return False
        k = min(self.prec, other.prec)
        return (self.u - other.u) % self.ctx.p ** k == 0

    def congruent(self, other, k: int) -> bool:
        """True when self - other has valuation >= k."""
        d = self - self._chk(other)
        return d.is_zero or d.v >= k

    def __repr__(self):
        if self.is_zero:
            return "0"
        return f"{self.ctx.p}^{self.v} * {self.u} mod {self.ctx.p}^{self.prec}"


# ---------------------------------------------------------------------------
# quadratic extensions


def smallest_nonresidue(p: int) -> int:
    if p == 2:
        return 5  # unit class giving the unramified quadratic extension
    a = 2
    while pow(a, (p - 1) // 2, p) == 1:
        a += 1
    return a


@dataclass(frozen=True)
class QuadContext:
    """K = Q_p(sqrt(delta)); delta a canonical non-square integer.

    kind is "inert" (unramified) or "ramified".  For p = 2 the ramified
    discriminants supported are exactly -1, 2, -2.
    """

    ctx: PrimeContext
    delta: int
    kind: str

    @staticmethod
    def inert(ctx: PrimeContext) -> "QuadContext":
        return QuadContext(ctx, smallest_nonresidue(ctx.p), "inert")

    @staticmethod
    def ramified(ctx: PrimeContext, variant: int = 0) -> "QuadContext":
        """variant 0 -> delta = p; variant 1 -> delta = u0 * p (p odd).

        For p = 2: variant 0 -> 2, 1 -> -2, 2 -> -1.
        """
        if ctx.p == 2:
            table = {0: 2, 1: -2, 2: -1}
            if variant not in table:
                raise UnsupportedError("p=2 ramified supports only sqrt(2), sqrt(-2), sqrt(-1)")
            return QuadContext(ctx, table[variant], "ramified")
        d = ctx.p if variant == 0 else smallest_nonresidue(ctx.p) * ctx.p
        return QuadContext(ctx, d, "ramified")

    @staticmethod
    def from_delta(ctx: PrimeContext, delta: int) -> "QuadContext":
        if delta == 0:
            raise NotSquareError("delta must be nonzero")
        if ctx.is_square(ctx.from_int(delta)):
            raise NotSquareError(f"delta={delta} is a p-adic square at p={ctx.p}")
        v = _ival(delta, ctx.p, 64)
        if v % 2 == 1:
            if ctx.p == 2 and delta not in (2, -2, -1):
                # -1 has even (zero) valuation; listed for the error message
                raise UnsupportedError("p=2 ramified supports only sqrt(2), sqrt(-2), sqrt(-1)")
            return QuadContext(ctx, delta, "ramified")
        if ctx.p == 2:
            unit = delta // 2 ** v
            if unit % 8 == 5 and v == 0:
                return QuadContext(ctx, delta, "inert")
            if delta == -1:
                return QuadContext(ctx, delta, "ramified")
            raise UnsupportedError("p=2 quadratic context must be 5 mod 8 (inert) or in {-1,2,-2}")
        return QuadContext(ctx, delta, "inert")

    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def e(self) -> int:
        """Ramification index."""
        return 2 if self.kind == "ramified" else 1

    @property
    def half_basis(self) -> bool:
        """p=2 inert: integral basis {1, w}, w = (1+sqrt(delta))/2."""
        return self.p == 2 and self.kind == "inert"

    def from_pair(self, a, b) -> "QuadScalar":
        conv = lambda x: x if isinstance(x, PadicScalar) else (
            self.ctx.from_rational(x.numerator, x.denominator)
            if isinstance(x, Fraction) else self.ctx.from_int(x))
        return QuadScalar(self, conv(a), conv(b))

    def zero(self) -> "QuadScalar":
        return QuadScalar(self, self.ctx.zero(), self.ctx.zero())

    def one(self) -> "QuadScalar":
        return QuadScalar(self, self.ctx.one(), self.ctx.zero())

    def sqrt_delta(self) -> "QuadScalar":
        return QuadScalar(self, self.ctx.zero(), self.ctx.one())

    def embed(self, x) -> "QuadScalar":
        if isinstance(x, QuadScalar):
            if x.qctx != self:
                raise ContextMismatch("quad scalar from a different extension")
            return x
        return self.from_pair(x, 0)


class QuadScalar:
    """a + b*sqrt(delta) with p-adic scalar coordinates."""

    __slots__ = ("qctx", "a", "b")
    __hash__ = None

    def __init__(self, qctx: QuadContext, a: PadicScalar, b: PadicScalar):
        self.qctx, self.a, self.b = qctx, a, b

    # -- structure -----------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return self.a.is_zero and self.b.is_zero

    def conj(self) -> "QuadScalar":
        return QuadScalar(self.qctx, self.a, -self.b)

    def norm(self) -> PadicScalar:
        d = self.qctx.ctx.from_int(self.qctx.delta)
        return self.a * self.a - d * self.b * self.b

    def trace(self) -> PadicScalar:
        return self.a + self.a

    def val_K(self):
        """Valuation normalized so v_K(p) = e (= 1 inert, 2 ramified)."""
        q = self.qctx
        if self.is_zero:
            return INF
        if q.half_basis:
            # integral basis {1, w}: coordinates u = a-b, w-coeff = 2b
            u = self.a - self.b
            w = self.b + self.b
            return min(u.val(), w.val())
        if q.kind == "inert":
            return min(self.a.val(), self.b.val())
        va = 2 * self.a.val() if not self.a.is_zero else INF
        vb = (2 * self.b.val() + 1) if not self.b.is_zero else INF
        return min(va, vb)

    # -- arithmetic ----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, QuadScalar):
            if other.qctx.delta != self.qctx.delta or other.qctx.ctx.p != self.qctx.ctx.p:
                raise ContextMismatch("mixed quadratic contexts")
            return other
        if isinstance(other, (int, Fraction, PadicScalar)):
            return self.qctx.embed(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QuadScalar(self.qctx, self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadScalar(self.qctx, -self.a, -self.b)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        d = self.qctx.ctx.from_int(self.qctx.delta)
        return QuadScalar(self.qctx,
                          self.a * other.a + d * self.b * other.b,
                          self.a * other.b + self.b * other.a)

    __rmul__ = __mul__

    def inverse(self) -> "QuadScalar":
        n = self.norm()
        if n.is_zero:
            raise ZeroDivisionError("inverse of zero (or norm cancelled to zero)")
        ninv = n.inverse()
        return QuadScalar(self.qctx, self.a * ninv, -self.b * ninv)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n == 0:
            return self.qctx.one()
        base = self.inverse() if n < 0 else self
        n = abs(n)
        out = self.qctx.one()
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.a == other.a and self.b == other.b

    def congruent(self, other, k: int) -> bool:
        """Both coordinates congruent mod p^k."""
        other = self._coerce(other)
        return self.a.congruent(other.a, k) and self.b.congruent(other.b, k)

    def min_prec(self) -> int:
        ps = [c.prec for c in (self.a, self.b) if not c.is_zero]
        return min(ps) if ps else self.qctx.ctx.N

    def coords_residue(self, m: int):
        """Canonical residue pair mod p^m in the integral basis.

        Requires both coordinates integral at level m.
        """
        q = self.qctx
        if q.half_basis:
            u = self.a - self.b
            w = self.b + self.b
            return (u.residue(m), w.residue(m))
        return (self.a.residue(m), self.b.residue(m))

    def __repr__(self):
        return f"({self.a!r}) + ({self.b!r})*sqrt({self.qctx.delta})"


def val_K(x):
    """Valuation in v_K units (v_K(p) = e); accepts plain scalars too."""
    if isinstance(x, QuadScalar):
        return x.val_K()
    return x.val()


# ---------------------------------------------------------------------------
# torus elements T(F_p) = K^x / Q_p^x


class TorusElement:
    """Class of a + b*sqrt(delta) modulo scalars, normalized so the first
    nonzero coordinate is exactly 1."""

    __slots__ = ("qctx", "rep")
    __hash__ = None

    def __init__(self, qctx: QuadContext, a, b):
        x = qctx.from_pair(a, b) if not isinstance(a, QuadScalar) else a
        if x.is_zero:
            raise ValueError("torus element needs a nonzero representative")
        if not x.a.is_zero:
            self.rep = QuadScalar(qctx, qctx.ctx.one(), x.b / x.a)
        else:
            self.rep = QuadScalar(qctx, qctx.ctx.zero(), qctx.ctx.one())
        self.qctx = qctx

    @staticmethod
    def from_quad(x: QuadScalar) -> "TorusElement":
        return TorusElement(x.qctx, x, None)

    def __eq__(self, other):
        return isinstance(other, TorusElement) and self.rep == other.rep

    def __mul__(self, other):
        if not isinstance(other, TorusElement):
            return NotImplemented
        return TorusElement.from_quad(self.rep * other.rep)

    def inverse(self) -> "TorusElement":
        # t^-1 = conj(t)/N(t) ~ conj(t) mod scalars
        return TorusElement.from_quad(self.rep.conj())

    def ratio(self) -> QuadScalar:
        """t / conj(t): the norm-one value attached to the class."""
        return self.rep / self.rep.conj()

    def __repr__(self):
        return f"Torus[{self.rep!r}]"


# Finite level-m quotients --------------------------------------------------

_QUOT_CACHE: dict = {}


def _norm1_pairs(qctx: QuadContext, m: int):
    """All residue pairs (canonical integral basis) of norm-one elements mod p^m.

    Odd p: mod-p^m solutions of the norm form are exactly reductions of exact
    norm-one elements (Hensel).  p = 2: enumerate with 4 digits of slack and
    reduce, which clears the Hensel obstruction at 2.
    """
    p, delta = qctx.p, qctx.delta
    slack = 4 if p == 2 else 0
    M = m + slack
    if M > qctx.ctx.N:
        raise PrecisionError("level too deep for the context precision")
    mod, modm = p ** M, p ** m
    seen = set()
    if qctx.half_basis:
        c = (delta - 1) // 4  # w^2 = w + c
        for u in range(mod):
            for w in range(mod):
                # N(u + v*w-basis) = u^2 + u*w - c*w^2
                if (u * u + u * w - c * w * w) % mod == 1 % mod:
                    seen.add((u % modm, w % modm))
    else:
        for a in range(mod):
            aa = a * a % mod
            for b in range(mod):
                if (aa - delta * b * b) % mod == 1 % mod:
                    seen.add((a % modm, b % modm))
    return sorted(seen)


class TorusQuotient:
    """Finite level-m quotient of T(F_p), realized as norm-one residues mod p^m.

    Order (p+1)p^(m-1) for inert contexts; 2 p^m-type for ramified ones (the
    exact order is computed by enumeration and exposed as .order).
    """

    def __init__(self, qctx: QuadContext, m: int):
        if m < 1:
            raise ValueError("level must be >= 1")
        if m > qctx.ctx.N - 1:  # slack 1
            raise PrecisionError("level must leave one digit of slack below N")
        self.qctx, self.m = qctx, m
        self.mod = qctx.p ** m
        self.elements = _norm1_pairs(qctx, m)
        self.index = {e: i for i, e in enumerate(self.elements)}
        self.order = len(self.elements)
        ident = (1 % self.mod, 0)
        self.identity = ident
        from .abgroup import decompose_abelian
        self.gens, self.gen_orders, self.coords = decompose_abelian(
            self.elements, self.mul, ident)
        # Sylow-p data for completed-group coordinates
        self._sylow = None

    # residue multiplication in the canonical basis
    def mul(self, x, y):
        q = self.qctx
        if q.half_basis:
            c = (q.delta - 1) // 4
            u1, w1 = x
            u2, w2 = y
            u = (u1 * u2 + c * w1 * w2) % self.mod
            w = (u1 * w2 + w1 * u2 + w1 * w2) % self.mod
            return (u, w)
        a1, b1 = x
        a2, b2 = y
        return ((a1 * a2 + q.delta * b1 * b2) % self.mod,
                (a1 * b2 + b1 * a2) % self.mod)

    def power(self, x, n: int):
        n %= self.exponent_lcm()
        out = self.identity
        base = x
        while n:
            if n & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            n >>= 1
        return out

    def exponent_lcm(self) -> int:
        out = 1
        for d in self.gen_orders:
            out = math.lcm(out, d)
        return out

    def inverse_el(self, x):
        return self.power(x, self.exponent_lcm() - 1)

    def reduce(self, t) -> tuple:
        """Coset id of a torus element / norm-one value at this level."""
        if isinstance(t, TorusElement):
            x = t.ratio()
        elif isinstance(t, QuadScalar):
            x = t
        else:
            raise TypeError("expected TorusElement or norm-one QuadScalar")
        if x.min_prec() < self.m:
            raise PrecisionError("value carries fewer digits than the level needs")
        key = x.coords_residue(self.m)
        if key not in self.index:
            raise ValueError("residue is not norm-one at this level "
                             "(not a torus value?)")
        return key

    def sylow_p(self):
        """(gens, orders, project) for the p-part, used by completed coords."""
        if self._sylow is None:
            p = self.qctx.p
            n = self.order
            a = _ival(n, p, 64)
            mpart = n // p ** a
            if a == 0:
                proj_exp = 0
            else:
                proj_exp = mpart * pow(mpart, -1, p ** a)
            gens, orders = [], []
            for g, d in zip(self.gens, self.gen_orders):
                dv = _ival(d, p, 64)
                if dv > 0:
                    gens.append(self.power(g, d // p ** dv))
                    orders.append(p ** dv)
            self._sylow = (gens, orders, proj_exp)
        return self._sylow

    def sylow_coords(self, x) -> tuple:
        """Coordinates of the p-part of x over the Sylow cyclic generators."""
        gens, orders, proj_exp = self.sylow_p()
        xp = self.power(x, proj_exp) if proj_exp else self.identity
        if not gens:
            if xp != self.identity:
                raise ValueError("p-projection failed")
            return ()
        return self._sylow_dlog(xp)

    def _sylow_dlog(self, xp) -> tuple:
        gens, orders, _ = self.sylow_p()
        if not hasattr(self, "_sylow_table"):
            table = {self.identity: tuple(0 for _ in gens)}
            for i, (g, d) in enumerate(zip(gens, orders)):
                cur = dict(table)
                for e in range(1, d):
                    ge = self.power(g, e)
                    for el, co in table.items():
                        nco = list(co)
                        nco[i] = e
                        cur[self.mul(el, ge)] = tuple(nco)
                table = cur
            self._sylow_table = table
        if xp not in self._sylow_table:
            raise ValueError("element not in the Sylow p-part")
        return self._sylow_table[xp]

    def eps_restriction_trivial(self, sign: int) -> bool:
        """Whether the +-1 determinant character restricts trivially here.

        Inert: always (norms have even valuation).  Ramified: iff sign == +1
        or every quotient element is a unit ratio u/conj(u).
        """
        if sign == 1 or self.qctx.kind == "inert":
            return True
        return len(self._unit_ratio_subgroup()) == self.order

    def eps_value(self, x, sign: int) -> int:
        if sign == 1 or self.qctx.kind == "inert":
            return 1
        return 1 if x in self._unit_ratio_subgroup() else -1

    def _unit_ratio_subgroup(self):
        """Residues of u/conj(u) over units u: the even-valuation classes."""
        if not hasattr(self, "_unit_ratios"):
            q = self.qctx
            slack = 4 if q.p == 2 else 1
            M = min(self.m + slack, q.ctx.N)
            mod = q.p ** M
            out = set()
            for a in range(mod):
                for b in range(mod):
                    # u = a + b sqrt(delta); unit iff norm is a unit
                    n = (a * a - q.delta * b * b) % mod
                    if n % q.p == 0:
                        continue
                    ninv = pow(n, -1, mod)
                    # u / conj(u) = u^2 / N(u)
                    ra = (a * a + q.delta * b * b) * ninv % mod
                    rb = 2 * a * b * ninv % mod
                    out.add((ra % self.mod, rb % self.mod))
            self._unit_ratios = out
        return self._unit_ratios


def torus_quotient(qctx: QuadContext, m: int) -> TorusQuotient:
    key = (qctx.p, qctx.ctx.N, qctx.delta, m)
    if key not in _QUOT_CACHE:
        _QUOT_CACHE[key] = TorusQuotient(qctx, m)
    return _QUOT_CACHE[key]


def to_level(t, qctx: QuadContext, m: int) -> tuple:
    """Coset id of t in the level-m quotient (a canonical residue pair)."""
    return torus_quotient(qctx, m).reduce(t)
