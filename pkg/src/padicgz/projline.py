"""Disc tree of the projective line, boundary measures, and integrals.

Level-n cover: p^n standard-chart discs {x = c mod p^n} inside Z_p plus
p^max(n-1,0) inf-chart discs {1/x = c mod p^n} (c = 0 mod p for n >= 1)
covering the complement.  Sample points are Teichmuller-digit centers, which
are refinement-stable; the disc containing infinity always samples at
infinity, where the 1/x-substituted integrand is exactly 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DepthError, MeasureFormatError, UnsupportedError
from .padic import (INF, PadicScalar, PrimeContext, QuadScalar, val_K,
                    torus_quotient)

_MAX_COVER = 2_000_000  # resource guard: leaves enumerated explicitly


@dataclass(frozen=True)
class DiscAddress:
    chart: str  # "std" | "inf"
    depth: int
    center: int

    def __post_init__(self):
        if self.chart not in ("std", "inf"):
            raise ValueError("chart must be 'std' or 'inf'")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")


def validate_address(ctx: PrimeContext, addr: DiscAddress) -> None:
    pn = ctx.p ** addr.depth
    if not 0 <= addr.center < pn:
        raise ValueError(f"center {addr.center} out of range at depth {addr.depth}")
    if addr.chart == "inf" and addr.depth >= 1 and addr.center % ctx.p != 0:
        raise ValueError("inf-chart centers must be divisible by p")


def cover(ctx: PrimeContext, n: int):
    """All level-n disc addresses (partition of the projective line)."""
    if ctx.p ** n > _MAX_COVER:
        raise DepthError(f"cover at depth {n} exceeds the enumeration guard")
    out = [DiscAddress("std", n, c) for c in range(ctx.p ** n)]
    if n == 0:
        out.append(DiscAddress("inf", 0, 0))
    else:
        out.extend(DiscAddress("inf", n, c) for c in range(0, ctx.p ** n, ctx.p))
    return out


def children(ctx: PrimeContext, addr: DiscAddress):
    p, n, c = ctx.p, addr.depth, addr.center
    if addr.chart == "std":
        return [DiscAddress("std", n + 1, c + j * p ** n) for j in range(p)]
    if n == 0:
        return [DiscAddress("inf", 1, 0)]  # the inf root has a single child
    return [DiscAddress("inf", n + 1, c + j * p ** n) for j in range(p)]


def sample_point(ctx: PrimeContext, addr: DiscAddress):
    """(kind, scalar): kind "x" for std discs, "y" (= 1/x) for inf discs."""
    r = ctx.teich_digit_center(addr.center, addr.depth)
    kind = "x" if addr.chart == "std" else "y"
    return kind, ctx.from_int(r)


# ---------------------------------------------------------------------------
# boundary measures


class BoundaryMeasure:
    """Integer-valued finitely additive measure, stored by its leaf table.

    leaves: dict (chart, center) -> int at depth maxdepth; missing keys are 0.
    Shallower values are aggregates of leaves (finite additivity by
    construction); total == 0 is the Steinberg condition, checked by callers
    that need it.
    """

    def __init__(self, ctx: PrimeContext, maxdepth: int, leaves: dict):
        if not 0 <= maxdepth <= 12:
            raise DepthError("maxdepth must be in 0..12")
        if ctx.p ** maxdepth > _MAX_COVER:
            raise DepthError("leaf table exceeds the enumeration guard")
        self.ctx = ctx
        self.maxdepth = maxdepth
        clean = {}
        for (chart, center), mass in leaves.items():
            if not isinstance(mass, int):
                raise MeasureFormatError("integrality", f"mass {mass!r} at {(chart, center)}")
            if mass == 0:
                continue
            validate_address(ctx, DiscAddress(chart, maxdepth, center))
            clean[(chart, center)] = mass
        self.leaves = clean
        self._levels = {maxdepth: clean}
        self._carriers: dict = {}

    @property
    def total(self) -> int:
        return sum(self.leaves.values())

    def level_table(self, d: int) -> dict:
        if d > self.maxdepth:
            raise DepthError(f"depth {d} below the stored leaves ({self.maxdepth})")
        if d not in self._levels:
            p = self.ctx.p
            fine = self.level_table(d + 1)
            coarse: dict = {}
            for (chart, center), mass in fine.items():
                key = (chart, center % p ** d) if d >= 1 else (chart, 0)
                coarse[key] = coarse.get(key, 0) + mass
            coarse = {k: v for k, v in coarse.items() if v != 0}
            self._levels[d] = coarse
        return self._levels[d]

    def measure_of(self, addr: DiscAddress) -> int:
        validate_address(self.ctx, addr)
        if addr.depth > self.maxdepth:
            raise DepthError("disc finer than the stored leaf depth")
        return self.level_table(addr.depth).get((addr.chart, addr.center), 0)

    def support(self, d: int):
        return [(DiscAddress(ch, d, c), m) for (ch, c), m in
                sorted(self.level_table(d).items())]

    def carrier(self, d: int):
        """Depth-d discs whose subtree holds any nonzero leaf mass.  Wider
        than support(d): aggregate masses may cancel to zero."""
        if d > self.maxdepth:
            raise DepthError(f"depth {d} below the stored leaves ({self.maxdepth})")
        if d not in self._carriers:
            p = self.ctx.p
            keys = {(ch, c % p ** d) if d >= 1 else (ch, 0)
                    for (ch, c) in self.leaves}
            self._carriers[d] = sorted(keys)
        return [DiscAddress(ch, d, c) for ch, c in self._carriers[d]]

    # linear structure (same context and depth)
    def _chk(self, other: "BoundaryMeasure"):
        if other.ctx.p != self.ctx.p or other.maxdepth != self.maxdepth:
            raise DepthError("measures must share prime and leaf depth")

    def __add__(self, other: "BoundaryMeasure") -> "BoundaryMeasure":
        self._chk(other)
        leaves = dict(self.leaves)
        for k, v in other.leaves.items():
            leaves[k] = leaves.get(k, 0) + v
        return BoundaryMeasure(self.ctx, self.maxdepth, leaves)

    def scale(self, n: int) -> "BoundaryMeasure":
        return BoundaryMeasure(self.ctx, self.maxdepth,
                               {k: n * v for k, v in self.leaves.items()})

    def __neg__(self):
        return self.scale(-1)

    def __eq__(self, other):
        return (isinstance(other, BoundaryMeasure) and self.ctx.p == other.ctx.p
                and self.maxdepth == other.maxdepth and self.leaves == other.leaves)

    __hash__ = None


def dipole(ctx: PrimeContext, depth: int, at: int = 0, minus_at: int = 1) -> BoundaryMeasure:
    """+1 on the disc around `at`, -1 on the disc around `minus_at`."""
    pn = ctx.p ** depth
    if at % pn == minus_at % pn:
        raise ValueError("dipole poles collide at this depth")
    return BoundaryMeasure(ctx, depth, {("std", at % pn): 1, ("std", minus_at % pn): -1})


# ---------------------------------------------------------------------------
# Moebius action


class MoebiusMap:
    """Integer 2x2 matrix acting on the line by fractional-linear maps."""

    def __init__(self, a: int, b: int, c: int, d: int):
        g = math.gcd(math.gcd(abs(a), abs(b)), math.gcd(abs(c), abs(d)))
        if g == 0:
            raise ValueError("zero matrix")
        self.a, self.b, self.c, self.d = a // g, b // g, c // g, d // g
        if self.det == 0:
            raise ValueError("singular matrix")

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def adjugate(self) -> "MoebiusMap":
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def compose(self, other: "MoebiusMap") -> "MoebiusMap":
        return MoebiusMap(self.a * other.a + self.b * other.c,
                          self.a * other.b + self.b * other.d,
                          self.c * other.a + self.d * other.c,
                          self.c * other.b + self.d * other.d)

    def apply_scalar(self, x):
        """(a x + b) / (c x + d) on scalar or quadratic points."""
        return (self.a * x + self.b) / (self.c * x + self.d)

    def __repr__(self):
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


def _apply_residue_pair(m: MoebiusMap, pair):
    x, y = pair
    return (m.a * x + m.b * y, m.c * x + m.d * y)


def _pair_to_address(ctx: PrimeContext, w, depth: int) -> DiscAddress:
    """Cover address of the depth-d ball around the primitive pair w."""
    p = ctx.p
    x, y = w
    pn = p ** depth
    if y % p != 0:
        return DiscAddress("std", depth, x * pow(y, -1, pn) % pn if depth else 0)
    if x % p != 0:
        return DiscAddress("inf", depth, y * pow(x, -1, pn) % pn if depth else 0)
    raise ValueError("pair not primitive")


def act(gamma: MoebiusMap, mu: BoundaryMeasure) -> BoundaryMeasure:
    """Pushforward (gamma . mu)(D) = mu(gamma^-1 D).

    Unit determinant preserves the leaf depth; determinant valuation j loses
    j levels (recorded in the result's maxdepth).  Preimages are computed
    set-theoretically through the adjugate, which equals gamma^-1 as a map.
    """
    ctx, p = mu.ctx, mu.ctx.p
    j = 0
    det = abs(gamma.det)
    while det % p == 0:
        det //= p
        j += 1
    adj = gamma.adjugate()
    D = mu.maxdepth
    newdepth = D - j
    if D == 0:
        if j > 0:
            raise DepthError("depth-0 measure cannot absorb determinant loss")
        # resolvable only when the finite-residue block is preserved
        perm = {}
        for c in range(p):
            img = _pair_to_address(ctx, _apply_residue_pair(adj, (c, 1)), 1)
            perm[c] = img.chart
        img_inf = _pair_to_address(ctx, _apply_residue_pair(adj, (1, 0)), 1)
        if any(ch != "std" for ch in perm.values()) or img_inf.chart != "inf":
            raise DepthError("image disc not resolvable at stored depth 0")
        return BoundaryMeasure(ctx, 0, dict(mu.leaves))
    if newdepth < 1:
        raise DepthError("image disc not resolvable at stored depth "
                         f"(need depth > {j})")
    leaves = {}
    for addr in cover(ctx, newdepth):
        pair = (addr.center, 1) if addr.chart == "std" else (1, addr.center)
        w = _apply_residue_pair(adj, pair)
        t = min(_intval(w[0], p), _intval(w[1], p))
        if t >= newdepth:
            # image of this disc is a complement of a ball, not a ball
            raise DepthError("preimage not resolvable at the stored depth")
        w = (w[0] // p ** t, w[1] // p ** t)
        d2 = newdepth + j - 2 * t  # always within 1..maxdepth since t <= min(j, newdepth-1)
        mass = mu.measure_of(_pair_to_address(ctx, w, d2))
        if mass:
            leaves[(addr.chart, addr.center)] = mass
    return BoundaryMeasure(ctx, newdepth, leaves)


def _intval(n: int, p: int) -> int:
    if n == 0:
        return 10 ** 9
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# fixed pairs and the beta function


class FixedPair:
    """Fixed points (tau, conj tau) of a torus embedding.

    nonsplit: tau = a + b sqrt(delta) with b != 0 (conjugate is the Galois
    conjugate).  split: tau, taubar two distinct rational points.
    """

    def __init__(self, tau, taubar=None):
        if isinstance(tau, QuadScalar):
            if tau.b.is_zero:
                raise ValueError("nonsplit fixed point must have sqrt-part")
            self.kind = "nonsplit"
            self.tau = tau
            self.taubar = tau.conj()
            self.qctx = tau.qctx
            self.ctx = tau.qctx.ctx
        else:
            if taubar is None or tau == taubar:
                raise ValueError("split pair needs two distinct points")
            self.kind = "split"
            self.tau, self.taubar = tau, taubar
            self.qctx = None
            self.ctx = tau.ctx

    @property
    def e(self) -> int:
        return self.qctx.e if self.qctx is not None else 1

    def beta(self, x):
        """(x - taubar) / (x - tau); norm-one in the nonsplit case."""
        return (x - self.taubar) / (x - self.tau)

    def beta_y(self, y):
        """beta at x = 1/y: (1 - taubar y) / (1 - tau y)."""
        one = self.ctx.one()
        return (one - self.taubar * y) / (one - self.tau * y)


def _integrand_factor(addr_kind, s, tau1, tau2):
    """(x - tau2)/(x - tau1) at the sample point, via 1/x on the inf chart."""
    if addr_kind == "x":
        return (s - tau2) / (s - tau1)
    one = s.ctx.one()
    return (one - tau2 * s) / (one - tau1 * s)


def disc_bound(ctx: PrimeContext, addr: DiscAddress, tau1, tau2, e: int):
    """Certified lower bound, in v_K units, for v(f(x)/f(x_U) - 1) on the disc,
    f = (x - tau2)/(x - tau1).

    Exact algebra: f(x)/f(x0) - 1 = (x - x0)(tau1 - tau2) / ((x - tau1)(x0 - tau2))
    on the std chart, and with x = 1/y the displacement becomes
    (tau1 - tau2)(y - y0) / ((1 - tau1 y)(1 - tau2 y0)).  Valid only when the
    varying denominator keeps constant valuation over the disc; otherwise None
    (deepen the cover).
    """
    kind, s = sample_point(ctx, addr)
    d = addr.depth
    vdiff = val_K(tau1 - tau2)
    if kind == "x":
        m_var = val_K(s - tau1)
        m_fix = val_K(s - tau2)
        if m_var >= e * d:
            return None
        return e * d + vdiff - m_var - m_fix
    one = s.ctx.one()
    m_var = val_K(one - tau1 * s)
    m_fix = val_K(one - tau2 * s)
    if m_var >= val_K(tau1) + e * d:
        return None
    return e * d + vdiff - m_var - m_fix


class MultIntegral:
    """Result of a multiplicative integral evaluation."""

    __slots__ = ("value", "depth", "effective", "converged")

    def __init__(self, value, depth, effective, converged):
        self.value, self.depth, self.effective, self.converged = \
            value, depth, effective, converged

    def __repr__(self):
        return (f"MultIntegral(value={self.value!r}, depth={self.depth}, "
                f"effective={self.effective}, converged={self.converged})")


def _eval_depth(mu: BoundaryMeasure, d: int, tau1, tau2, e: int, one):
    """(value, certified bound) of the depth-d Riemann product, or None when a
    nonzero-mass disc samples exactly on a zero or pole of the integrand.

    The certificate ranges over carrier discs, not just nonzero aggregates:
    refining a cancelled disc still perturbs the product by its bound.
    """
    acc = one
    for addr, mass in mu.support(d):
        kind, s = sample_point(mu.ctx, addr)
        try:
            f = _integrand_factor(kind, s, tau1, tau2)
        except ZeroDivisionError:
            return None
        if f.is_zero:
            return None
        acc = acc * f ** mass
    bound = INF
    for addr in mu.carrier(d):
        b = disc_bound(mu.ctx, addr, tau1, tau2, e)
        bound = -INF if b is None else min(bound, b)
    return acc, bound


def mult_integral(mu: BoundaryMeasure, tau1, tau2, target: int | None = None) -> MultIntegral:
    """prod over cover discs of ((x_U - tau2)/(x_U - tau1))^mu(U).

    Evaluated at increasing depth until the certified sample-independence
    bound reaches `target` (p-adic digits) or the leaf depth is reached; the
    certified effective precision is reported either way.  Any two sample
    schemes agree modulo p^effective, so the value is canonical to that many
    digits.
    """
    if isinstance(tau1, QuadScalar):
        e = tau1.qctx.e
        one = tau1.qctx.one()
    else:
        e = 1
        one = mu.ctx.one()
    if (tau1 - tau2).is_zero:
        raise ValueError("fixed points must be distinct")
    best = None
    hit = False
    for d in range(0, mu.maxdepth + 1):
        got = _eval_depth(mu, d, tau1, tau2, e, one)
        if got is None:
            continue
        best = (got[0], got[1], d)
        if target is not None and got[1] >= e * target:
            hit = True
            break
    if best is None or (not hit and best[2] < mu.maxdepth):
        # the finest cover still has a nonzero-mass disc sampling on a zero
        # or pole: the product is not defined at the stored depth
        raise DepthError("integrand degenerate on a nonzero-mass leaf disc")
    value, eff, depth = best
    return MultIntegral(value, depth, _to_digits(eff, e),
                        target is not None and eff >= e * target)


def _to_digits(bound, e: int):
    if bound == INF:
        return INF
    if bound == -INF:
        return 0
    return max(0, math.floor(bound / e))


# ---------------------------------------------------------------------------
# pushforward to the torus


def pushforward_to_torus(mu: BoundaryMeasure, fp: FixedPair, m: int) -> dict:
    """Aggregate mu along beta into the level-m torus quotient.

    Fails loudly when a leaf disc is not certified to land in a single
    coset ("insufficient depth"); never splits mass heuristically.
    """
    if fp.kind != "nonsplit":
        raise UnsupportedError("nonsplit pushforward needs a nonsplit pair; "
                               "use pushforward_split")
    quot = torus_quotient(fp.qctx, m)
    e = fp.qctx.e
    out: dict = {}
    for addr, mass in mu.support(mu.maxdepth):
        b = disc_bound(mu.ctx, addr, fp.tau, fp.taubar, e)
        if b is None or b < e * m:
            raise DepthError(f"insufficient depth: disc {addr} not within a "
                             f"single level-{m} coset")
        kind, s = sample_point(mu.ctx, addr)
        val = fp.beta(s) if kind == "x" else fp.beta_y(s)
        coset = quot.reduce(val)
        out[coset] = out.get(coset, 0) + mass
    return {k: v for k, v in out.items() if v != 0}


def pushforward_split(mu: BoundaryMeasure, fp: FixedPair, unit_level: int = 0,
                      window: tuple | None = None) -> dict:
    """Split-case pushforward onto (valuation, unit residue mod p^unit_level).

    The declared valuation window is checked when given.
    """
    if fp.kind != "split":
        raise UnsupportedError("split pushforward needs a split pair")
    need = max(1, unit_level)
    out: dict = {}
    for addr, mass in mu.support(mu.maxdepth):
        b = disc_bound(mu.ctx, addr, fp.tau, fp.taubar, 1)
        if b is None or b < need:
            raise DepthError(f"insufficient depth: disc {addr} not within a "
                             "single split coset")
        kind, s = sample_point(mu.ctx, addr)
        val = fp.beta(s) if kind == "x" else fp.beta_y(s)
        if val.is_zero:
            raise DepthError("beta vanishes at a sample point")
        v = val.val()
        if window is not None and not window[0] <= v <= window[1]:
            raise ValueError(f"valuation {v} outside the declared window {window}")
        key = (v, val.unit_residue(unit_level) if unit_level else 0)
        out[key] = out.get(key, 0) + mass
    return {k: v for k, v in out.items() if v != 0}


# ---------------------------------------------------------------------------
# local-condition functions z_p


def z_nonsplit() -> dict:
    """Constant weight 1 on the compact torus."""
    return {"kind": "nonsplit", "weight": 1}


def z_split(t_val: int) -> dict:
    """z(t) = 1_O - t 1_O as valuation weights: +-1 on the window between
    0 and v(t).  Characterized by sum_n t^n z(t) = 1."""
    if t_val == 0:
        raise ValueError("translation must have nonzero valuation")
    lo, hi = (0, t_val) if t_val > 0 else (t_val, 0)
    sign = 1 if t_val > 0 else -1
    return {"kind": "split", "t_val": t_val, "window": (lo, hi), "sign": sign}


def z_split_weight(z: dict, w: int) -> int:
    lo, hi = z["window"]
    return z["sign"] if lo <= w < hi else 0


# ---------------------------------------------------------------------------
# ordinary cocycle generators (split primes)


def _require_split(fp: FixedPair):
    if fp.kind != "split":
        raise UnsupportedError("ordinary cocycle formulas are split-only")


def _vp1_indicator(y: PadicScalar):
    """((v_p + 1) * 1_{Z_p})(y)."""
    if y.is_zero:
        raise ValueError("indicator undefined at 0")
    return y.val() + 1 if y.val() >= 0 else 0


def phi1_eval(fp: FixedPair, g) -> int:
    """v_p(d + taubar c) - ((v_p+1) 1_{Z_p})((d + taubar c)/(d + tau c))."""
    _require_split(fp)
    a, b, c, d = g
    ctx = fp.ctx
    w1 = ctx.from_int(d) + fp.taubar * ctx.from_int(c)
    w2 = ctx.from_int(d) + fp.tau * ctx.from_int(c)
    if w1.is_zero or w2.is_zero:
        raise ValueError("matrix degenerate for this fixed pair")
    return w1.val() - _vp1_indicator(w1 / w2)


def phibar1_eval(fp: FixedPair, g) -> PadicScalar:
    """(d + taubar c) * ((d + tau c)/(d + taubar c))^[1_{Z_p}(ratio)]."""
    _require_split(fp)
    a, b, c, d = g
    ctx = fp.ctx
    w1 = ctx.from_int(d) + fp.taubar * ctx.from_int(c)
    w2 = ctx.from_int(d) + fp.tau * ctx.from_int(c)
    if w1.is_zero or w2.is_zero:
        raise ValueError("matrix degenerate for this fixed pair")
    ind = 1 if (w1 / w2).val() >= 0 else 0
    return w2 if ind else w1


def ord_cocycle(fp: FixedPair, t_val: int, x: PadicScalar) -> int:
    """(1 - t) phi_1 as the function F(beta(x)) - F(t^-1 beta(x)),
    F = (v_p + 1) 1_{Z_p}; depends only on v(beta) and v(t)."""
    _require_split(fp)
    b = fp.beta(x)
    if b.is_zero:
        raise ValueError("beta vanishes at x")
    w = b.val()
    return _F_of_val(w) - _F_of_val(w - t_val)


def _F_of_val(w) -> int:
    return w + 1 if w >= 0 else 0


def ord_component_check(fp: FixedPair, phi: BoundaryMeasure, t_val: int) -> dict:
    """Exact finite-sum identity behind the ordinary-component computation.

    LHS pairs phi with the cocycle evaluation (1-t) phi_1 disc by disc; RHS
    integrates the z-window against the valuation pushforward of phi.  Haar
    normalization: unit mass per valuation shell.
    """
    _require_split(fp)
    if t_val == 0:
        raise ValueError("translation must have nonzero valuation")
    nu = pushforward_split(phi, fp, unit_level=0)
    shells: dict = {}
    for (w, _), mass in nu.items():
        shells[w] = shells.get(w, 0) + mass
    lhs = 0
    for addr, mass in phi.support(phi.maxdepth):
        kind, s = sample_point(phi.ctx, addr)
        val = fp.beta(s) if kind == "x" else fp.beta_y(s)
        w = val.val()
        lhs += mass * (_F_of_val(w) - _F_of_val(w - t_val))
    z = z_split(t_val)
    lo, hi = z["window"]
    rhs = 0
    for w0 in range(lo, hi):
        tail = sum(mass for w, mass in shells.items() if w >= w0)
        rhs += z["sign"] * tail
    return {"check": "ord_component", "t_val": t_val, "lhs": lhs, "rhs": rhs,
            "passed": lhs == rhs, "shells": dict(sorted(shells.items()))}
