"""Small finite abelian groups: a concrete product-of-cyclics class, and the
decomposition of an abstract (elements, mul) presentation into one.

Primary decomposition: per prime q dividing the order, a basis of the Sylow
q-subgroup is built greedily (max quotient order first), keeping the spanned
subgroup pure so the adjustment g -> g * b^-1 always lands on a direct
complement.  Everything is deterministic: candidates are scanned in sorted
element order.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterable, Sequence, Tuple

Element = Tuple[int, ...]


class FiniteAbelianGroup:
    """Z/d_1 x ... x Z/d_k; elements are exponent tuples."""

    def __init__(self, orders: Sequence[int]):
        orders = tuple(int(d) for d in orders)
        for d in orders:
            if d < 1:
                raise ValueError(f"component order {d} must be >= 1")
        self.orders = orders
        self.size = math.prod(orders) if orders else 1
        self.elements: Tuple[Element, ...] = tuple(
            itertools.product(*[range(d) for d in orders]))
        self.index = {g: i for i, g in enumerate(self.elements)}
        self.identity: Element = tuple(0 for _ in orders)

    @classmethod
    def cyclic(cls, n: int):
        return cls((n,))

    def mul(self, a: Element, b: Element) -> Element:
        return tuple((x + y) % d for x, y, d in zip(a, b, self.orders))

    def inv(self, a: Element) -> Element:
        return tuple((-x) % d for x, d in zip(a, self.orders))

    def power(self, a: Element, k: int) -> Element:
        return tuple((x * k) % d for x, d in zip(a, self.orders))

    def element_order(self, a: Element) -> int:
        n = 1
        for x, d in zip(a, self.orders):
            n = math.lcm(n, d // math.gcd(d, x))
        return n

    def subgroup(self, gens: Iterable[Element]) -> Tuple[Element, ...]:
        seen = {self.identity}
        frontier = [self.identity]
        gens = [tuple(g) for g in gens]
        for g in gens:
            if g not in self.index:
                raise ValueError(f"{g} is not an element of the group")
        while frontier:
            a = frontier.pop()
            for g in gens:
                b = self.mul(a, g)
                if b not in seen:
                    seen.add(b)
                    frontier.append(b)
        return tuple(sorted(seen))

    def is_subgroup(self, elems: Iterable[Element]) -> bool:
        s = set(elems)
        if self.identity not in s:
            return False
        return all(self.mul(a, b) in s for a in s for b in s)

    def __eq__(self, other):
        return (type(self) is type(other) and self.orders == other.orders)

    def __hash__(self):
        return hash((type(self).__name__, self.orders))

    def __repr__(self):
        return " x ".join(f"Z/{d}" for d in self.orders) or "Z/1"


def _factor(n: int):
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _power(mul, identity, x, n: int):
    out = identity
    base = x
    while n:
        if n & 1:
            out = mul(out, base)
        base = mul(base, base)
        n >>= 1
    return out


def _sylow_basis(elems, mul, identity, q: int):
    """Basis of an abelian q-group given as an element list."""
    basis = []            # generators
    orders = []
    coords = {identity: ()}
    size = len(elems)
    while len(coords) < size:
        # element with maximal order in the quotient by the current span
        best, best_k = None, 0
        for g in elems:
            if g in coords:
                continue
            k, x = 1, g
            while x not in coords:
                x = _power(mul, identity, x, q)
                k *= q
            if k > best_k:
                best, best_k = g, k
        g, k = best, best_k
        # purity: g^k lies in the span and is a k-th power there
        gk = _power(mul, identity, g, k)
        co = coords[gk]
        adj = identity
        for b, d, e in zip(basis, orders, co):
            if e % k != 0:
                raise AssertionError("span lost purity; decomposition bug")
            adj = mul(adj, _power(mul, identity, b, (d - e // k) % d))
        g = mul(g, adj)
        # extend the coordinate table
        new_coords = dict(coords)
        ge = identity
        for e in range(1, k):
            ge = mul(ge, g)
            for el, c in coords.items():
                new_coords[mul(el, ge)] = c + (e,)
        for el in list(new_coords):
            if len(new_coords[el]) < len(basis) + 1:
                new_coords[el] = new_coords[el] + (0,)
        coords = new_coords
        basis.append(g)
        orders.append(k)
    return basis, orders, coords


def decompose_abelian(elems, mul, identity):
    """(gens, orders, coords) with coords a dict element -> exponent tuple.

    Orders are prime powers, grouped by prime in increasing prime order; the
    decomposition is deterministic for a fixed element ordering.
    """
    n = len(elems)
    if n == 1:
        return [], [], {identity: ()}
    fact = _factor(n)
    gens, orders = [], []
    sylow_data = []
    for q in sorted(fact):
        qa = q ** fact[q]
        m = n // qa
        # projection x -> x^(m * (m^-1 mod qa)) onto the Sylow q-part
        exp = m * pow(m, -1, qa)
        sub = sorted({_power(mul, identity, x, exp) for x in elems})
        b, o, co = _sylow_basis(sub, mul, identity, q)
        sylow_data.append((q, b, o, co, exp))
        gens.extend(b)
        orders.extend(o)
    # assemble full coordinates via the projections
    coords = {}
    for x in elems:
        c = ()
        for q, b, o, co, exp in sylow_data:
            xq = _power(mul, identity, x, exp)
            c = c + co[xq]
        coords[x] = c
    # sanity: coordinates must be a bijection
    if len(set(coords.values())) != n or math.prod(orders, start=1) != n:
        raise AssertionError("abelian decomposition failed to cover the group")
    return gens, orders, coords
