"""Group-ring measures on a finite abelian Galois quotient.

Measures live in R[G] with R = Z/p^N.  The objects of interest are the
twisted augmentation ideals

    I_chi = { mu : sum_g chi(g) mu(g) = 0 }

and their powers; the class of a measure in I^r / I^(r+1) is computed as a
canonical residual against a Howell basis of I^(r+1), so equality of classes
is decidable and stable under change of generating sets.

Group elements are exponent tuples for a fixed decomposition
G = Z/d_1 x ... x Z/d_k; characters take unit values in R, with component
roots restricted to the tame torsion (order dividing p - 1, or +-1 at p = 2)
so that values do not depend on the working length N in incompatible ways.
"""

from __future__ import annotations

import itertools
import math
from typing import Dict, Iterable, Sequence, Tuple

from .abgroup import Element, FiniteAbelianGroup
from .errors import MeasureFormatError, ModelError
from .howell import howell_form, member, reduce_vector
from .rings import ResidueRing


class FiniteGaloisModel(FiniteAbelianGroup):
    """G = Z/d_1 x ... x Z/d_k; elements are exponent tuples.

    Same algebra as FiniteAbelianGroup, plus the arithmetic furniture: a
    distinguished subgroup H (the away-from-S part) and per-prime rec tables
    mapping local torus cosets into G.  Errors are ModelError so that
    measure-level callers see a single exception family.
    """

    def __init__(self, orders: Sequence[int], H_gens=None, rec=None):
        try:
            super().__init__(orders)
        except ValueError as e:
            raise ModelError(str(e)) from None
        self.H = self.subgroup([tuple(h) for h in (H_gens or [])])
        self.rec: Dict[str, Dict[tuple, Element]] = {}
        for label, table in (rec or {}).items():
            clean = {}
            for key, g in table.items():
                g = tuple(g)
                if g not in self.index:
                    raise ModelError(
                        f"rec image {g} at {label!r} is not in the group")
                clean[tuple(key)] = g
            self.rec[str(label)] = clean

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGaloisModel":
        return cls((n,))

    def subgroup(self, gens: Iterable[Element]) -> Tuple[Element, ...]:
        try:
            return super().subgroup(gens)
        except ValueError as e:
            raise ModelError(str(e)) from None

    def validate_rec(self, label: str, local_mul) -> None:
        """Check the rec table at `label` is a homomorphism for `local_mul`."""
        table = self.rec.get(label)
        if table is None:
            raise ModelError(f"no rec table for {label!r}")
        keys = list(table)
        for a in keys:
            for b in keys:
                ab = local_mul(a, b)
                if ab not in table:
                    raise ModelError(
                        f"rec domain at {label!r} is not closed: missing {ab}")
                if table[ab] != self.mul(table[a], table[b]):
                    raise ModelError(
                        f"rec at {label!r} is not a homomorphism at "
                        f"({a}, {b})")

    def generation_ok(self) -> bool:
        """G = H * (product of all rec images)?"""
        gens = list(self.H)
        for table in self.rec.values():
            gens.extend(table.values())
        return len(self.subgroup(gens)) == self.size

    def __eq__(self, other):
        return (isinstance(other, FiniteGaloisModel)
                and self.orders == other.orders)

    def __hash__(self):
        return hash(self.orders)


def root_of_unity(R: ResidueRing, m: int) -> int:
    """A unit of exact multiplicative order m in Z/p^N (tame orders only)."""
    if m == 1:
        return 1
    p = R.p
    if p == 2:
        if m == 2 and R.N >= 2:
            return R.M - 1
        raise ModelError(f"no tame root of order {m} at p = 2 (N = {R.N})")
    if (p - 1) % m != 0:
        raise ModelError(f"order {m} does not divide p - 1 = {p - 1}")
    # smallest primitive root mod p, then its Teichmuller lift mod p^N
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1
               for q in _prime_divisors(p - 1)):
            break
    omega = R.ctx.teich_residue(g)
    return pow(omega, (p - 1) // m, R.M)


def _prime_divisors(n: int):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


class Character:
    """Multiplicative character G -> units of Z/p^N, given by component roots."""

    def __init__(self, model: FiniteGaloisModel, ring: ResidueRing,
                 roots: Sequence[int]):
        roots = tuple(x % ring.M for x in roots)
        if len(roots) != len(model.orders):
            raise ModelError("one root per cyclic component is required")
        for z, d in zip(roots, model.orders):
            if not ring.is_unit(z):
                raise ModelError(f"character value {z} is not a unit")
            if pow(z, d, ring.M) != 1:
                raise ModelError(
                    f"root {z} is not {d}-torsion mod {ring.p}^{ring.N}")
        self.model = model
        self.ring = ring
        self.roots = roots

    @classmethod
    def trivial(cls, model: FiniteGaloisModel, ring: ResidueRing) -> "Character":
        return cls(model, ring, tuple(1 for _ in model.orders))

    def __call__(self, g: Element) -> int:
        v = 1
        for z, x in zip(self.roots, g):
            v = (v * pow(z, x, self.ring.M)) % self.ring.M
        return v

    def inv_value(self, g: Element) -> int:
        return self(self.model.inv(g))

    def conj(self) -> "Character":
        return Character(self.model, self.ring,
                         tuple(pow(z, -1, self.ring.M) for z in self.roots))

    def is_trivial(self) -> bool:
        return all(z == 1 for z in self.roots)

    def __eq__(self, other):
        return (isinstance(other, Character) and self.model == other.model
                and self.ring == other.ring and self.roots == other.roots)

    def __hash__(self):
        return hash((self.model.orders, self.ring.p, self.ring.N, self.roots))


def characters(model: FiniteGaloisModel, ring: ResidueRing):
    """All characters with tame values, in a fixed deterministic order."""
    per_component = []
    for d in model.orders:
        t = math.gcd(d, 2 if ring.p == 2 else ring.p - 1)
        if ring.p == 2 and ring.N < 2:
            t = 1
        z = root_of_unity(ring, t)
        per_component.append([pow(z, j, ring.M) for j in range(t)])
    return [Character(model, ring, roots)
            for roots in itertools.product(*per_component)]


def character_from_exponents(model: FiniteGaloisModel, ring: ResidueRing,
                             exps: Sequence[int]) -> Character:
    """Character whose i-th component root is z_i^exps[i], z_i the canonical
    tame root for that component.  Exponents are ring-independent, so the same
    tuple names the same character at every working precision."""
    if len(exps) != len(model.orders):
        raise ModelError(
            f"expected {len(model.orders)} exponents, got {len(exps)}")
    roots = []
    for d, j in zip(model.orders, exps):
        t = math.gcd(d, 2 if ring.p == 2 else ring.p - 1)
        if ring.p == 2 and ring.N < 2:
            t = 1
        z = root_of_unity(ring, t)
        roots.append(pow(z, j % t, ring.M))
    return Character(model, ring, roots)


class IwasawaMeasure:
    """Element of R[G]: finitely many integer masses mod p^N on group elements."""

    def __init__(self, model: FiniteGaloisModel, ring: ResidueRing,
                 coeffs: Dict[Element, int] | None = None):
        self.model = model
        self.ring = ring
        clean: Dict[Element, int] = {}
        for g, c in (coeffs or {}).items():
            g = tuple(g)
            if g not in model.index:
                raise ModelError(f"{g} is not an element of the group")
            if not isinstance(c, int):
                raise MeasureFormatError(
                    "integrality", f"mass {c!r} at {g} is not an integer")
            c %= ring.M
            if c:
                clean[g] = c
        self.coeffs = clean

    @classmethod
    def delta(cls, model, ring, g: Element) -> "IwasawaMeasure":
        return cls(model, ring, {tuple(g): 1})

    @classmethod
    def zero(cls, model, ring) -> "IwasawaMeasure":
        return cls(model, ring, {})

    @classmethod
    def from_vector(cls, model, ring, vec: Sequence[int]) -> "IwasawaMeasure":
        return cls(model, ring,
                   {g: int(c) for g, c in zip(model.elements, vec)})

    def _check(self, other: "IwasawaMeasure"):
        if self.model != other.model or self.ring != other.ring:
            raise ModelError("measures live on different models")

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for g, c in other.coeffs.items():
            out[g] = (out.get(g, 0) + c) % self.ring.M
        return IwasawaMeasure(self.model, self.ring, out)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k: int) -> "IwasawaMeasure":
        return IwasawaMeasure(
            self.model, self.ring,
            {g: (c * k) % self.ring.M for g, c in self.coeffs.items()})

    def translate(self, h: Element) -> "IwasawaMeasure":
        """delta_h * self: shift every mass by h."""
        return IwasawaMeasure(
            self.model, self.ring,
            {self.model.mul(h, g): c for g, c in self.coeffs.items()})

    def star(self, other: "IwasawaMeasure") -> "IwasawaMeasure":
        """Convolution product in R[G]."""
        self._check(other)
        out: Dict[Element, int] = {}
        for a, ca in self.coeffs.items():
            for b, cb in other.coeffs.items():
                g = self.model.mul(a, b)
                out[g] = (out.get(g, 0) + ca * cb) % self.ring.M
        return IwasawaMeasure(self.model, self.ring, out)

    def augmentation(self) -> int:
        return sum(self.coeffs.values()) % self.ring.M

    def eps_chi(self, chi: Character) -> int:
        """Twisted augmentation sum_g chi(g) mu(g)."""
        return sum(chi(g) * c for g, c in self.coeffs.items()) % self.ring.M

    def pair(self, f) -> int:
        """<mu, f> = sum_g mu(g) f(g); f is a dict or a callable on elements."""
        get = f.get if isinstance(f, dict) else None
        total = 0
        for g, c in self.coeffs.items():
            total += c * (get(g, 0) if get else f(g))
        return total % self.ring.M

    def vector(self) -> Tuple[int, ...]:
        return tuple(self.coeffs.get(g, 0) for g in self.model.elements)

    def support(self):
        return tuple(sorted(self.coeffs))

    def __eq__(self, other):
        return (isinstance(other, IwasawaMeasure) and self.model == other.model
                and self.ring == other.ring and self.coeffs == other.coeffs)

    def __repr__(self):
        terms = [f"{c}*d{g}" for g, c in sorted(self.coeffs.items())]
        return " + ".join(terms) if terms else "0"


def v_g(model: FiniteGaloisModel, chi: Character, g: Element) -> IwasawaMeasure:
    """chi(g)^-1 delta_g - delta_1, the standard generator of I_chi."""
    m = IwasawaMeasure.delta(model, chi.ring, g).scale(chi.inv_value(g))
    return m - IwasawaMeasure.delta(model, chi.ring, model.identity)


_IDEAL_CACHE: Dict[tuple, tuple] = {}


def ideal_power_basis(model: FiniteGaloisModel, chi: Character,
                      r: int) -> Tuple[Tuple[int, ...], ...]:
    """Howell basis of I_chi^r inside R[G] (r = 0 gives the whole ring)."""
    if r < 0:
        raise ModelError("ideal power must be >= 0")
    R = chi.ring
    key = (R.p, R.N, model.orders, chi.roots, r)
    if key in _IDEAL_CACHE:
        return _IDEAL_CACHE[key]
    if r == 0:
        n = model.size
        basis = tuple(tuple(1 if i == j else 0 for j in range(n))
                      for i in range(n))
    else:
        gens = [v_g(model, chi, g) for g in model.elements
                if g != model.identity]
        if r == 1:
            basis = howell_form(R, [m.vector() for m in gens])
        else:
            prev = ideal_power_basis(model, chi, r - 1)
            rows = []
            for row in prev:
                m = IwasawaMeasure.from_vector(model, R, row)
                for vg in gens:
                    rows.append(m.star(vg).vector())
            basis = howell_form(R, rows)
    _IDEAL_CACHE[key] = basis
    return basis


def graded_class(model: FiniteGaloisModel, chi: Character,
                 mu: IwasawaMeasure, r: int) -> Tuple[int, ...]:
    """Canonical representative of mu in I_chi^r / I_chi^(r+1).

    Raises ModelError when mu is not in I_chi^r, so callers cannot silently
    compare classes across different filtration steps.
    """
    R = chi.ring
    if not member(R, ideal_power_basis(model, chi, r), mu.vector()):
        raise ModelError(
            f"measure is not in the {r}-th power of the augmentation ideal")
    return reduce_vector(R, ideal_power_basis(model, chi, r + 1), mu.vector())


def e_chi(model: FiniteGaloisModel, chi: Character,
          H: Iterable[Element]) -> IwasawaMeasure:
    """The idempotent |H|^-1 sum_h chi(h)^-1 delta_h (needs p not dividing |H|)."""
    H = [tuple(h) for h in H]
    if not model.is_subgroup(H):
        raise ModelError("averaging set is not a subgroup")
    R = chi.ring
    if len(H) % R.p == 0:
        raise ModelError(
            f"subgroup order {len(H)} is divisible by p = {R.p}")
    hinv = pow(len(H), -1, R.M)
    out: Dict[Element, int] = {}
    for h in H:
        out[h] = (out.get(h, 0) + hinv * chi.inv_value(h)) % R.M
    return IwasawaMeasure(model, R, out)


def delta_chi(model: FiniteGaloisModel, chi: Character,
              H: Iterable[Element]) -> IwasawaMeasure:
    """delta_1 - e_chi(H): projects away the part where H acts through chi."""
    one = IwasawaMeasure.delta(model, chi.ring, model.identity)
    return one - e_chi(model, chi, H)


def in_C_chi(model: FiniteGaloisModel, chi: Character,
             H: Iterable[Element], mu: IwasawaMeasure) -> bool:
    """Whether mu, read as a function on G, shifts through chi on the right:
    mu(g h) = chi(h) mu(g) for all h in H.  Equivalently delta_h * mu =
    chi(h)^-1 mu.  The image of e_chibar * (anything) is exactly this space."""
    for h in H:
        h = tuple(h)
        if mu.translate(h) != mu.scale(chi.inv_value(h)):
            return False
    return True


def phi_map(model: FiniteGaloisModel, chi: Character,
            g: Element) -> Tuple[int, ...]:
    """Class of v_g in I_chi / I_chi^2.

    Additive in g: v_ab = v_a + v_b + v_a * v_b, and the product term dies in
    the quotient, so this is a homomorphism from G to the first graded piece.
    """
    return graded_class(model, chi, v_g(model, chi, g), 1)


def phi_tensor(model: FiniteGaloisModel, chi: Character,
               gs: Sequence[Element]) -> Tuple[int, ...]:
    """Class of v_{g_1} * ... * v_{g_r} in I_chi^r / I_chi^(r+1)."""
    gs = [tuple(g) for g in gs]
    if not gs:
        raise ModelError("need at least one group element")
    mu = v_g(model, chi, gs[0])
    for g in gs[1:]:
        mu = mu.star(v_g(model, chi, g))
    return graded_class(model, chi, mu, len(gs))


def phi_rec_measure(model: FiniteGaloisModel, chi: Character,
                    tensors) -> IwasawaMeasure:
    """Representative of sum_j c_j * prod_p v_{rec_p(x_{j,p})}.

    `tensors` is a list of (coeff, {label: local coset key}) pairs; every
    tensor must name the same labels.  Keys are resolved through the model's
    rec tables; a key the table does not know is a level mismatch.
    """
    R = chi.ring
    out = IwasawaMeasure(model, R, {})
    shape = None
    for coeff, components in tensors:
        labels = tuple(sorted(components))
        if shape is None:
            shape = labels
        elif labels != shape:
            raise ModelError(
                f"mixed tensor shapes: {labels} versus {shape}")
        term = None
        for label in labels:
            table = model.rec.get(label)
            if table is None:
                raise ModelError(f"no rec table for {label!r}")
            key = tuple(components[label])
            if key not in table:
                raise ModelError(
                    f"no rec image for {key} at {label!r} (level mismatch)")
            factor = v_g(model, chi, table[key])
            term = factor if term is None else term.star(factor)
        if term is None:
            raise ModelError("empty tensor")
        out = out + term.scale(coeff)
    return out


def phi_rec(model: FiniteGaloisModel, chi: Character,
            tensors, r: int) -> Tuple[int, ...]:
    """Class of phi_rec_measure(...) in I_chi^r / I_chi^(r+1)."""
    return graded_class(model, chi, phi_rec_measure(model, chi, tensors), r)


def measure_from_weights(model: FiniteGaloisModel, ring: ResidueRing,
                         mapping: Dict, weights: Dict) -> IwasawaMeasure:
    """Push integer weights through a labels -> G map and sum the deltas."""
    out: Dict[Element, int] = {}
    for label, w in weights.items():
        if label not in mapping:
            raise ModelError(f"no image assigned for label {label!r}")
        g = tuple(mapping[label])
        if not isinstance(w, int):
            raise MeasureFormatError(
                "integrality", f"weight {w!r} at {label!r} is not an integer")
        out[g] = (out.get(g, 0) + w) % ring.M
    return IwasawaMeasure(model, ring, out)
