"""Finite idele-class bookkeeping for a torus at homology degree zero.

A model is a finite abelian group A (the idele class group at some level),
a subgroup Pplus (image of the totally positive global points), and one
local subgroup L_p per chosen prime.  Derived from these:

    cl  = A / Pplus            ray classes
    clS = A / (Pplus * prod L_p)   classes ignoring the chosen primes
    W   = ker(cl -> clS)

together with the product D = prod_p L_p mapping into cl.  The degree-zero
fundamental classes are weight-1 functions on the class representatives, and
the counting identity

    hS * sum_{t in cl} f(t) = sum_{s in clS} sum_{x in D} f(rep(s * theta(x)))

holds exactly over the integers, with hS the unit-index |U| / |U0| of the
supplied unit data.  Only the degree-zero case is modeled; higher-degree
fundamental classes raise UnsupportedError.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

from .abgroup import Element, FiniteAbelianGroup, decompose_abelian
from .errors import ModelError, UnsupportedError

DTuple = Tuple[Element, ...]


def _coset_reps(A: FiniteAbelianGroup, B: Sequence[Element]) -> Dict[Element, Element]:
    """Map each element of A to the lex-min element of its B-coset."""
    rep: Dict[Element, Element] = {}
    for a in A.elements:
        if a in rep:
            continue
        coset = sorted(A.mul(a, b) for b in B)
        lead = coset[0]
        for c in coset:
            rep[c] = lead
    return rep


class IdeleClassModel:
    """A, Pplus, and local subgroups L_p with the derived class groups."""

    def __init__(self, A: FiniteAbelianGroup, pplus_gens: Sequence[Element],
                 local_gens: Dict[str, Sequence[Element]]):
        self.A = A
        try:
            self.Pplus = A.subgroup([tuple(g) for g in pplus_gens])
            self.labels = tuple(sorted(local_gens))
            self.local = {lab: A.subgroup([tuple(g) for g in local_gens[lab]])
                          for lab in self.labels}
            flat = [tuple(g) for lab in self.labels for g in local_gens[lab]]
            self.L = A.subgroup(flat)
            self.PL = A.subgroup(list(self.Pplus) + flat)
        except ValueError as e:
            raise ModelError(f"inconsistent generators: {e}") from None
        self._cl = _coset_reps(A, self.Pplus)
        self._clS = _coset_reps(A, self.PL)
        self.cl_classes: Tuple[Element, ...] = tuple(
            sorted(set(self._cl.values())))
        self.clS_classes: Tuple[Element, ...] = tuple(
            sorted(set(self._clS.values())))
        self.W: Tuple[Element, ...] = tuple(
            sorted({self._cl[x] for x in self.PL}))

    def cl_rep(self, a: Element) -> Element:
        a = tuple(a)
        if a not in self._cl:
            raise ModelError(f"{a} is not an element of the model group")
        return self._cl[a]

    def clS_rep(self, a: Element) -> Element:
        a = tuple(a)
        if a not in self._clS:
            raise ModelError(f"{a} is not an element of the model group")
        return self._clS[a]

    # -- the local product D = prod_p L_p ---------------------------------

    def D_identity(self) -> DTuple:
        return tuple(self.A.identity for _ in self.labels)

    def D_elements(self) -> Tuple[DTuple, ...]:
        return tuple(itertools.product(*[self.local[lab]
                                         for lab in self.labels]))

    def D_mul(self, x: DTuple, y: DTuple) -> DTuple:
        return tuple(self.A.mul(a, b) for a, b in zip(x, y))

    def theta_loc(self, x: DTuple) -> Element:
        out = self.A.identity
        for lab, a in zip(self.labels, x):
            if tuple(a) not in self.local[lab]:
                raise ModelError(
                    f"component {a} is not in the local subgroup at {lab}")
            out = self.A.mul(out, a)
        return out

    def in_D(self, x: DTuple) -> bool:
        return (len(x) == len(self.labels)
                and all(tuple(a) in self.local[lab]
                        for lab, a in zip(self.labels, x)))

    def theta_image_histogram(self) -> Dict[Element, int]:
        """Multiset of theta_loc over D, as counts per A-element."""
        hist = {self.A.identity: 1}
        for lab in self.labels:
            new: Dict[Element, int] = {}
            for a, c in hist.items():
                for g in self.local[lab]:
                    b = self.A.mul(a, g)
                    new[b] = new.get(b, 0) + c
            hist = new
        return hist

    def __repr__(self):
        return (f"IdeleClassModel({self.A!r}, |Pplus|={len(self.Pplus)}, "
                f"primes={list(self.labels)})")


def build_model(spec: Dict) -> IdeleClassModel:
    """Construct a model from a plain dict: orders, pplus, local generators."""
    try:
        A = FiniteAbelianGroup(spec["orders"])
    except (KeyError, TypeError, ValueError) as e:
        raise ModelError(f"bad group orders: {e}") from None
    pplus = [tuple(g) for g in spec.get("pplus", [])]
    local = {str(lab): [tuple(g) for g in gens]
             for lab, gens in spec.get("local", {}).items()}
    return IdeleClassModel(A, pplus, local)


@dataclass(frozen=True)
class UnitData:
    """The finite unit groups feeding the exact sequence.

    U models the S-units, U0 the subgroup of global units, theta the map
    from U into the local product D (exponent tuple -> D tuple).
    """
    U: FiniteAbelianGroup
    U0: Tuple[Element, ...]
    theta: Dict[Element, DTuple]

    def hS(self) -> int:
        return self.U.size // len(self.U0)


def canonical_unitdata(model: IdeleClassModel) -> UnitData:
    """Unit data realizing ker(D -> cl) with trivial global-unit part."""
    ident = model.cl_rep(model.A.identity)
    kernel = [x for x in model.D_elements()
              if model.cl_rep(model.theta_loc(x)) == ident]
    kernel.sort()
    gens, orders, coords = decompose_abelian(
        kernel, model.D_mul, model.D_identity())
    U = FiniteAbelianGroup(orders)
    theta = {coords[x]: x for x in kernel}
    return UnitData(U, (U.identity,), theta)


@dataclass
class StageResult:
    stage: str
    ok: bool
    detail: str


@dataclass
class CheckReport:
    ok: bool
    stages: Tuple[StageResult, ...]
    counts: Dict[str, int]

    def first_failure(self):
        for s in self.stages:
            if not s.ok:
                return s
        return None


def check_seq13(model: IdeleClassModel, unitdata: UnitData) -> CheckReport:
    """Verify exactness of 0 -> U0 -> U -> D -> cl -> clS -> 0, staged.

    Each stage reports independently so a corrupted map is located rather
    than just detected.  Malformed unit data (theta not a total homomorphism
    into D) is a ModelError, not a stage failure.
    """
    U, U0, theta = unitdata.U, tuple(unitdata.U0), unitdata.theta
    if set(theta) != set(U.elements):
        raise ModelError("theta must be defined on exactly the elements of U")
    for u, x in theta.items():
        if not model.in_D(x):
            raise ModelError(f"theta({u}) = {x} is not in the local product")
    for u in U.elements:
        for v in U.elements:
            if theta[U.mul(u, v)] != model.D_mul(theta[u], theta[v]):
                raise ModelError("theta is not a homomorphism")
    if not U.is_subgroup(U0):
        raise ModelError("U0 is not a subgroup of U")

    stages: List[StageResult] = []
    ident_cl = model.cl_rep(model.A.identity)

    ker_theta = {u for u in U.elements if theta[u] == model.D_identity()}
    ok1 = ker_theta == set(U0)
    stages.append(StageResult(
        "unit_kernel", ok1,
        "ker(theta) matches U0" if ok1 else
        f"ker(theta) has order {len(ker_theta)}, U0 has order {len(U0)}"))

    D_all = model.D_elements()
    ker_D = {x for x in D_all
             if model.cl_rep(model.theta_loc(x)) == ident_cl}
    im_theta = set(theta.values())
    ok2 = ker_D == im_theta
    stages.append(StageResult(
        "local_kernel", ok2,
        "ker(D -> cl) = theta(U)" if ok2 else
        f"ker(D -> cl) has order {len(ker_D)}, theta(U) has order "
        f"{len(im_theta)}"))

    im_cl = {model.cl_rep(model.theta_loc(x)) for x in D_all}
    ok3 = im_cl == set(model.W)
    stages.append(StageResult(
        "class_kernel", ok3,
        "ker(cl -> clS) = image of D" if ok3 else
        f"image of D has order {len(im_cl)}, W has order {len(model.W)}"))

    hit = {model.clS_rep(a) for a in model.A.elements}
    ok4 = hit == set(model.clS_classes)
    stages.append(StageResult(
        "surjective", ok4,
        "cl -> clS onto" if ok4 else "cl -> clS misses classes"))

    hS = unitdata.hS()
    counts = {"D": len(D_all), "W": len(model.W),
              "cl": len(model.cl_classes), "clS": len(model.clS_classes),
              "hS": hS}
    ok5 = (counts["D"] == hS * counts["W"]
           and counts["cl"] == counts["W"] * counts["clS"])
    stages.append(StageResult(
        "counting", ok5,
        "|D| = hS*|W| and |cl| = |W|*|clS|" if ok5 else
        f"counts inconsistent: {counts}"))

    return CheckReport(all(s.ok for s in stages), tuple(stages), counts)


class DegreeZeroClass:
    """A weight function on class representatives (the u = 0 cap product)."""

    def __init__(self, weights: Dict[Element, int]):
        self.weights = dict(weights)

    @classmethod
    def eta(cls, model: IdeleClassModel, u: int = 0) -> "DegreeZeroClass":
        if u != 0:
            raise UnsupportedError(
                "only the degree-zero fundamental class is modeled")
        return cls({t: 1 for t in model.cl_classes})

    @classmethod
    def eta_S(cls, model: IdeleClassModel, u: int = 0) -> "DegreeZeroClass":
        if u != 0:
            raise UnsupportedError(
                "only the degree-zero fundamental class is modeled")
        return cls({s: 1 for s in model.clS_classes})

    def total(self) -> int:
        return sum(self.weights.values())

    def pair(self, f) -> int:
        return sum(w * f(t) for t, w in sorted(self.weights.items()))


@dataclass
class PairingRow:
    index: int
    lhs: int
    rhs: int
    ok: bool


@dataclass
class PairingReport:
    ok: bool
    hS: int
    rows: Tuple[PairingRow, ...]

    def witness(self):
        for row in self.rows:
            if not row.ok:
                return row
        return None


def lemma34_pairing_check(model: IdeleClassModel, unitdata: UnitData,
                          testfns: Sequence, z_weights=None) -> PairingReport:
    """hS * <eta, f> against the local-product double sum, per test function.

    z_weights would carry the split-prime local weight systems; only the
    trivial system (all weights 1) is modeled, so passing anything raises.
    """
    if z_weights is not None:
        raise UnsupportedError(
            "split-prime z-weight systems are not modeled; all local weights "
            "are 1 here")
    hS = unitdata.hS()
    eta = DegreeZeroClass.eta(model)
    eta_S = DegreeZeroClass.eta_S(model)
    hist = model.theta_image_histogram()
    rows = []
    for i, f in enumerate(testfns):
        lhs = hS * eta.pair(f)
        rhs = 0
        for s, ws in sorted(eta_S.weights.items()):
            for a, c in sorted(hist.items()):
                rhs += ws * c * f(model.cl_rep(model.A.mul(s, a)))
        rows.append(PairingRow(i, lhs, rhs, lhs == rhs))
    return PairingReport(all(r.ok for r in rows), hS, tuple(rows))


def partition_transversal(model: IdeleClassModel) -> Tuple[Element, ...]:
    """cl representatives listed as rep(s * w) over clS reps s and W elements.

    The point of the listing: it hits every cl class exactly once, which is
    the finite form of the coset decomposition behind the counting identity.
    """
    out = []
    for s in model.clS_classes:
        for w in model.W:
            out.append(model.cl_rep(model.A.mul(s, w)))
    return tuple(out)
