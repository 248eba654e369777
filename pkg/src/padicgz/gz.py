"""Measure-versus-point identities for exceptional-zero derivatives.

An instance bundles a finite class transversal (representatives t_i with
H-elements rec_cl(t_i)), a finite Galois quotient G with per-prime rec
tables from level-m torus quotients into G, and for every class a list of
pure tensors of boundary measures, one component per nonsplit prime.

Two disjoint computation paths meet in the verifiers.  The measure path
(`build_measure`) pushes each local component forward to its torus quotient
-- a purely combinatorial aggregation of leaf masses -- and convolves delta
masses through the rec tables.  The point path (`darmon_difference`,
`plectic_Q`, `point_tensors`) runs multiplicative integrals between the
fixed points, reads each value as a level-m coset, and extends phi over rec
linearly.  The identity under test is that their graded classes in
I_chi^r / I_chi^(r+1) agree after dividing the point side by the unit
index; comparisons happen two digits below the working length so carry
noise at the top cannot manufacture agreement.

Characters must be trivial on every rec image: the local components of the
measure have total mass zero, so integration against such a character
kills each per-prime factor and the whole measure lands in I_chi^r.  A
character that is nontrivial on some rec image breaks that mechanism and
is refused as inadmissible rather than reported as a failed identity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .errors import (DepthError, InstanceError, MeasureFormatError,
                     ModelError, UnsupportedError)
from .iwasawa import (Character, FiniteGaloisModel, IwasawaMeasure,
                      character_from_exponents, graded_class,
                      phi_rec_measure)
from .padic import PrimeContext, QuadContext, torus_quotient
from .projline import (BoundaryMeasure, FixedPair, dipole, mult_integral,
                       pushforward_to_torus)
from .projline import ord_component_check as _split_ord_identity
from .rings import ResidueRing
from .serialize import (check_instance_sections, leaves_from_rows,
                        load_instance_dict)
from .tate import TateCurve
from .torus import build_model


def _int_field(doc: dict, name: str, where: str) -> int:
    v = doc.get(name)
    if not isinstance(v, int) or isinstance(v, bool):
        raise InstanceError(f"{where}: field {name!r} must be an integer")
    return v


def _pair_rows(rows, where: str):
    """[[key, value], ...] with list keys/values -> list of tuple pairs."""
    if not isinstance(rows, list):
        raise InstanceError(f"{where}: expected a list of [key, value] pairs")
    out = []
    for row in rows:
        if not isinstance(row, list) or len(row) != 2 \
                or not isinstance(row[0], list) or not isinstance(row[1], list):
            raise InstanceError(f"{where}: bad pair {row!r}")
        out.append((tuple(row[0]), tuple(row[1])))
    return out


class PrimeBlock:
    """One nonsplit multiplicative prime: local field, fixed pair, level."""

    def __init__(self, doc: dict, N: int):
        if not isinstance(doc, dict) or "label" not in doc:
            raise InstanceError(f"prime record {doc!r} has no label")
        self.label = str(doc["label"])
        where = f"prime {self.label!r}"
        p = _int_field(doc, "p", where)
        self.m = _int_field(doc, "m", where)
        self.depth = _int_field(doc, "depth", where)
        q = _int_field(doc, "q", where)
        self.mode = doc.get("mode", "steinberg+")
        if self.mode not in ("steinberg+", "steinberg-"):
            raise InstanceError(f"{where}: unknown mode {self.mode!r}")
        try:
            self.ctx = PrimeContext(p, N)
        except ValueError as e:
            raise InstanceError(f"{where}: {e}") from None
        torus = doc.get("torus")
        variant = doc.get("variant", 0)
        if torus == "inert":
            self.qctx = QuadContext.inert(self.ctx)
        elif torus == "ramified":
            if not isinstance(variant, int) or isinstance(variant, bool):
                raise InstanceError(f"{where}: variant must be an integer")
            self.qctx = QuadContext.ramified(self.ctx, variant)
        else:
            raise InstanceError(
                f"{where}: torus must be 'inert' or 'ramified', got {torus!r}")
        tau = doc.get("tau")
        if (not isinstance(tau, list) or len(tau) != 2
                or not all(isinstance(c, int) and not isinstance(c, bool)
                           for c in tau)):
            raise InstanceError(f"{where}: tau must be a coordinate pair [a, b]")
        try:
            self.fp = FixedPair(self.qctx.from_pair(tau[0], tau[1]))
        except ValueError as e:
            raise InstanceError(f"{where}: {e}") from None
        if q == 0 or q % p != 0:
            raise InstanceError(
                f"{where}: Tate parameter must be a nonzero multiple of {p}")
        self.q_int = q
        if self.m < 1:
            raise InstanceError(f"{where}: level m must be >= 1")
        self.quot = torus_quotient(self.qctx, self.m)
        self.rec_rows: Dict[tuple, tuple] = {}
        for key, g in _pair_rows(doc.get("rec", []), f"{where}.rec"):
            if key in self.rec_rows:
                raise InstanceError(f"{where}: duplicate rec key {key}")
            self.rec_rows[key] = g
        self._curve = None

    def tate_curve(self) -> TateCurve:
        if self._curve is None:
            self._curve = TateCurve(self.qctx.from_pair(self.q_int, 0))
        return self._curve


class SplitBlock:
    """A split prime carries only fixed points; it never enters the measure."""

    def __init__(self, doc: dict, N: int):
        if not isinstance(doc, dict) or "label" not in doc:
            raise InstanceError(f"split prime record {doc!r} has no label")
        self.label = str(doc["label"])
        where = f"split prime {self.label!r}"
        p = _int_field(doc, "p", where)
        t0 = _int_field(doc, "tau", where)
        t1 = _int_field(doc, "taubar", where)
        self.depth = _int_field(doc, "depth", where)
        try:
            self.ctx = PrimeContext(p, N)
            self.fp = FixedPair(self.ctx.from_int(t0), self.ctx.from_int(t1))
        except ValueError as e:
            raise InstanceError(f"{where}: {e}") from None


class GZInstance:
    """Validated instance; all cross-section consistency is checked here."""

    def __init__(self, doc: dict, depth_cap: int | None = None):
        check_instance_sections(doc)
        self.doc = doc
        self.p = doc["p"]
        self.N = doc["N"]
        if not 4 <= self.N <= 64:
            raise InstanceError(f"working length N={self.N} outside 4..64")
        try:
            PrimeContext(self.p, 4)
        except ValueError as e:
            raise InstanceError(str(e)) from None

        rows = doc["primes"]
        if not isinstance(rows, list) or not rows:
            raise InstanceError("at least one nonsplit prime is required")
        blocks = [PrimeBlock(row, self.N) for row in rows]
        seen = set()
        for b in blocks:
            if b.label in seen:
                raise InstanceError(f"duplicate prime label {b.label!r}")
            seen.add(b.label)
        blocks.sort(key=lambda b: b.label)
        self.primes: List[PrimeBlock] = blocks
        self.labels = tuple(b.label for b in blocks)
        self.block = {b.label: b for b in blocks}
        if depth_cap is not None:
            for b in blocks:
                if b.depth > depth_cap:
                    raise DepthError(
                        f"{b.label}: depth {b.depth} exceeds the cap "
                        f"{depth_cap}")

        self.split: List[SplitBlock] = []
        for row in doc.get("split_primes", []):
            b = SplitBlock(row, self.N)
            if b.label in seen:
                raise InstanceError(f"duplicate prime label {b.label!r}")
            seen.add(b.label)
            if depth_cap is not None and b.depth > depth_cap:
                raise DepthError(
                    f"{b.label}: depth {b.depth} exceeds the cap {depth_cap}")
            self.split.append(b)
        self.split.sort(key=lambda b: b.label)

        gdoc = doc["galois_model"]
        if not isinstance(gdoc, dict) or "orders" not in gdoc:
            raise InstanceError("galois_model must declare cyclic orders")
        try:
            self.galois = FiniteGaloisModel(
                gdoc["orders"], H_gens=gdoc.get("H", []),
                rec={b.label: b.rec_rows for b in blocks})
        except ModelError as e:
            raise InstanceError(str(e)) from None
        for b in blocks:
            table = self.galois.rec[b.label]
            if set(table) != set(b.quot.elements):
                raise InstanceError(
                    f"{b.label}: rec table must cover the level-{b.m} "
                    f"quotient exactly ({len(table)} keys for "
                    f"{b.quot.order} cosets)")
            # NOTE: the table is deliberately not checked for homomorphy
            # here.  The measure path applies rec coset by coset while the
            # point path applies it to the product coset, so the verifiers
            # themselves certify compatibility: a corrupted table loads
            # fine and then fails the identity with a coordinate diff.
        if not self.galois.generation_ok():
            raise InstanceError(
                "H and the rec images do not generate the Galois group")

        cdoc = doc["class_model"]
        if not isinstance(cdoc, dict):
            raise InstanceError("class_model must be an object")
        self.torus_model = build_model({
            "orders": cdoc.get("orders"),
            "pplus": cdoc.get("pplus", []),
            "local": cdoc.get("local", {})})
        self.cl_reps = self.torus_model.cl_classes
        rc: Dict[tuple, tuple] = {}
        for key, g in _pair_rows(cdoc.get("rec_cl", []), "class_model.rec_cl"):
            if key in rc:
                raise InstanceError(f"rec_cl: duplicate key {key}")
            rc[key] = g
        if set(rc) != set(self.cl_reps):
            raise InstanceError(
                "rec_cl must assign one Galois element to every class "
                f"representative ({sorted(self.cl_reps)})")
        H = set(self.galois.H)
        for key, g in rc.items():
            if g not in self.galois.index:
                raise InstanceError(f"rec_cl value {g} is not in the group")
            if g not in H:
                raise InstanceError(f"rec_cl value {g} at {key} is outside H")
        self.rec_cl = rc

        mrows = doc["measures"]
        if not isinstance(mrows, list) or len(mrows) != len(self.cl_reps):
            raise InstanceError(
                f"measures must list exactly {len(self.cl_reps)} classes, "
                "one per representative in order")
        self.measures: List[List[Dict[str, BoundaryMeasure]]] = []
        for i, tensors in enumerate(mrows):
            if not isinstance(tensors, list):
                raise InstanceError(f"measures[{i}] must be a list of tensors")
            parsed = []
            for j, tensor in enumerate(tensors):
                if not isinstance(tensor, dict) \
                        or set(tensor) != set(self.labels):
                    raise InstanceError(
                        f"tensor {j} for class {i} must have one component "
                        f"per prime {sorted(self.labels)}")
                comp = {}
                for lab in self.labels:
                    b = self.block[lab]
                    leaves = leaves_from_rows(tensor[lab])
                    try:
                        B = BoundaryMeasure(b.ctx, b.depth, leaves)
                    except ValueError as e:
                        raise MeasureFormatError(
                            "address",
                            f"class {i} tensor {j} at {lab}: {e}") from None
                    if B.total != 0:
                        raise MeasureFormatError(
                            "total-zero",
                            f"class {i} tensor {j} at {lab} has total "
                            f"{B.total}")
                    comp[lab] = B
                parsed.append(comp)
            self.measures.append(parsed)

        self.character_rows: List[tuple] = []
        for row in doc["characters"]:
            if (not isinstance(row, list)
                    or len(row) != len(self.galois.orders)
                    or not all(isinstance(x, int) and not isinstance(x, bool)
                               for x in row)):
                raise InstanceError(
                    f"character row {row!r} must list "
                    f"{len(self.galois.orders)} integer exponents")
            self.character_rows.append(tuple(row))

        ud = doc["unit_indices"]
        k = ud.get("index") if isinstance(ud, dict) else None
        if not isinstance(k, int) or isinstance(k, bool) or k < 1:
            raise InstanceError("unit_indices.index must be a positive integer")
        if k % self.p == 0:
            raise InstanceError(
                f"unit index {k} must be prime to p = {self.p}")
        self.unit_index = k

        self.eps_minus: List[Tuple[str, Fraction]] = []
        for row in doc.get("eps_minus", []):
            if not isinstance(row, dict) or "label" not in row:
                raise InstanceError(f"eps_minus record {row!r} has no label")
            lab = str(row["label"])
            if lab in seen:
                raise InstanceError(f"duplicate prime label {lab!r}")
            seen.add(lab)
            es = row.get("eps_sq")
            if (not isinstance(es, list) or len(es) != 2
                    or not all(isinstance(x, int) and not isinstance(x, bool)
                               for x in es)):
                raise InstanceError(
                    f"eps_minus {lab!r}: eps_sq must be [numerator, "
                    "denominator]")
            n, d = es
            if n == 0 or d == 0:
                raise InstanceError(
                    f"eps_minus {lab!r}: eps_sq must be nonzero (a vanishing "
                    "away factor is not modeled)")
            if d % self.p == 0:
                raise InstanceError(
                    f"eps_minus {lab!r}: denominator must be prime to "
                    f"p = {self.p}")
            self.eps_minus.append((lab, Fraction(n, d)))
        self.eps_minus.sort()

        self._pf: Optional[dict] = None
        self._ints: Optional[dict] = None
        self._pg: Optional[PlecticGroup] = None

    # -- loading -----------------------------------------------------------

    @classmethod
    def from_dict(cls, doc: dict, depth_cap: int | None = None) -> "GZInstance":
        return cls(doc, depth_cap=depth_cap)

    @classmethod
    def load(cls, path: str, depth_cap: int | None = None) -> "GZInstance":
        return cls(load_instance_dict(path), depth_cap=depth_cap)

    # -- rings and characters ----------------------------------------------

    def r(self) -> int:
        return len(self.primes)

    def ring(self) -> ResidueRing:
        return ResidueRing(self.p, self.N)

    def comparison_ring(self) -> ResidueRing:
        """Two digits below the working length: top-digit carries in the
        local arithmetic never reach the compared coordinates."""
        return ResidueRing(self.p, self.N - 2)

    def character(self, exps, ring: ResidueRing | None = None) -> Character:
        return character_from_exponents(
            self.galois, ring or self.comparison_ring(), tuple(exps))

    def verification_characters(self, ring: ResidueRing | None = None):
        rows = self.character_rows or [tuple(0 for _ in self.galois.orders)]
        return [self.character(row, ring) for row in rows]

    def rec_obstruction(self, chi: Character) -> Optional[str]:
        """Label of the first prime whose rec image chi fails to kill."""
        for b in self.primes:
            for g in self.galois.rec[b.label].values():
                if chi(g) != 1:
                    return b.label
        return None

    def require_admissible(self, chi: Character) -> None:
        lab = self.rec_obstruction(chi)
        if lab is not None:
            raise InstanceError(
                f"character is not trivial on the rec image at {lab!r}")

    def eps_sq_scalar(self, ring: ResidueRing) -> int:
        f = Fraction(1)
        for _, e in self.eps_minus:
            f *= e
        return f.numerator * pow(f.denominator, -1, ring.M) % ring.M


def _resolve_chi(inst: GZInstance, chi, ring: ResidueRing) -> Character:
    if chi is None:
        return inst.character(tuple(0 for _ in inst.galois.orders), ring)
    if isinstance(chi, Character):
        if chi.ring != ring:
            raise InstanceError(
                "character lives over the wrong ring; pass exponents and let "
                "the instance build it")
        return chi
    return inst.character(tuple(chi), ring)


def _chi_of(inst: GZInstance, chi) -> Character:
    """Resolve over chi's own ring when given a Character, else over the
    comparison ring."""
    ring = chi.ring if isinstance(chi, Character) else inst.comparison_ring()
    return _resolve_chi(inst, chi, ring)


# ---------------------------------------------------------------------------
# measure path


def _pushforwards(inst: GZInstance) -> dict:
    if inst._pf is None:
        pf = {}
        for i in range(len(inst.cl_reps)):
            for j, tensor in enumerate(inst.measures[i]):
                for lab, B in tensor.items():
                    b = inst.block[lab]
                    pf[(i, j, lab)] = pushforward_to_torus(B, b.fp, b.m)
        inst._pf = pf
    return inst._pf


def build_measure(inst: GZInstance,
                  ring: ResidueRing | None = None) -> IwasawaMeasure:
    """Assemble the group-ring measure from the local boundary data.

    mu = sum over classes i and tensors j of
         delta_{rec_cl(t_i)} * (star over primes of
         sum_c nu_{ijp}(c) delta_{rec_p(c)}),
    where nu is the combinatorial pushforward of the leaf masses to the
    level-m torus quotient.  No multiplicative integral runs here.
    """
    R = ring if ring is not None else inst.ring()
    G = inst.galois
    pf = _pushforwards(inst)
    out: Dict[tuple, int] = {}
    for i, rep in enumerate(inst.cl_reps):
        h = inst.rec_cl[rep]
        for j in range(len(inst.measures[i])):
            parts = [sorted(pf[(i, j, lab)].items()) for lab in inst.labels]
            for combo in itertools.product(*parts):
                w = 1
                g = h
                for lab, (coset, mass) in zip(inst.labels, combo):
                    w *= mass
                    g = G.mul(g, G.rec[lab][coset])
                out[g] = (out.get(g, 0) + w) % R.M
    return IwasawaMeasure(G, R, out)


# ---------------------------------------------------------------------------
# point path


def _integrals(inst: GZInstance) -> dict:
    if inst._ints is None:
        vals = {}
        for i in range(len(inst.cl_reps)):
            for j, tensor in enumerate(inst.measures[i]):
                for lab, B in tensor.items():
                    b = inst.block[lab]
                    got = mult_integral(B, b.fp.tau, b.fp.taubar)
                    if got.effective < b.m:
                        raise DepthError(
                            f"{lab}: {got.effective} certified digits are "
                            f"not enough for level {b.m}")
                    vals[(i, j, lab)] = got
        inst._ints = vals
    return inst._ints


def point_tensors(inst: GZInstance, chi: Character):
    """The point side as a formal sum: for every class and tensor, the
    weight k * chi(rec_cl(t_i)) on the pure tensor of level-m cosets of the
    per-prime integral values."""
    ints = _integrals(inst)
    k = inst.unit_index
    M = chi.ring.M
    out = []
    for i, rep in enumerate(inst.cl_reps):
        c = (k * chi(inst.rec_cl[rep])) % M
        for j in range(len(inst.measures[i])):
            keys = {lab: inst.block[lab].quot.reduce(ints[(i, j, lab)].value)
                    for lab in inst.labels}
            out.append((c, keys))
    return out


def darmon_difference(inst: GZInstance, chi):
    """Formal weighted list of the integral values themselves (norm-one
    units), one entry per (class, tensor); single-prime instances only."""
    if len(inst.labels) != 1:
        raise UnsupportedError(
            "the single-prime difference needs exactly one nonsplit prime")
    chi = _chi_of(inst, chi)
    lab = inst.labels[0]
    ints = _integrals(inst)
    k = inst.unit_index
    M = chi.ring.M
    out = []
    for i, rep in enumerate(inst.cl_reps):
        c = (k * chi(inst.rec_cl[rep])) % M
        for j in range(len(inst.measures[i])):
            out.append((c, ints[(i, j, lab)].value))
    return out


def darmon_point(inst: GZInstance, chi):
    """Sum the uniformized integral values on the Tate curve.

    Only +-1-valued characters act on curve points (the weight becomes
    negation); the unit index acts by repeated addition.  Returns
    (curve, point); the identity is None.
    """
    if len(inst.labels) != 1:
        raise UnsupportedError(
            "the single-prime point needs exactly one nonsplit prime")
    b = inst.primes[0]
    chi = _chi_of(inst, chi)
    M = chi.ring.M
    curve = b.tate_curve()
    ints = _integrals(inst)
    acc = None
    for i, rep in enumerate(inst.cl_reps):
        z = chi(inst.rec_cl[rep])
        if z == 1:
            s = 1
        elif z == M - 1:
            s = -1
        else:
            raise UnsupportedError(
                "character values beyond +-1 do not act on curve points")
        for j in range(len(inst.measures[i])):
            P = curve.point(ints[(i, j, b.label)].value)
            acc = curve.add(acc, curve.mul(s * inst.unit_index, P))
    return curve, acc


# ---------------------------------------------------------------------------
# verification


@dataclass
class VerifyReport:
    ok: bool
    membership: bool
    equal: bool
    lhs: Optional[tuple]
    rhs: Optional[tuple]
    r: int
    detail: str = ""


@dataclass
class Verify91Report:
    ok: bool
    membership: bool
    base_equal: bool
    squared_equal: bool
    lhs: Optional[tuple]
    rhs: Optional[tuple]
    lhs_sq: Optional[tuple]
    rhs_sq: Optional[tuple]
    r: int
    eps_sq: str = "1"
    detail: str = ""


def verify_thm71(inst: GZInstance, chi=None) -> VerifyReport:
    """First-derivative comparison at one nonsplit prime.

    Checks the graded class of the assembled measure in I_chi / I_chi^2
    against index^-1 times phi-over-rec applied to the integral cosets.
    Both sides are canonical coordinate vectors over Z/p^(N-2).
    """
    if len(inst.labels) != 1:
        raise UnsupportedError(
            "single-prime comparison needs exactly one nonsplit prime")
    R = inst.comparison_ring()
    chi = _resolve_chi(inst, chi, R)
    inst.require_admissible(chi)
    mu = build_measure(inst, R)
    if mu.eps_chi(chi) != 0:
        return VerifyReport(False, False, False, None, None, 1,
                            "measure is not in the twisted augmentation ideal")
    lhs = graded_class(inst.galois, chi, mu, 1)
    rep = phi_rec_measure(inst.galois, chi, point_tensors(inst, chi))
    kinv = pow(inst.unit_index, -1, R.M)
    rhs = graded_class(inst.galois, chi, rep.scale(kinv), 1)
    equal = lhs == rhs
    return VerifyReport(equal, True, equal, lhs, rhs, 1,
                        "" if equal else "coordinate vectors differ")


def verify_thm91(inst: GZInstance, chi=None) -> Verify91Report:
    """Higher-rank comparison over r nonsplit primes in I^r / I^(r+1).

    The base comparison checks the identity with the away-prime scalar
    removed; when eps^2 data is supplied the comparison is repeated on
    squared classes in I^2r / I^(2r+1), where only eps^2 (never a chosen
    square root) enters, scaling both sides.
    """
    R = inst.comparison_ring()
    chi = _resolve_chi(inst, chi, R)
    inst.require_admissible(chi)
    r = len(inst.labels)
    mu = build_measure(inst, R)
    try:
        lhs = graded_class(inst.galois, chi, mu, r)
    except ModelError as e:
        return Verify91Report(False, False, False, False, None, None, None,
                              None, r, detail=str(e))
    rep = phi_rec_measure(inst.galois, chi, point_tensors(inst, chi))
    kinv = pow(inst.unit_index, -1, R.M)
    rhs = graded_class(inst.galois, chi, rep.scale(kinv), r)
    base = lhs == rhs
    es = inst.eps_sq_scalar(R)
    lhs_sq = graded_class(inst.galois, chi, mu.star(mu).scale(es), 2 * r)
    rhs_sq = graded_class(
        inst.galois, chi,
        rep.star(rep).scale(kinv * kinv % R.M).scale(es), 2 * r)
    squared = lhs_sq == rhs_sq
    ok = base and squared
    return Verify91Report(ok, True, base, squared, lhs, rhs, lhs_sq, rhs_sq,
                          r, eps_sq=str(_eps_product(inst)),
                          detail="" if ok else "coordinate vectors differ")


def _eps_product(inst: GZInstance) -> Fraction:
    f = Fraction(1)
    for _, e in inst.eps_minus:
        f *= e
    return f


# ---------------------------------------------------------------------------
# plectic layer


class _PFactor:
    """p-part of one level quotient, for the coefficient prime p."""

    def __init__(self, p: int, quot):
        self.quot = quot
        n = quot.order
        a = 0
        while n % p == 0:
            n //= p
            a += 1
        mpart = quot.order // p ** a
        self.proj_exp = 0 if a == 0 else mpart * pow(mpart, -1, p ** a)
        self.gens = []
        self.orders = []
        for g, d in zip(quot.gens, quot.gen_orders):
            dv = 0
            dd = d
            while dd % p == 0:
                dd //= p
                dv += 1
            if dv:
                self.gens.append(quot.power(g, d // p ** dv))
                self.orders.append(p ** dv)
        table = {quot.identity: tuple(0 for _ in self.gens)}
        for i, (g, d) in enumerate(zip(self.gens, self.orders)):
            cur = dict(table)
            for e in range(1, d):
                ge = quot.power(g, e)
                for el, co in table.items():
                    nco = list(co)
                    nco[i] = e
                    cur[quot.mul(el, ge)] = tuple(nco)
            table = cur
        self._table = table

    def coords(self, key) -> tuple:
        xp = (self.quot.power(key, self.proj_exp) if self.proj_exp
              else self.quot.identity)
        if xp not in self._table:
            raise ModelError(
                "element does not project into the p-part of the quotient")
        return self._table[xp]


class PlecticElement:
    """Tensor coordinates: multi-index -> residue mod the factor-wise
    minimal cyclic order."""

    def __init__(self, group: "PlecticGroup", coords: Dict[tuple, int]):
        self.group = group
        clean = {}
        for J, c in coords.items():
            c %= group.moduli[J]
            if c:
                clean[J] = c
        self.coords = clean

    def add(self, other: "PlecticElement") -> "PlecticElement":
        if other.group is not self.group:
            raise ModelError("plectic elements from different groups")
        out = dict(self.coords)
        for J, c in other.coords.items():
            out[J] = out.get(J, 0) + c
        return PlecticElement(self.group, out)

    def scale(self, n: int) -> "PlecticElement":
        return PlecticElement(self.group,
                              {J: c * n for J, c in self.coords.items()})

    def is_zero(self) -> bool:
        return not self.coords

    def __eq__(self, other):
        return (isinstance(other, PlecticElement)
                and self.group is other.group
                and self.coords == other.coords)

    def __repr__(self):
        return f"Plectic({self.coords})"


class PlecticGroup:
    """Tensor product over Z of the coefficient-prime parts of the per-prime
    level quotients, with Z/p^min moduli per multi-index."""

    def __init__(self, p: int, quots: Dict[str, object]):
        if not quots:
            raise ModelError("at least one prime is required")
        self.p = p
        self.labels = tuple(sorted(quots))
        self.factors = {lab: _PFactor(p, quots[lab]) for lab in self.labels}
        ranges = [range(len(self.factors[lab].orders)) for lab in self.labels]
        self.multis = tuple(itertools.product(*ranges))
        self.moduli = {}
        for J in self.multis:
            self.moduli[J] = min(
                self.factors[lab].orders[j]
                for lab, j in zip(self.labels, J))

    def zero(self) -> PlecticElement:
        return PlecticElement(self, {})

    def pure(self, keys: Dict[str, tuple]) -> PlecticElement:
        if set(keys) != set(self.labels):
            raise ModelError(
                f"pure tensor must name exactly the primes {self.labels}")
        co = {lab: self.factors[lab].coords(tuple(keys[lab]))
              for lab in self.labels}
        out = {}
        for J in self.multis:
            w = 1
            for lab, j in zip(self.labels, J):
                w *= co[lab][j]
            out[J] = w
        return PlecticElement(self, out)


def plectic_group(inst: GZInstance) -> PlecticGroup:
    if inst._pg is None:
        inst._pg = PlecticGroup(inst.p,
                                {b.label: b.quot for b in inst.primes})
    return inst._pg


def plectic_Q(inst: GZInstance, chi) -> PlecticElement:
    """The point side collapsed into tensor coordinates: the weighted sum of
    pure tensors of the per-prime integral cosets."""
    chi = _chi_of(inst, chi)
    pg = plectic_group(inst)
    out = pg.zero()
    for c, keys in point_tensors(inst, chi):
        out = out.add(pg.pure(keys).scale(c))
    return out


def plectic_point(inst: GZInstance, chi):
    """Formal weighted list of per-prime curve points (no collapse):
    [(weight, {label: TatePoint or None}), ...]."""
    chi = _chi_of(inst, chi)
    ints = _integrals(inst)
    k = inst.unit_index
    out = []
    for i, rep in enumerate(inst.cl_reps):
        c = (k * chi(inst.rec_cl[rep])) % chi.ring.M
        for j in range(len(inst.measures[i])):
            pts = {lab: inst.block[lab].tate_curve().point(
                ints[(i, j, lab)].value) for lab in inst.labels}
            out.append((c, pts))
    return out


def plectic_determinant(pg: PlecticGroup, rows) -> PlecticElement:
    """Alternating sum over permutations: row sigma(j) supplies the
    component at the j-th prime.  One row gives the row itself back;
    repeated rows cancel to zero."""
    r = len(pg.labels)
    if len(rows) != r:
        raise ModelError(f"need exactly {r} rows, got {len(rows)}")
    for row in rows:
        if set(row) != set(pg.labels):
            raise ModelError(
                f"every row must name exactly the primes {pg.labels}")
    out = pg.zero()
    for perm in itertools.permutations(range(r)):
        inversions = sum(1 for a in range(r) for b in range(a + 1, r)
                         if perm[a] > perm[b])
        sign = -1 if inversions % 2 else 1
        keys = {lab: rows[perm[j]][lab]
                for j, lab in enumerate(pg.labels)}
        out = out.add(pg.pure(keys).scale(sign))
    return out


# ---------------------------------------------------------------------------
# split primes


def ord_component_check(inst: GZInstance, label: str, t_val: int,
                        phi: BoundaryMeasure | None = None) -> dict:
    """Ordinary-component identity at one of the instance's split primes.

    phi defaults to a dipole at the declared depth; any boundary measure on
    the same local line may be supplied instead.
    """
    for b in inst.split:
        if b.label == label:
            break
    else:
        raise InstanceError(f"no split prime labeled {label!r}")
    if phi is None:
        phi = dipole(b.ctx, b.depth)
    return _split_ord_identity(b.fp, phi, t_val)
