"""Closed-form local L-factors, squared epsilon-factors, and the ordinary
unit alpha, all exact.

The Steinberg twists have explicit Euler factors depending on the torus type
at p (split / inert / ramified) and on chi(omega); the squared epsilon
factor follows a three-case rule:

    generic:                 L(1, ad) / L(1/2, chi)      (supplied values)
    Steinberg, chi unram.:   L(-1/2, chi)^-1
    Steinberg, cond n > 0:   q^n                         (chi-factor is 1)

An exceptional zero is the vanishing of the squared epsilon factor, i.e. a
pole of L at s = -1/2.  chi(omega) may be a genuine root of unity of order
> 2; those values are carried exactly in a cyclotomic field, never floats.
Only the square of epsilon is ever represented -- no square root is chosen.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional

from .cyclotomic import CycloNumber
from .errors import InstanceError, UnsupportedError

STEINBERG_PLUS = "steinberg+"
STEINBERG_MINUS = "steinberg-"
GENERIC = "generic"

SPLIT = "split"
INERT = "inert"
RAMIFIED = "ramified"


def _inv(x):
    if isinstance(x, CycloNumber):
        return x.inverse()
    return 1 / Fraction(x)


def _is_zero(x) -> bool:
    if isinstance(x, CycloNumber):
        return x.is_zero()
    return x == 0


class LocalRepCase:
    """Local automorphic datum: a Steinberg twist, or generic with L-data."""

    def __init__(self, kind: str, l_ad=None, l_half=None):
        if kind not in (STEINBERG_PLUS, STEINBERG_MINUS, GENERIC):
            raise InstanceError(f"unknown representation kind {kind!r}")
        self.kind = kind
        if kind == GENERIC:
            if l_ad is None or l_half is None:
                raise InstanceError(
                    "generic kind needs both L(1, ad) and L(1/2, chi)")
            self.l_ad = Fraction(l_ad)
            self.l_half = Fraction(l_half)
            if self.l_ad == 0 or self.l_half == 0:
                raise InstanceError(
                    "generic L-data must be nonzero; a vanishing central "
                    "value is not the tracked phenomenon")
        else:
            if l_ad is not None or l_half is not None:
                raise InstanceError("L-data only applies to the generic kind")
            self.l_ad = self.l_half = None

    @classmethod
    def steinberg_plus(cls):
        return cls(STEINBERG_PLUS)

    @classmethod
    def steinberg_minus(cls):
        return cls(STEINBERG_MINUS)

    @classmethod
    def generic(cls, l_ad, l_half):
        return cls(GENERIC, l_ad, l_half)

    @property
    def sign(self) -> Optional[int]:
        if self.kind == STEINBERG_PLUS:
            return 1
        if self.kind == STEINBERG_MINUS:
            return -1
        return None

    def __repr__(self):
        if self.kind == GENERIC:
            return f"LocalRepCase(generic, {self.l_ad}, {self.l_half})"
        return f"LocalRepCase({self.kind})"


class LocalCharCase:
    """Local character datum: torus type, chi(omega), conductor, residue q."""

    def __init__(self, torus: str, chi_omega=1, conductor: int = 0,
                 q: int = 5):
        if torus not in (SPLIT, INERT, RAMIFIED):
            raise InstanceError(f"unknown torus type {torus!r}")
        if not isinstance(conductor, int) or conductor < 0:
            raise InstanceError(f"conductor {conductor!r} must be an int >= 0")
        if not isinstance(q, int) or q < 2:
            raise InstanceError(f"residue cardinality {q!r} must be >= 2")
        if isinstance(chi_omega, int):
            chi_omega = Fraction(chi_omega)
        if isinstance(chi_omega, Fraction):
            if chi_omega not in (Fraction(1), Fraction(-1)):
                raise InstanceError(
                    f"rational chi(omega) must be +-1, got {chi_omega}")
        elif isinstance(chi_omega, CycloNumber):
            if not chi_omega.is_root_of_unity():
                raise InstanceError("chi(omega) must be a root of unity")
        else:
            raise InstanceError(
                f"chi(omega) of type {type(chi_omega).__name__} unsupported")
        self.torus = torus
        self.chi_omega = chi_omega
        self.conductor = conductor
        self.q = q

    @property
    def unramified(self) -> bool:
        return self.conductor == 0

    def __repr__(self):
        return (f"LocalCharCase({self.torus}, chi_omega={self.chi_omega!r}, "
                f"conductor={self.conductor}, q={self.q})")


class LValue:
    """An exact L-value, or a pole marker when a denominator factor is 0."""

    def __init__(self, pole: bool, value=None):
        self.pole = pole
        self.value = None if pole else value

    def inverse(self):
        """1/L, with 1/pole = 0 exactly."""
        return Fraction(0) if self.pole else _inv(self.value)

    def __eq__(self, other):
        if isinstance(other, LValue):
            return self.pole == other.pole and self.value == other.value
        if self.pole:
            return False
        return self.value == other

    def __repr__(self):
        return "LValue(pole)" if self.pole else f"LValue({self.value!r})"


def _half_integer(s) -> Fraction:
    s = Fraction(s)
    if (2 * s).denominator != 1:
        raise UnsupportedError(f"s = {s} is not a half-integer")
    return s


def local_L(rep: LocalRepCase, char: LocalCharCase, s) -> LValue:
    """The displayed Euler factor of the Steinberg twist at a half-integer s.

    Split:    [(1 -+ chi(w) q^(-s-1/2)) (1 -+ chi(w)^-1 q^(-s-1/2))]^-1
    Inert:    (1 - q^(-2s-1))^-1
    Ramified: (1 -+ chi(w) q^(-s-1/2))^-1

    with the upper sign for the '+' twist.  Ramified characters have no
    closed form here; use generic L-data for those.
    """
    if rep.kind == GENERIC:
        raise UnsupportedError(
            "the generic kind carries supplied L-values; no closed form")
    if char.conductor != 0:
        raise UnsupportedError(
            "closed-form factors need an unramified character; use generic "
            "L-data for ramified twists")
    s = _half_integer(s)
    q = Fraction(char.q)
    if char.torus == INERT:
        u = -2 * s - 1
        den = 1 - q ** int(u)
        return LValue(True) if den == 0 else LValue(False, 1 / den)
    t = -s - Fraction(1, 2)
    if t.denominator != 1:
        raise UnsupportedError(
            f"q^(-s-1/2) is not an integral power of q at s = {s}")
    qt = q ** int(t)
    sigma = rep.sign
    f1 = 1 - sigma * char.chi_omega * qt
    den = f1 if char.torus == RAMIFIED else \
        f1 * (1 - sigma * _inv(char.chi_omega) * qt)
    return LValue(True) if _is_zero(den) else LValue(False, _inv(den))


def epsilon_sq(rep: LocalRepCase, char: LocalCharCase):
    """The squared epsilon factor, by the three-case rule (exact)."""
    if rep.kind == GENERIC:
        return rep.l_ad / rep.l_half
    if char.conductor > 0:
        # the local chi-factor of a ramified character is 1
        return Fraction(char.q) ** char.conductor
    # L(-1/2)^-1 written out directly: the denominator product at s = -1/2,
    # where q^(-s-1/2) = 1
    if char.torus == INERT:
        return Fraction(0)
    sigma = rep.sign
    f1 = 1 - sigma * char.chi_omega
    if char.torus == RAMIFIED:
        return f1
    return f1 * (1 - sigma * _inv(char.chi_omega))


def exceptional_zero(rep: LocalRepCase, char: LocalCharCase) -> int:
    """1 when the squared epsilon factor vanishes (order contribution), else 0.

    Happens exactly for Steinberg twists by an unramified character when the
    torus is inert, or when chi(omega) equals the Steinberg sign on a split
    or ramified torus.
    """
    if rep.kind == GENERIC:
        return 0
    if char.conductor != 0:
        return 0
    if char.torus == INERT:
        return 1
    return 1 if char.chi_omega == rep.sign else 0


def alpha_ordinary_unit(q: int) -> Fraction:
    """q^-1 (1 + q^-1) / (1 - q^-1)^3, the ordinary local unit."""
    if not isinstance(q, int) or q < 2:
        raise InstanceError(f"residue cardinality {q!r} must be >= 2")
    qi = Fraction(1, q)
    return qi * (1 + qi) / (1 - qi) ** 3


def case_table(q: int = 5) -> List[dict]:
    """All Steinberg kind x torus x chi(omega)-sign rows at s in {-1/2, 1/2}.

    The inert rows repeat across the two signs: the inert factor does not
    see chi(omega).
    """
    rows = []
    for kind in (STEINBERG_PLUS, STEINBERG_MINUS):
        rep = LocalRepCase(kind)
        for torus in (SPLIT, INERT, RAMIFIED):
            for co in (1, -1):
                char = LocalCharCase(torus, chi_omega=co, q=q)
                eps = epsilon_sq(rep, char)
                for s in (Fraction(-1, 2), Fraction(1, 2)):
                    lv = local_L(rep, char, s)
                    rows.append({
                        "kind": kind, "torus": torus, "chi_omega": co,
                        "s": s, "pole": lv.pole, "L": lv.value,
                        "eps_sq": eps,
                        "exceptional": exceptional_zero(rep, char)})
    return rows
