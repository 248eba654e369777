"""Canonical row normal form for modules over Z/p^N.

Over a chain ring, plain row echelon is not enough: the span of (2, 1) over
Z/8 contains (0, 4) = 4*(2, 1), but no echelon row starts at the second
column.  The normal form here appends the "shadow" multiple p^(N-e) * row for
every pivot p^e and re-echelons, so that every vector of the row module whose
first nonzero entry sits at column c is reachable from rows with pivot column
>= c.  That makes the reduction residual canonical: residual zero is
equivalent to membership.

Rows are tuples of ints in [0, M).  Nothing here ever divides by p; pivots
are normalized to exactly p^e by a unit.
"""

from __future__ import annotations

from typing import Iterable, Sequence, Tuple

from .rings import ResidueRing

Row = Tuple[int, ...]


def howell_form(R: ResidueRing, rows: Iterable[Sequence[int]]) -> Tuple[Row, ...]:
    """Canonical generating set (Howell form) of the row module of `rows`.

    Pivot columns strictly increase; each pivot entry is exactly p^e; entries
    above a pivot are reduced mod p^e; entries below are zero.  Two inputs
    span the same module iff their forms are equal.
    """
    M, p = R.M, R.p
    work = []
    ncols = None
    for r in rows:
        if ncols is None:
            ncols = len(r)
        elif len(r) != ncols:
            raise ValueError("ragged matrix")
        rr = [x % M for x in r]
        if any(rr):
            work.append(rr)
    if not work:
        return ()
    result = []
    for c in range(ncols):
        cand = [r for r in work if r[c] != 0]
        rest = [r for r in work if r[c] == 0]
        if cand:
            e_min, k_min = None, None
            for k, r in enumerate(cand):
                e = R.val(r[c])
                if e_min is None or e < e_min:
                    e_min, k_min = e, k
            piv = cand.pop(k_min)
            u_inv = R.inv(R.unit_part(piv[c]))
            piv = [(x * u_inv) % M for x in piv]
            pe = p ** e_min
            for r in cand:
                q = r[c] // pe  # exact: val(r[c]) >= e_min
                rr = [(x - q * y) % M for x, y in zip(r, piv)]
                if any(rr):
                    rest.append(rr)
            shadow = [(x * (M // pe)) % M for x in piv]
            if any(shadow):
                rest.append(shadow)
            result.append(piv)
        work = rest
    # entries above each pivot go to their residue mod p^e
    pivots = []
    for r in result:
        c = next(i for i, x in enumerate(r) if x != 0)
        pivots.append((c, p ** R.val(r[c])))
    for j in range(len(result)):
        cj, pe = pivots[j]
        for i in range(j):
            q = result[i][cj] // pe
            if q:
                result[i] = [(x - q * y) % M
                             for x, y in zip(result[i], result[j])]
    return tuple(tuple(r) for r in result)


def reduce_vector(R: ResidueRing, form: Sequence[Row], v: Sequence[int]) -> Row:
    """Canonical residual of v modulo the row module given by a Howell form.

    The residual is zero exactly when v lies in the module, and depends only
    on the coset of v.
    """
    M, p = R.M, R.p
    w = [x % M for x in v]
    for row in form:
        c = next(i for i, x in enumerate(row) if x != 0)
        pe = p ** R.val(row[c])
        q = w[c] // pe
        if q:
            w = [(x - q * y) % M for x, y in zip(w, row)]
    return tuple(w)


def member(R: ResidueRing, form: Sequence[Row], v: Sequence[int]) -> bool:
    return not any(reduce_vector(R, form, v))


def module_order(R: ResidueRing, form: Sequence[Row]) -> int:
    """Number of elements of the row module: product over pivots of p^(N-e)."""
    n = 1
    for row in form:
        c = next(i for i, x in enumerate(row) if x != 0)
        n *= R.p ** (R.N - R.val(row[c]))
    return n
