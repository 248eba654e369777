"""Seeded random instance generator.

Instances are drawn so the exactness requirements hold by construction:
every local component has total mass zero and is retried until its
pushforward to the level-m quotient certifies and its multiplicative
integral is non-degenerate; rec tables are built from generator images, so
they are homomorphisms by construction; the Galois group is a product of
the class factor (where H and the characters live) and one small cyclic
factor per prime (where the rec images land), so the listed characters are
trivial on every rec image while staying nontrivial on H whenever the
class factor admits tame torsion.

Everything is driven by one random.Random(seed); identical arguments give
identical documents, and the canonical JSON writer makes the files
byte-identical.
"""

from __future__ import annotations

import math
import random
from typing import List, Optional, Sequence

from .errors import DepthError, InstanceError, PrecisionError
from .gz import GZInstance
from .padic import PrimeContext, QuadContext, torus_quotient
from .projline import BoundaryMeasure, FixedPair, mult_integral, \
    pushforward_to_torus
from .serialize import SCHEMA_VERSION

_MASSES = (-3, -2, -1, 1, 2, 3)


def _smallest_prime_factor(n: int) -> int:
    if n <= 1:
        return 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            return d
        d += 1
    return n


def _rec_factor_order(p0: int, quot) -> int:
    """Cyclic order for a prime's rec factor in the Galois group.

    The graded pieces I^r/I^(r+1) are p0-torsion, so a rec factor prime to
    p0 makes the comparison vacuous; prefer the p0-part of the quotient
    exponent (capped at p0^2) and fall back to the smallest prime factor
    when the quotient has no p0-part at all.
    """
    E = quot.exponent_lcm()
    n, a = E, 0
    while n % p0 == 0:
        n //= p0
        a += 1
    if a:
        return p0 ** min(a, 2)
    return _smallest_prime_factor(E)


def _cyclic_order(y: int, n: int) -> int:
    return n // math.gcd(y, n)


def _draw_leaves(rng: random.Random, ctx: PrimeContext, fp: FixedPair,
                 quot, m: int, depth: int) -> List[list]:
    """Leaf rows whose measure pushes forward and integrates cleanly."""
    p = ctx.p
    pn = p ** depth
    fallback = None
    for attempt in range(80):
        n = rng.randint(2, min(4, pn))
        centers = rng.sample(range(pn), n)
        leaves = {}
        for c in centers:
            chart = "std"
            if depth >= 1 and c % p == 0 and rng.random() < 0.2:
                chart = "inf"
            leaves[(chart, c)] = 0
        keys = sorted(leaves)
        if len(keys) < 2:
            continue
        masses = [rng.choice(_MASSES) for _ in range(len(keys) - 1)]
        last = -sum(masses)
        if last == 0:
            continue
        for k, w in zip(keys, masses + [last]):
            leaves[k] = w
        B = BoundaryMeasure(ctx, depth, leaves)
        try:
            nu = pushforward_to_torus(B, fp, m)
            got = mult_integral(B, fp.tau, fp.taubar)
            if got.effective < m:
                continue
            quot.reduce(got.value)
        except (DepthError, PrecisionError, ValueError):
            continue
        rows = sorted([ch, c, w] for (ch, c), w in leaves.items())
        if len([w for w in nu.values() if w != 0]) >= 2:
            return rows
        if fallback is None:
            fallback = rows
    if fallback is not None:
        return fallback
    raise InstanceError(
        "could not draw a certifiable local measure; widen the depth")


def _rec_images(rng: random.Random, gen_orders: Sequence[int],
                ell: int) -> List[int]:
    """One image in Z/ell per quotient generator, orders dividing, with at
    least one full-order image when the orders allow it."""
    images: List[int] = []
    for d in gen_orders:
        cands = [y for y in range(ell) if d % _cyclic_order(y, ell) == 0]
        images.append(rng.choice(cands))
    if ell > 1 and not any(_cyclic_order(y, ell) == ell for y in images):
        spots = [i for i, d in enumerate(gen_orders) if d % ell == 0]
        i = rng.choice(spots)
        images[i] = rng.choice([y for y in range(1, ell)
                                if _cyclic_order(y, ell) == ell])
    return images


def generate_instance(seed: int, primes: Sequence[int] = (3,), cl: int = 2,
                      depth: int = 3, N: int = 12, m: int = 1,
                      tensors: int = 1, torus: Optional[str] = None,
                      unit_index: Optional[int] = None,
                      eps_sq: Optional[Sequence] = None) -> dict:
    """Draw a valid instance document.

    primes: local residue characteristics of the nonsplit primes (the first
    one is the coefficient prime).  cl: class-transversal size.  torus
    forces 'inert' or 'ramified' -- one string for every prime, or a
    sequence with one entry per prime; default is a coin flip per prime.
    eps_sq: optional away-prime squared scalars, ints or (num, den) pairs.
    """
    primes = tuple(primes)
    if not primes:
        raise InstanceError("at least one prime is required")
    if len(primes) > 8:
        raise InstanceError("at most 8 nonsplit primes are supported")
    if not 1 <= cl <= 12:
        raise InstanceError("class size must be in 1..12")
    if not 1 <= depth <= 6:
        raise InstanceError("generator depth must be in 1..6")
    if not 6 <= N <= 64:
        raise InstanceError("working length must be in 6..64")
    if not 1 <= m <= 3:
        raise InstanceError("torus level must be in 1..3")
    if not 1 <= tensors <= 5:
        raise InstanceError("tensors per class must be in 1..5")
    if isinstance(torus, str) or torus is None:
        torus_by_prime = [torus] * len(primes)
    else:
        torus_by_prime = list(torus)
        if len(torus_by_prime) != len(primes):
            raise InstanceError("torus sequence must match the prime count")
    for t in torus_by_prime:
        if t not in (None, "inert", "ramified"):
            raise InstanceError("torus must be 'inert' or 'ramified'")
    rng = random.Random(seed)
    p0 = primes[0]
    try:
        PrimeContext(p0, N)
    except ValueError as e:
        raise InstanceError(str(e)) from None

    prime_rows = []
    ells: List[int] = []
    r = len(primes)
    for i, p in enumerate(primes):
        label = f"P{i + 1}"
        ctx = PrimeContext(p, N)
        kind = torus_by_prime[i] or rng.choice(("inert", "ramified"))
        if kind == "inert":
            variant = 0
            qctx = QuadContext.inert(ctx)
        else:
            variant = rng.choice((0, 1, 2) if p == 2 else (0, 1))
            qctx = QuadContext.ramified(ctx, variant)
        a = rng.randrange(p)
        b = 1 if p == 2 else rng.randrange(1, p)
        fp = FixedPair(qctx.from_pair(a, b))
        units = [u for u in range(1, p + 2) if u % p]
        q = p * rng.choice(units)
        d_i = max(depth, m + (1 if kind == "ramified" else 0))
        quot = torus_quotient(qctx, m)
        ell = _rec_factor_order(p0, quot)
        ells.append(ell)
        images = _rec_images(rng, quot.gen_orders, ell)
        rec_rows = []
        for el in quot.elements:
            exps = quot.coords[el]
            y = sum(e * img for e, img in zip(exps, images)) % ell
            g = [0] * (1 + r)
            g[1 + i] = y
            rec_rows.append([list(el), g])
        prime_rows.append({
            "label": label, "p": p, "torus": kind, "variant": variant,
            "mode": rng.choice(("steinberg+", "steinberg-")),
            "tau": [a, b], "q": q, "m": m, "depth": d_i,
            "rec": sorted(rec_rows),
            "_ctx": ctx, "_qctx": qctx, "_fp": fp, "_quot": quot,
            "_depth": d_i,
        })

    orders = [cl] + ells
    H_rows = [[1] + [0] * r] if cl > 1 else []
    rec_cl_rows = [[[x], [rng.randrange(cl)] + [0] * r] for x in range(cl)]

    measures = []
    for x in range(cl):
        count = rng.randint(1, tensors)
        row = []
        for _ in range(count):
            tensor = {}
            for pr in prime_rows:
                tensor[pr["label"]] = _draw_leaves(
                    rng, pr["_ctx"], pr["_fp"], pr["_quot"], m, pr["_depth"])
            row.append(tensor)
        measures.append(row)

    t = math.gcd(cl, 2 if p0 == 2 else p0 - 1)
    char_rows = [[j] + [0] * r for j in range(max(1, min(t, 4)))]

    k = unit_index
    if k is None:
        k = rng.choice([u for u in (1, 1, 2, 3) if u % p0])
    eps_rows = []
    for i, e in enumerate(eps_sq or ()):
        pair = [e, 1] if isinstance(e, int) else [int(e[0]), int(e[1])]
        eps_rows.append({"label": f"Q{i + 1}", "eps_sq": pair})

    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "gz-instance",
        "p": p0,
        "N": N,
        "primes": [{kk: v for kk, v in pr.items()
                    if not kk.startswith("_")} for pr in prime_rows],
        "class_model": {"orders": [cl], "pplus": [], "local": {},
                        "rec_cl": rec_cl_rows},
        "galois_model": {"orders": orders, "H": H_rows},
        "measures": measures,
        "characters": char_rows,
        "unit_indices": {"index": k},
    }
    if eps_rows:
        doc["eps_minus"] = eps_rows

    inst = GZInstance(doc)
    for chi in inst.verification_characters():
        inst.require_admissible(chi)
    return doc
