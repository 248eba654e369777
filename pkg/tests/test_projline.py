"""Disc covers, boundary measures, Moebius action, and boundary integrals."""

import math
import random

import pytest

from padicgz.errors import DepthError, MeasureFormatError
from padicgz.padic import PrimeContext, QuadContext, val_K
from padicgz.projline import (BoundaryMeasure, DiscAddress, FixedPair,
                              MoebiusMap, act, children, cover, dipole,
                              disc_bound, mult_integral, ord_cocycle,
                              ord_component_check, phi1_eval, phibar1_eval,
                              pushforward_split, pushforward_to_torus,
                              sample_point, z_nonsplit, z_split,
                              z_split_weight)

C5 = PrimeContext(5, 12)
C3 = PrimeContext(3, 20)


def rand_measure(ctx, depth, rng, density=0.4, total_zero=False):
    leaves = {}
    for addr in cover(ctx, depth):
        if rng.random() < density:
            leaves[(addr.chart, addr.center)] = rng.randrange(-5, 6)
    if total_zero:
        t = sum(leaves.values())
        leaves[("std", 0)] = leaves.get(("std", 0), 0) - t
    return BoundaryMeasure(ctx, depth, leaves)


def rand_unimod(rng):
    m = MoebiusMap(1, 0, 0, 1)
    for _ in range(rng.randrange(1, 4)):
        v = rng.randrange(-2, 3)
        m = m.compose(MoebiusMap(1, v, 0, 1) if rng.random() < 0.5
                      else MoebiusMap(1, 0, v, 1))
    return m


# --- covers ---------------------------------------------------------------

def test_cover_counts():
    assert len(cover(C5, 0)) == 2
    assert len(cover(C5, 1)) == 6
    assert len(cover(C5, 2)) == 30  # 25 std + 5 inf
    c2 = PrimeContext(2, 10)
    assert len(cover(c2, 3)) == 12


def test_children_partition_next_level():
    seen = []
    for addr in cover(C3, 2):
        seen.extend(children(C3, addr))
    assert sorted(seen, key=lambda a: (a.chart, a.center)) == \
        sorted(cover(C3, 3), key=lambda a: (a.chart, a.center))


def test_inf_root_single_child():
    kids = children(C5, DiscAddress("inf", 0, 0))
    assert kids == [DiscAddress("inf", 1, 0)]


def test_cover_guard():
    big = PrimeContext(7, 4)
    with pytest.raises(DepthError):
        cover(big, 12)


def test_sample_refinement_stable():
    # the child disc containing a sample keeps that sample as its own
    for c in (0, 1, 7, 23):
        _, s2 = sample_point(C5, DiscAddress("std", 2, c))
        child = s2.residue(3) if not s2.is_zero else 0
        _, s3 = sample_point(C5, DiscAddress("std", 3, child))
        assert s2 == s3


def test_sample_inf_root_is_zero():
    kind, s = sample_point(C5, DiscAddress("inf", 0, 0))
    assert kind == "y" and s.is_zero


# --- measures -------------------------------------------------------------

def test_measure_additivity_all_levels():
    rng = random.Random(11)
    mu = rand_measure(C3, 3, rng)
    for d in range(3):
        for addr in cover(C3, d):
            kids = children(C3, addr)
            assert mu.measure_of(addr) == sum(mu.measure_of(k) for k in kids)


def test_measure_rejects_noninteger():
    with pytest.raises(MeasureFormatError) as ei:
        BoundaryMeasure(C5, 1, {("std", 0): 1.5})
    assert ei.value.invariant == "integrality"


def test_measure_rejects_bad_inf_center():
    with pytest.raises(ValueError):
        BoundaryMeasure(C5, 2, {("inf", 3): 1})


def test_measure_too_deep_query():
    mu = BoundaryMeasure(C5, 1, {("std", 0): 1})
    with pytest.raises(DepthError):
        mu.measure_of(DiscAddress("std", 2, 0))


# --- Moebius action -------------------------------------------------------

def test_act_translation():
    mu = BoundaryMeasure(C5, 2, {("std", 7): 3, ("inf", 5): -2})
    out = act(MoebiusMap(1, 1, 0, 1), mu)
    assert out.leaves == {("std", 8): 3, ("inf", 5): -2}


def test_act_inversion():
    mu = BoundaryMeasure(C5, 2, {("std", 7): 3, ("inf", 5): -2, ("std", 0): 4})
    out = act(MoebiusMap(0, 1, 1, 0), mu)
    # 7^-1 = 18 mod 25; the disc at 0 swaps with the inf branch
    assert out.leaves == {("std", 18): 3, ("std", 5): -2, ("inf", 0): 4}


def test_act_determinant_depth_loss():
    mu = BoundaryMeasure(C5, 3, {("std", 50): 2, ("std", 1): 7,
                                 ("inf", 0): 1, ("std", 30): -4})
    out = act(MoebiusMap(1, 0, 0, 5), mu)  # x -> x/5
    assert out.maxdepth == 2
    assert out.leaves == {("std", 10): 2, ("std", 6): -4,
                          ("inf", 0): 1, ("inf", 5): 7}
    assert out.total == mu.total


def test_act_depth_exhaustion():
    mu = BoundaryMeasure(C5, 2, {("std", 1): 1})
    with pytest.raises(DepthError):
        act(MoebiusMap(1, 0, 0, 25), mu)


def test_act_depth_zero():
    mu = BoundaryMeasure(C5, 0, {("std", 0): 2, ("inf", 0): 5})
    out = act(MoebiusMap(1, 3, 0, 1), mu)  # translation keeps both roots
    assert out.leaves == mu.leaves
    with pytest.raises(DepthError):
        act(MoebiusMap(0, 1, 1, 0), mu)  # inversion mixes the roots


def test_act_composition():
    rng = random.Random(23)
    for _ in range(15):
        mu = rand_measure(C3, 3, rng)
        g1, g2 = rand_unimod(rng), rand_unimod(rng)
        lhs = act(g1, act(g2, mu))
        rhs = act(g1.compose(g2), mu)
        assert lhs == rhs


def test_act_preserves_total():
    rng = random.Random(29)
    for _ in range(10):
        mu = rand_measure(C5, 2, rng)
        g = rand_unimod(rng)
        assert act(g, mu).total == mu.total


# --- multiplicative integral ----------------------------------------------

def test_dipole_integral_closed_form():
    t1, t2 = C5.from_int(2), C5.from_int(3)
    expect = C5.from_rational(3, 4)  # ((0-3)/(0-2)) * ((1-2)/(1-3))
    for d in range(1, 5):
        r = mult_integral(dipole(C5, d), t1, t2)
        assert r.value == expect
        assert r.effective == d
        assert r.depth == d


def test_dipole_integral_early_stop():
    r = mult_integral(dipole(C5, 6), C5.from_int(2), C5.from_int(3), target=3)
    assert r.converged and r.depth == 3 and r.effective == 3


def test_empty_measure_integral():
    mu = BoundaryMeasure(C5, 2, {})
    r = mult_integral(mu, C5.from_int(2), C5.from_int(3))
    assert r.value == C5.one() and r.effective == math.inf


def test_integral_refinement_consistency():
    # nonsplit endpoints stay off the boundary, so every disc certifies
    rng = random.Random(37)
    q = QuadContext.inert(C3)
    t1 = q.sqrt_delta()
    t2 = -t1
    for _ in range(10):
        mu = rand_measure(C3, 4, rng)
        coarse = BoundaryMeasure(C3, 3, mu.level_table(3))
        r3 = mult_integral(coarse, t1, t2)
        r4 = mult_integral(mu, t1, t2)
        assert r3.effective >= 3
        assert val_K(r4.value / r3.value - q.one()) >= q.e * r3.effective


def test_integral_equivariance_total_zero():
    rng = random.Random(41)
    q = QuadContext.inert(C3)
    t1 = q.sqrt_delta()
    t2 = -t1
    hits = 0
    for _ in range(12):
        mu = rand_measure(C3, 4, rng, total_zero=True)
        g = rand_unimod(rng)
        adj = g.adjugate()
        lhs = mult_integral(act(g, mu), t1, t2)
        rhs = mult_integral(mu, adj.apply_scalar(t1), adj.apply_scalar(t2))
        k = min(lhs.effective, rhs.effective)
        if k >= 1:
            hits += 1
            assert val_K(lhs.value / rhs.value - q.one()) >= q.e * k
    assert hits >= 8  # the congruence must actually bite


def test_integral_pole_on_support_fails():
    mu = BoundaryMeasure(C5, 1, {("std", 0): 1, ("std", 2): -1})
    with pytest.raises(DepthError):
        mult_integral(mu, C5.from_int(3), C5.zero())  # tau2 = 0 = sample


# --- pushforwards ---------------------------------------------------------

def test_pushforward_torus_frozen():
    ctx = PrimeContext(3, 8)
    q = QuadContext.inert(ctx)
    assert q.delta == 2
    fp = FixedPair(q.sqrt_delta())
    out = pushforward_to_torus(dipole(ctx, 2), fp, 1)
    # beta(0) = -1 -> (2,0); beta(1) = -3-2*sqrt2 -> (0,1)
    assert out == {(2, 0): 1, (0, 1): -1}


def test_pushforward_torus_conservation():
    rng = random.Random(43)
    ctx = PrimeContext(3, 8)
    fp = FixedPair(QuadContext.inert(ctx).sqrt_delta())
    for _ in range(6):
        mu = rand_measure(ctx, 3, rng)
        out = pushforward_to_torus(mu, fp, 1)
        assert sum(out.values()) == mu.total


def test_pushforward_torus_additive():
    rng = random.Random(47)
    ctx = PrimeContext(3, 8)
    fp = FixedPair(QuadContext.inert(ctx).sqrt_delta())
    a = rand_measure(ctx, 3, rng)
    b = rand_measure(ctx, 3, rng)
    pa = pushforward_to_torus(a, fp, 1)
    pb = pushforward_to_torus(b, fp, 1)
    pc = pushforward_to_torus(a + b, fp, 1)
    keys = set(pa) | set(pb) | set(pc)
    for k in keys:
        assert pc.get(k, 0) == pa.get(k, 0) + pb.get(k, 0)


def test_pushforward_insufficient_depth():
    ctx = PrimeContext(3, 8)
    fp = FixedPair(QuadContext.inert(ctx).sqrt_delta())
    mu = BoundaryMeasure(ctx, 1, {("std", 0): 1})
    with pytest.raises(DepthError, match="insufficient depth"):
        pushforward_to_torus(mu, fp, 2)


def test_pushforward_split_frozen():
    fp = FixedPair(C5.from_int(0), C5.from_int(1))
    mu = BoundaryMeasure(C5, 1, {("std", 2): 1, ("std", 3): 2, ("inf", 0): -3})
    out = pushforward_split(mu, fp, unit_level=1)
    # beta = (x-1)/x: residues 1/2 -> 3, 2/3 -> 4, and 1 at infinity
    assert out == {(0, 3): 1, (0, 4): 2, (0, 1): -3}


def test_pushforward_split_window_violation():
    fp = FixedPair(C5.from_int(0), C5.from_int(1))
    mu = BoundaryMeasure(C5, 1, {("std", 2): 1})
    with pytest.raises(ValueError):
        pushforward_split(mu, fp, window=(3, 5))


# --- ordinary cocycle (split primes) --------------------------------------

def test_phi1_identity_and_diagonal():
    fp = FixedPair(C5.from_int(0), C5.from_int(1))
    assert phi1_eval(fp, (1, 0, 0, 1)) == -1
    assert phi1_eval(fp, (1, 0, 0, 5)) == 0
    assert phi1_eval(fp, (5, 0, 0, 1)) == -1
    assert phi1_eval(fp, (1, 0, 0, 25)) == 1
    assert phi1_eval(fp, (1, 0, 5, 1)) == -1


def test_phi1_degenerate_matrix():
    fp = FixedPair(C5.from_int(0), C5.from_int(1))
    with pytest.raises(ValueError):
        phi1_eval(fp, (1, 0, 1, 0))  # d + tau*c = 0


def test_phibar1_values():
    fp = FixedPair(C5.from_int(0), C5.from_int(1))
    assert phibar1_eval(fp, (1, 0, 0, 1)) == C5.one()
    fp2 = FixedPair(C5.from_int(5), C5.from_int(1))
    assert phibar1_eval(fp2, (1, 0, 1, 0)) == C5.one()  # picks w1 = 1


def test_ord_cocycle_values():
    fp = FixedPair(C5.from_int(0), C5.from_int(1))
    x = C5.from_int(3)  # v(beta) = 0
    assert ord_cocycle(fp, 1, x) == 1
    assert ord_cocycle(fp, 3, x) == 1
    assert ord_cocycle(fp, -2, x) == -2
    y = C5.from_int(25)  # v(beta) = -2
    assert ord_cocycle(fp, 1, y) == 0
    assert ord_cocycle(fp, -3, y) == -2


def test_ord_component_check_frozen():
    fp = FixedPair(C5.from_int(0), C5.from_int(1))
    mu = BoundaryMeasure(C5, 2, {("std", 5): 2, ("std", 6): -1,
                                 ("std", 2): 3, ("inf", 0): -4})
    res = ord_component_check(fp, mu, 2)
    assert res["passed"] and res["lhs"] == -3 and res["rhs"] == -3
    assert res["shells"] == {-1: 2, 0: -1, 1: -1}
    res2 = ord_component_check(fp, mu, -1)
    assert res2["passed"] and res2["lhs"] == 0


def test_ord_component_check_random():
    rng = random.Random(53)
    fp = FixedPair(C5.from_int(0), C5.from_int(1))
    safe = [a for a in cover(C5, 3)
            if (b := disc_bound(C5, a, fp.tau, fp.taubar, 1)) is not None
            and b >= 1]
    assert len(safe) > 20
    for t_val in (1, 2, 3, -1, -2):
        leaves = {(a.chart, a.center): rng.randrange(-4, 5)
                  for a in rng.sample(safe, 12)}
        mu = BoundaryMeasure(C5, 3, leaves)
        assert ord_component_check(fp, mu, t_val)["passed"]


# --- local condition windows ----------------------------------------------

def test_z_windows():
    z = z_split(3)
    assert z["window"] == (0, 3) and z["sign"] == 1
    assert [z_split_weight(z, w) for w in range(-1, 4)] == [0, 1, 1, 1, 0]
    zneg = z_split(-2)
    assert zneg["window"] == (-2, 0) and zneg["sign"] == -1
    assert z_nonsplit()["weight"] == 1
    with pytest.raises(ValueError):
        z_split(0)


def test_z_partition_of_unity():
    # sum_n t^n z(t) telescopes to 1_O at -inf minus at +inf: sign of v(t)
    for t in (1, 2, 3, -1, -2):
        z = z_split(t)
        want = 1 if t > 0 else -1
        for w in range(-6, 7):
            assert sum(z_split_weight(z, w - n * t) for n in range(-8, 9)) == want


# --- Moebius on scalars ---------------------------------------------------

def test_moebius_apply_scalar():
    g = MoebiusMap(2, 1, 1, 1)
    assert g.apply_scalar(C5.from_int(3)) == C5.from_rational(7, 4)
    q = QuadContext.inert(PrimeContext(3, 10))
    tau = q.sqrt_delta()
    assert g.apply_scalar(tau) * (tau + 1) == 2 * tau + 1


def test_moebius_content_removed():
    g = MoebiusMap(10, 0, 0, 10)
    assert (g.a, g.b, g.c, g.d) == (1, 0, 0, 1)
