import random

import pytest

from padicgz.howell import howell_form, member, module_order, reduce_vector
from padicgz.rings import ResidueRing

R8 = ResidueRing(2, 3)
R9 = ResidueRing(3, 2)
R81 = ResidueRing(3, 4)


def test_ring_basics():
    assert R8.M == 8
    assert R8.val(0) == 3
    assert R8.val(4) == 2
    assert R8.val(6) == 1
    assert R8.unit_part(6) == 3
    assert R8.inv(3) == 3  # 3*3 = 9 = 1 mod 8
    with pytest.raises(ZeroDivisionError):
        R8.inv(2)


def test_shadow_example():
    # span of (2,1) over Z/8 contains 4*(2,1) = (0,4); echelon alone misses it
    assert howell_form(R8, [[2, 1]]) == ((2, 1), (0, 4))


def test_shadow_membership():
    H = howell_form(R8, [[2, 1]])
    assert member(R8, H, (0, 4))
    assert reduce_vector(R8, H, (0, 4)) == (0, 0)
    assert not member(R8, H, (0, 2))
    assert not member(R8, H, (1, 0))


def test_above_pivot_reduction():
    assert howell_form(R9, [[1, 5], [0, 3]]) == ((1, 2), (0, 3))


def test_pivot_shape():
    rng = random.Random(7)
    for _ in range(25):
        rows = [[rng.randrange(81) for _ in range(5)] for _ in range(4)]
        H = howell_form(R81, rows)
        cols = []
        for r in H:
            c = next(i for i, x in enumerate(r) if x != 0)
            cols.append(c)
            e = R81.val(r[c])
            assert r[c] == 3 ** e  # pivot normalized to p^e exactly
            for rr in H:
                if rr is not r and next(i for i, x in enumerate(rr) if x) < c:
                    assert rr[c] < 3 ** e  # reduced above the pivot
        assert cols == sorted(cols) and len(set(cols)) == len(cols)


def test_canonical_under_row_operations():
    rng = random.Random(1234)
    for _ in range(20):
        rows = [[rng.randrange(81) for _ in range(5)] for _ in range(4)]
        H1 = howell_form(R81, rows)
        mixed = [list(r) for r in rows]
        for _ in range(12):
            op = rng.randrange(3)
            i, j = rng.sample(range(len(mixed)), 2)
            if op == 0:
                mixed[i], mixed[j] = mixed[j], mixed[i]
            elif op == 1:
                k = rng.randrange(81)
                mixed[i] = [(x + k * y) % 81 for x, y in zip(mixed[i], mixed[j])]
            else:
                u = rng.choice([1, 2, 4, 5, 7, 8, 10, 80])
                mixed[i] = [(x * u) % 81 for x in mixed[i]]
        assert howell_form(R81, mixed) == H1


def test_idempotent_and_self_membership():
    rng = random.Random(99)
    for _ in range(10):
        rows = [[rng.randrange(8) for _ in range(4)] for _ in range(3)]
        H = howell_form(R8, rows)
        assert howell_form(R8, H) == H
        for r in rows:
            assert member(R8, H, r)


def test_full_span_enumeration():
    # brute-force the whole row module and compare against member()
    rng = random.Random(5)
    for _ in range(6):
        rows = [[rng.randrange(8) for _ in range(2)] for _ in range(2)]
        H = howell_form(R8, rows)
        span = set()
        for k0 in range(8):
            for k1 in range(8):
                span.add(tuple((k0 * a + k1 * b) % 8
                               for a, b in zip(rows[0], rows[1])))
        for v0 in range(8):
            for v1 in range(8):
                assert member(R8, H, (v0, v1)) == ((v0, v1) in span)
        assert module_order(R8, H) == len(span)


def test_residual_is_coset_invariant():
    rng = random.Random(42)
    rows = [[rng.randrange(81) for _ in range(4)] for _ in range(3)]
    H = howell_form(R81, rows)
    for _ in range(30):
        v = [rng.randrange(81) for _ in range(4)]
        res = reduce_vector(R81, H, v)
        assert reduce_vector(R81, H, res) == res
        r = list(rng.choice(rows))
        shifted = [(x + y) % 81 for x, y in zip(v, r)]
        assert reduce_vector(R81, H, shifted) == res


def test_degenerate_inputs():
    assert howell_form(R8, []) == ()
    assert howell_form(R8, [[0, 0], [8, 16]]) == ()
    with pytest.raises(ValueError):
        howell_form(R8, [[1, 2], [1, 2, 3]])
    assert reduce_vector(R8, (), (3, 5)) == (3, 5)
    assert module_order(R8, ()) == 1
