import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from multislice.juntas import grid_points
from multislice.seeding import derive_rng
from multislice.snf import (
    invariant_factors,
    smith_decomposition,
    solve_integer,
    unimodular_certificate,
)
from multislice.subgrids import (
    IdentificationMap,
    SpannedSubgrid,
    SubgridMap,
    random_identification,
    random_subgrid,
    sampling_deviation,
    span_subgrid,
)


def test_embed_matches_definition():
    sub = SubgridMap(
        s=3, n=4, k=2,
        h=(0, 1, 1, 0),
        perms=((0, 1, 2), (2, 0, 1), (1, 2, 0), (0, 2, 1)),
    )
    y = bytes([2, 1])
    assert sub.embed(y) == bytes([sub.perms[i][y[sub.h[i]]] for i in range(4)])
    assert sub.anchor == bytes([0, 2, 1, 0])
    # embed_all rows agree with pointwise embedding, in grid order
    rows = [bytes(r) for r in sub.embed_all()]
    assert rows == [sub.embed(y) for y in grid_points(3, 2)]


def test_subgrid_validation():
    with pytest.raises(ValueError):
        SubgridMap(2, 2, 1, h=(0, 1), perms=((0, 1), (0, 1)))
    with pytest.raises(ValueError):
        SubgridMap(2, 2, 1, h=(0, 0), perms=((0, 0), (0, 1)))


def test_random_subgrid_through_anchor():
    rng = derive_rng(21, "anchored")
    a = bytes([2, 0, 1, 1, 2, 0])
    for _ in range(20):
        sub = random_subgrid(3, 6, 3, rng, anchor=a)
        assert sub.embed(bytes(3)) == a
        assert sub.anchor == a


def test_identification_fibers():
    with pytest.raises(ValueError):
        IdentificationMap(2, 2, (0, 0, 0, 1))
    ident = IdentificationMap(2, 2, (1, 0, 0, 1))
    assert ident.lift(bytes([1, 0])) == bytes([0, 1, 1, 0])
    rng = derive_rng(21, "ident")
    for _ in range(20):
        t = random_identification(3, 4, rng)
        assert sorted(t.tau).count(2) == 3


@pytest.mark.parametrize("s,k,n", [(2, 2, 8), (2, 3, 6), (3, 2, 5)])
def test_witness_embeds_to_b_exhaustively(s, k, n):
    """x_{h',Pi}(w) = b for every ambient point b."""
    rng = derive_rng(22, "witness", s, k, n)
    for _ in range(3):
        base = random_subgrid(s, n, k, rng)
        sigma = tuple(int(v) for v in rng.permutation(s * k))
        for b in grid_points(s, n):
            span = SpannedSubgrid(base, b, sigma)
            w = span.witness
            # balanced: every letter fills exactly k positions
            assert all(w.count(u) == k for u in range(s))
            assert span.as_subgrid.embed(w) == b


def test_span_refines_base_partition():
    rng = derive_rng(23, "refine")
    for _ in range(25):
        base = random_subgrid(3, 7, 2, rng)
        b = bytes(int(v) for v in rng.integers(0, 3, size=7))
        span = span_subgrid(base, b, rng)
        for i, j in itertools.combinations(range(7), 2):
            if span.h_prime[i] == span.h_prime[j]:
                assert base.h[i] == base.h[j]


def test_base_contained_in_span():
    """Lifting y along the induced identification lands on the same ambient
    point, so every base-subgrid point lies in the spanned subgrid."""
    rng = derive_rng(24, "contain")
    for _ in range(10):
        base = random_subgrid(2, 6, 2, rng)
        b = bytes(int(v) for v in rng.integers(0, 2, size=6))
        span = span_subgrid(base, b, rng)
        tau = span.induced_tau
        for y in grid_points(2, 2):
            assert span.as_subgrid.embed(tau.lift(y)) == base.embed(y)


def test_induced_identification_is_uniform():
    """Over all sigma in Sym_6 (s=2, k=3), the collapse tau hits each of the
    6!/(2!^3) = 90 two-to-one maps equally often."""
    base = SubgridMap(2, 3, 3, h=(0, 1, 2), perms=((0, 1),) * 3)
    b = bytes([0, 1, 0])
    counts = Counter()
    for sigma in itertools.permutations(range(6)):
        span = SpannedSubgrid(base, b, sigma)
        counts[span.induced_tau.tau] += 1
    assert len(counts) == 90
    assert set(counts.values()) == {720 // 90}


@given(st.integers(0, 2**16 - 1), st.data())
@settings(max_examples=30, deadline=None)
def test_embedded_coordinate_depends_only_on_its_cell(seed, data):
    rng = np.random.default_rng(seed)
    sub = random_subgrid(2, 5, 3, rng)
    y = bytearray(data.draw(st.binary(min_size=3, max_size=3)))
    for t in range(3):
        y[t] %= 2
    x = sub.embed(bytes(y))
    flip = data.draw(st.integers(0, 2))
    y2 = bytearray(y)
    y2[flip] ^= 1
    x2 = sub.embed(bytes(y2))
    for i in range(5):
        if sub.h[i] != flip:
            assert x[i] == x2[i]


def test_sampling_deviation_full_grid_is_exact():
    # k = n with h a bijection reproduces the whole grid: zero deviation
    sub = SubgridMap(2, 3, 3, h=(0, 1, 2), perms=((0, 1), (1, 0), (0, 1)))
    rng = derive_rng(25, "dev")
    member = rng.random(8) < 0.5
    assert sampling_deviation(sub, member) == 0.0


def test_sampling_deviation_detects_collapse():
    # all coordinates hashed to one cell: the subgrid only sees two points
    sub = SubgridMap(2, 3, 1, h=(0, 0, 0), perms=((0, 1),) * 3)
    member = np.zeros(8, dtype=bool)
    member[0] = True  # T = {000}, density 1/8, subgrid frequency 1/2
    assert sampling_deviation(sub, member) == pytest.approx(3 / 8)


# --- integer Smith form utilities used by the correction stack ---


def test_smith_decomposition_properties():
    rng = derive_rng(26, "snf")
    for _ in range(60):
        r = int(rng.integers(1, 6))
        c = int(rng.integers(1, 6))
        a = rng.integers(-8, 9, size=(r, c)).tolist()
        u, d, v = smith_decomposition(a)
        assert (np.array(u) @ np.array(a) @ np.array(v)).tolist() == d
        diag = [d[i][i] for i in range(min(r, c))]
        for x, y in zip(diag, diag[1:]):
            if x:
                assert y % x == 0
            else:
                assert y == 0
        for m in (u, v):
            det = round(np.linalg.det(np.array(m, dtype=float)))
            assert det in (1, -1)


def test_smith_against_sympy():
    from sympy import Matrix
    from sympy.matrices.normalforms import invariant_factors as sym_if

    rng = derive_rng(27, "snf-oracle")
    for _ in range(25):
        a = rng.integers(-5, 6, size=(4, 4)).tolist()
        mine = invariant_factors(a)
        theirs = tuple(int(x) for x in sym_if(Matrix(a)) if x != 0)
        assert mine == theirs


def test_solve_integer_round_trip():
    rng = derive_rng(28, "solve")
    for _ in range(40):
        r = int(rng.integers(1, 6))
        c = int(rng.integers(1, 6))
        a = rng.integers(-6, 7, size=(r, c)).tolist()
        x = rng.integers(-5, 6, size=c).tolist()
        y = (np.array(a) @ np.array(x)).tolist()
        sol = solve_integer(a, y)
        assert sol is not None
        assert (np.array(a) @ np.array(sol)).tolist() == y
    assert solve_integer([[2, 0], [0, 2]], [1, 0]) is None
    assert solve_integer([[1, 0], [0, 0]], [3, 1]) is None


def test_unimodular_certificate_examples():
    good = [[1, 1, 0, 0, 0], [1, 0, 1, 0, 0], [1, 0, 0, 1, 0],
            [1, 0, 0, 0, 1], [1, 1, 1, 0, 0]]
    assert unimodular_certificate(good)
    # doubled column: invariant factor 2 sneaks in
    assert not unimodular_certificate([[1, 0], [0, 2], [0, 0]])
    # rank deficient
    assert not unimodular_certificate([[1, 1], [1, 1]])
