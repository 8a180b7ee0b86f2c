"""Shared oracles for the test suite, kept deliberately independent of the
library's own construction paths (brute force, closed forms, simulation)."""

import itertools
from fractions import Fraction

from multislice.slices import SliceSpec, enumerate_slice, multinomial


def odlsz_exhaustive_row(a: bytes, s: int) -> dict[bytes, Fraction]:
    """Exact one-step distribution of the letter-randomizing walk from ``a``,
    by enumerating every alignment choice and every added word."""
    n = len(a)
    m = n // s
    positions = [[i for i, v in enumerate(a) if v == j] for j in range(s)]
    row: dict[bytes, int] = {}
    total = 0
    for maps in itertools.product(itertools.permutations(range(m)), repeat=s):
        for y in itertools.product(range(s), repeat=m):
            b = bytearray(n)
            for j in range(s):
                for t, i in enumerate(positions[j]):
                    b[i] = (y[maps[j][t]] + j) % s
            key = bytes(b)
            row[key] = row.get(key, 0) + 1
            total += 1
    return {k: Fraction(v, total) for k, v in row.items()}


def identification_exhaustive_joint(s: int, k: int) -> dict[tuple[bytes, bytes], Fraction]:
    """Exact joint law of (x_tau(a), x_tau(b)) for independent uniform points
    a, b of the small balanced slice and a uniform s-to-1 identification tau.

    An s-to-1 map tau : [s^2 k] -> [sk] is encoded as a word of length s^2*k
    over an alphabet of size sk in which every letter occurs exactly s times.
    """
    big_n = s * s * k
    small = SliceSpec.balanced(s, s * k)
    taus = enumerate_slice(SliceSpec(s * k, big_n, (s,) * (s * k)))
    small_points = enumerate_slice(small)
    joint: dict[tuple[bytes, bytes], int] = {}
    for tau in taus:
        for a in small_points:
            ua = bytes(a[tau[i]] for i in range(big_n))
            for b in small_points:
                vb = bytes(b[tau[i]] for i in range(big_n))
                joint[(ua, vb)] = joint.get((ua, vb), 0) + 1
    total = len(taus) * len(small_points) ** 2
    return {key: Fraction(c, total) for key, c in joint.items()}


def marginal_closed_form(spec: SliceSpec, delta, a: bytes, T, z) -> Fraction:
    """Closed-form row marginal of a distance walk: the probability that one
    step from ``a`` reads ``z`` on the coordinates ``T`` is a product over
    letter classes of multivariate hypergeometric terms."""
    m = spec.m
    s = spec.s
    num = 1
    den = 1
    for i in range(s):
        t_i = [t for t in T if a[t] == i]
        e = [0] * s
        for t, zt in zip(T, z):
            if a[t] == i:
                e[zt] += 1
        p = delta[i]
        num *= multinomial(m - len(t_i), [p[j] - e[j] for j in range(s)])
        den *= multinomial(m, list(p))
    return Fraction(num, den)


def closed_form_epsilon(spec: SliceSpec, delta, rows) -> Fraction:
    """Worst statistical distance over the given rows and all <=2-subsets,
    from the closed-form marginals."""
    s = spec.s
    worst = Fraction(0)
    subsets = [
        T
        for size in (1, 2)
        for T in itertools.combinations(range(spec.n), size)
    ]
    for a in rows:
        for T in subsets:
            u = Fraction(1, s ** len(T))
            sd = Fraction(0)
            for z in itertools.product(range(s), repeat=len(T)):
                sd += abs(marginal_closed_form(spec, delta, a, T, z) - u)
            worst = max(worst, sd / 2)
    return worst


def doubly_stochastic_profiles(s: int, m: int):
    """All s x s non-negative integer matrices with every row and column sum
    equal to m (the realizable distance profiles on the balanced slice)."""
    rows = []

    def compositions(total, parts):
        if parts == 1:
            yield (total,)
            return
        for v in range(total + 1):
            for rest in compositions(total - v, parts - 1):
                yield (v,) + rest

    all_rows = list(compositions(m, s))

    out = []

    def rec(chosen, col_left):
        if len(chosen) == s:
            if all(c == 0 for c in col_left):
                out.append(tuple(chosen))
            return
        for row in all_rows:
            if all(v <= c for v, c in zip(row, col_left)):
                rec(chosen + [row], [c - v for c, v in zip(col_left, row)])

    rec([], [m] * s)
    return out
