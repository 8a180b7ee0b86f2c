"""Multislices of a finite grid: points, enumeration, distances, symmetries.

A *grid* is the set of words ``S^n`` over an alphabet of ``s`` letters (always
``0..s-1`` here), and the multislice with counts ``(c_0, ..., c_{s-1})`` is the
subset of words in which letter ``sigma`` appears exactly ``c_sigma`` times.
The *balanced* multislice has every count equal to ``n/s``.

Points are stored as ``bytes`` objects: compact, hashable, and their built-in
comparison agrees with lexicographic order on the letters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .budget import check_capacity

Point = bytes


def multinomial(n: int, parts: Sequence[int]) -> int:
    """The multinomial coefficient n! / (parts_0! * ... * parts_{k-1}!).

    Returns 0 when some part is negative (the convention used throughout for
    "no arrangements"), and raises if the parts do not sum to ``n``.
    """
    if any(p < 0 for p in parts):
        return 0
    if sum(parts) != n:
        raise ValueError(f"parts {tuple(parts)} do not sum to {n}")
    out = 1
    rest = n
    for p in parts:
        out *= math.comb(rest, p)
        rest -= p
    return out


@dataclass(frozen=True)
class SliceSpec:
    """A multislice of the grid ``[s]^n`` given by its letter counts.

    Attributes:
        s: alphabet size (letters are 0..s-1).
        n: word length.
        counts: how many times each letter must appear; sums to ``n``.
    """

    s: int
    n: int
    counts: tuple[int, ...]

    def __post_init__(self):
        if self.s < 1:
            raise ValueError("alphabet size must be at least 1")
        if self.n < 0:
            raise ValueError("word length must be non-negative")
        if len(self.counts) != self.s:
            raise ValueError(f"expected {self.s} letter counts, got {len(self.counts)}")
        if any(c < 0 for c in self.counts):
            raise ValueError("letter counts must be non-negative")
        if sum(self.counts) != self.n:
            raise ValueError(f"counts {self.counts} do not sum to n={self.n}")

    @classmethod
    def balanced(cls, s: int, n: int) -> "SliceSpec":
        """The balanced multislice; requires ``s | n``."""
        if n % s != 0:
            raise ValueError(f"balanced slice needs s | n, got s={s}, n={n}")
        return cls(s=s, n=n, counts=(n // s,) * s)

    @property
    def is_balanced(self) -> bool:
        return len(set(self.counts)) <= 1

    @property
    def m(self) -> int:
        """Occurrences per letter on a balanced slice."""
        if not self.is_balanced:
            raise ValueError("m is only defined for balanced slices")
        return self.counts[0] if self.counts else 0

    def contains(self, x: Point) -> bool:
        return len(x) == self.n and letter_counts(x, self.s) == self.counts


def slice_size(spec: SliceSpec) -> int:
    """Number of points on the slice (a multinomial coefficient)."""
    return multinomial(spec.n, spec.counts)


@lru_cache(maxsize=None)
def enumerate_slice(spec: SliceSpec) -> tuple[Point, ...]:
    """All points of the slice in lexicographic order.

    The result is memoized per spec; callers must not mutate it (it is a tuple
    of immutable ``bytes`` for exactly that reason).
    """
    check_capacity(slice_size(spec) * max(spec.n, 1), "slice enumeration")
    out: list[Point] = []
    prefix = bytearray()
    counts = list(spec.counts)

    def rec() -> None:
        if len(prefix) == spec.n:
            out.append(bytes(prefix))
            return
        for sigma in range(spec.s):
            if counts[sigma]:
                counts[sigma] -= 1
                prefix.append(sigma)
                rec()
                prefix.pop()
                counts[sigma] += 1

    rec()
    return tuple(out)


@lru_cache(maxsize=None)
def rank_index(spec: SliceSpec) -> dict[Point, int]:
    """Point -> rank in lexicographic order, memoized per spec."""
    return {x: i for i, x in enumerate(enumerate_slice(spec))}


def letter_counts(x: Iterable[int], s: int) -> tuple[int, ...]:
    """How many times each letter 0..s-1 occurs in ``x``."""
    counts = [0] * s
    for v in x:
        counts[v] += 1
    return tuple(counts)


def distance_matrix(a: Point, b: Point, s: int) -> tuple[tuple[int, ...], ...]:
    """Generalized Hamming distance: entry (sigma, tau) counts the coordinates
    where ``a`` reads sigma and ``b`` reads tau.

    Row sums recover the letter counts of ``a`` and column sums those of ``b``.
    """
    if len(a) != len(b):
        raise ValueError("points must have equal length")
    rows = [[0] * s for _ in range(s)]
    for u, v in zip(a, b):
        rows[u][v] += 1
    return tuple(tuple(r) for r in rows)


def transpose_profile(delta: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(row[i] for row in delta) for i in range(len(delta)))


def is_c_balanced(delta: Sequence[Sequence[int]], c: float, m: int) -> bool:
    """Whether every entry of the profile sits in ``m/s +- sqrt(c*m*log m)``.

    Natural logarithm; for ``m == 1`` the band has zero width, so no integer
    profile over ``s >= 2`` letters qualifies.
    """
    s = len(delta)
    if c < 0:
        raise ValueError("balance parameter must be non-negative")
    band = math.sqrt(c * m * math.log(m)) if m > 1 else 0.0
    center = m / s
    return all(abs(entry - center) <= band for row in delta for entry in row)


def apply_permutation(pi: Sequence[int], x: Point) -> Point:
    """Permute coordinates: the result has ``x[i]`` at position ``pi[i]``.

    With this convention ``distance_matrix(apply_permutation(pi, a),
    apply_permutation(pi, b))`` equals ``distance_matrix(a, b)`` for every
    permutation ``pi`` of ``range(n)``.
    """
    if len(pi) != len(x):
        raise ValueError("permutation length must match point length")
    out = bytearray(len(x))
    for i, target in enumerate(pi):
        out[target] = x[i]
    return bytes(out)


def random_point(spec: SliceSpec, rng) -> Point:
    """A uniform point of the slice (``rng`` is a numpy Generator)."""
    word = bytearray()
    for sigma, count in enumerate(spec.counts):
        word.extend([sigma] * count)
    perm = rng.permutation(len(word))
    out = bytearray(len(word))
    for i, target in enumerate(perm):
        out[target] = word[i]
    return bytes(out)
