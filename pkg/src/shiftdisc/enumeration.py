"""Sorted sets and the lexicographic combinatorial number system.

Every exhaustive scan and every Monte Carlo draw over ``C(S, k)`` goes through
the same rank <-> subset bijection defined here, so a sampled rank and an
enumerated rank always denote the same k-set.
"""

from __future__ import annotations

import itertools
import random
from math import comb
from typing import Iterable, Iterator, Sequence

from .errors import BudgetError, InvalidArgument

SortedSet = tuple  # strictly increasing tuple of positive ints


def as_sorted_set(elements: Iterable[int], N: int | None = None) -> tuple[int, ...]:
    """Validate and return ``elements`` as a strictly increasing tuple in [1, N]."""
    t = tuple(int(e) for e in elements)
    if not t:
        raise InvalidArgument("sorted set must be non-empty")
    if any(b <= a for a, b in zip(t, t[1:])):
        raise InvalidArgument(f"not strictly increasing: {t}")
    if t[0] < 1:
        raise InvalidArgument(f"elements must be positive: {t}")
    if N is not None and t[-1] > N:
        raise InvalidArgument(f"element {t[-1]} exceeds N={N}")
    return t


def check_budget(what: str, count: int, budget: int) -> None:
    if count > budget:
        raise BudgetError(what, count, budget)


def unrank(rank: int, ground: Sequence[int], k: int) -> tuple[int, ...]:
    """The ``rank``-th k-subset of ``ground`` in lexicographic order (0-based rank)."""
    n = len(ground)
    total = comb(n, k)
    if not 0 <= rank < total:
        raise InvalidArgument(f"rank {rank} out of range [0, {total})")
    out = []
    x = 0
    for i in range(k, 0, -1):
        while True:
            c = comb(n - x - 1, i - 1)
            if rank < c:
                break
            rank -= c
            x += 1
        out.append(ground[x])
        x += 1
    return tuple(out)


def rank(subset: Sequence[int], ground: Sequence[int]) -> int:
    """Inverse of :func:`unrank`."""
    index = {g: i for i, g in enumerate(ground)}
    n, k = len(ground), len(subset)
    r = 0
    prev = -1
    for i, e in enumerate(subset):
        pos = index[e]
        for x in range(prev + 1, pos):
            r += comb(n - x - 1, k - i - 1)
        prev = pos
    return r


def iter_subsets(ground: Sequence[int], k: int, budget: int | None = None) -> Iterator[tuple[int, ...]]:
    """All k-subsets of ``ground`` in lexicographic (= rank) order."""
    if budget is not None:
        check_budget(f"C({len(ground)}, {k})", comb(len(ground), k), budget)
    return itertools.combinations(tuple(ground), k)


def sample_ranks(total: int, samples: int, seed: int) -> list[int]:
    """``samples`` iid uniform ranks in [0, total) from a seeded Mersenne Twister."""
    rng = random.Random(seed)
    return [rng.randrange(total) for _ in range(samples)]


def sample_subsets(ground: Sequence[int], k: int, samples: int, seed: int) -> list[tuple[int, ...]]:
    """Uniform iid k-subsets of ``ground``: seeded uniform ranks, then :func:`unrank`."""
    ground = tuple(ground)
    total = comb(len(ground), k)
    return [unrank(r, ground, k) for r in sample_ranks(total, samples, seed)]
