"""Interval partitions of a ground set, proper hits, cubes and the cube-image codec.

Indices of intervals, windows and blocks are 1-based throughout, as are the
elements of the ground set.

Variant A splits S (|S| = 2ln) into n intervals of length 2l; a k-set
properly hits an interval when it misses exactly one of its elements.
Variant B splits S (|S| = n(l+1)) into n intervals of length l+1; a k-set
properly h-hits S_i when its count before S_i is h mod l and it meets S_i in
S_i minus its max or S_i minus its min.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable

from .enumeration import as_sorted_set
from .errors import BudgetError, ConsistencyError, InvalidArgument, MalformedCode

MAX_ENUM_DIM = 24


@dataclass(frozen=True)
class IntervalPartition:
    S: tuple[int, ...]
    variant: str
    l: int
    intervals: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    _where: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.variant not in ("A", "B"):
            raise InvalidArgument(f"unknown variant {self.variant!r}")
        if self.l < 1:
            raise InvalidArgument("l must be >= 1")
        S = as_sorted_set(self.S)
        object.__setattr__(self, "S", S)
        size = self.interval_length
        if len(S) % size:
            raise InvalidArgument(f"|S|={len(S)} is not a multiple of the interval length {size}")
        intervals = tuple(S[i:i + size] for i in range(0, len(S), size))
        object.__setattr__(self, "intervals", intervals)
        object.__setattr__(self, "_where", {x: i // size + 1 for i, x in enumerate(S)})

    @classmethod
    def for_params(cls, S: Iterable[int], params) -> "IntervalPartition":
        part = cls(tuple(S), params.variant, params.l)
        if part.n != params.n:
            raise InvalidArgument(f"|S| = {len(part.S)} but the parameters need m = {params.m}")
        return part

    @property
    def interval_length(self) -> int:
        return 2 * self.l if self.variant == "A" else self.l + 1

    @property
    def n(self) -> int:
        return len(self.intervals)

    @property
    def k(self) -> int:
        return self.n * (2 * self.l - 1) if self.variant == "A" else self.n * self.l

    def interval(self, i: int) -> tuple[int, ...]:
        if not 1 <= i <= self.n:
            raise InvalidArgument(f"interval index {i} outside 1..{self.n}")
        return self.intervals[i - 1]

    def split(self, X: Iterable[int]) -> list[tuple[int, ...]]:
        """X intersected with each interval, in order."""
        parts: list[list[int]] = [[] for _ in range(self.n)]
        for x in X:
            i = self._where.get(x)
            if i is None:
                raise InvalidArgument(f"element {x} is not in S")
            parts[i - 1].append(x)
        return [tuple(p) for p in parts]


def _require(part: IntervalPartition, variant: str) -> None:
    if part.variant != variant:
        raise InvalidArgument(f"operation needs a variant {variant} partition")


def _hit_B(inter: tuple[int, ...], Si: tuple[int, ...]) -> bool:
    return inter == Si[:-1] or inter == Si[1:]


def properly_hits_A(X, part: IntervalPartition, i: int) -> bool:
    _require(part, "A")
    Si = set(part.interval(i))
    return sum(1 for x in X if x in Si) == 2 * part.l - 1


def properly_hits_B(X, part: IntervalPartition, i: int, h: int = 0) -> bool:
    _require(part, "B")
    Si = part.interval(i)
    if not 0 <= h < part.l:
        raise InvalidArgument(f"h={h} outside [0, {part.l})")
    lo, hi = Si[0], Si[-1]
    before = sum(1 for x in X if x < lo)
    inter = tuple(x for x in X if lo <= x <= hi)
    return before % part.l == h and _hit_B(inter, Si)


def hit_indices(X, part: IntervalPartition) -> list[int]:
    """Indices of intervals properly hit by X (variant B: with h = 0)."""
    parts = part.split(X)
    if part.variant == "A":
        return [i + 1 for i, p in enumerate(parts) if len(p) == 2 * part.l - 1]
    hits = []
    before = 0
    for i, (p, Si) in enumerate(zip(parts, part.intervals)):
        if before % part.l == 0 and _hit_B(p, Si):
            hits.append(i + 1)
        before += len(p)
    return hits


def count_hits(X, part: IntervalPartition) -> int:
    return len(hit_indices(X, part))


@dataclass(frozen=True)
class Cube:
    partition: IntervalPartition
    J: tuple[int, ...]
    R: tuple[int, ...]

    def __post_init__(self):
        part = self.partition
        J = tuple(sorted(set(self.J)))
        R = tuple(sorted(set(self.R)))
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "R", R)
        if not J:
            raise InvalidArgument("cube needs a non-empty J")
        if J[0] < 1 or J[-1] > part.n:
            raise InvalidArgument(f"J={J} outside 1..{part.n}")
        parts = part.split(R)
        l = part.l
        if part.variant == "A":
            for j in J:
                Sj = part.intervals[j - 1]
                missing = [idx for idx, a in enumerate(Sj) if a not in parts[j - 1]]
                if len(missing) != 2 or missing[1] - missing[0] != l:
                    raise InvalidArgument(f"R must miss two elements at distance {l} in S_{j}")
            if len(R) + len(J) != part.k:
                raise InvalidArgument(f"|R| + |J| = {len(R) + len(J)} != k = {part.k}")
        else:
            before = 0
            for i, p in enumerate(parts, start=1):
                if i in J:
                    if p:
                        raise InvalidArgument(f"R must avoid S_{i}")
                    if before % l:
                        raise InvalidArgument(f"|R before S_{i}| = {before} is not 0 mod {l}")
                before += len(p)
            if len(R) + l * len(J) != part.k:
                raise InvalidArgument(f"|R| + l|J| = {len(R) + l * len(J)} != k = {part.k}")

    @property
    def variant(self) -> str:
        return self.partition.variant

    @property
    def dimension(self) -> int:
        return len(self.J)

    def options(self) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        """For each j in J, the two sets of elements a member may add in S_j."""
        part = self.partition
        R = set(self.R)
        out = []
        for j in self.J:
            Sj = part.intervals[j - 1]
            if self.variant == "A":
                a, b = [x for x in Sj if x not in R]
                out.append(((a,), (b,)))
            else:
                out.append((Sj[:-1], Sj[1:]))
        return out

    def member(self, choice: Iterable[int]) -> tuple[int, ...]:
        """The member selecting option ``choice[r]`` (0 or 1) in the r-th interval of J."""
        chosen = list(self.R)
        for bit, opts in zip(choice, self.options()):
            chosen.extend(opts[bit])
        return tuple(sorted(chosen))

    def key(self) -> tuple:
        return (self.J, self.R)


def maximal_cube(X, part: IntervalPartition) -> Cube | None:
    """The unique maximal cube containing the k-set X, or None when X hits nothing."""
    X = tuple(X)
    J = hit_indices(X, part)
    if not J:
        return None
    parts = part.split(X)
    l = part.l
    R: list[int] = []
    for i, p in enumerate(parts, start=1):
        if i not in J:
            R.extend(p)
        elif part.variant == "A":
            Si = part.intervals[i - 1]
            j = next(idx for idx, a in enumerate(Si, start=1) if a not in p)
            drop = {j, j + l} if j <= l else {j - l, j}
            R.extend(a for idx, a in enumerate(Si, start=1) if idx not in drop)
    return Cube(part, tuple(J), tuple(R))


def enumerate_cube(cube: Cube) -> list[tuple[int, ...]]:
    """All 2^d members, in lexicographic order."""
    d = cube.dimension
    if d > MAX_ENUM_DIM:
        raise BudgetError(f"cube of dimension {d}", 2**d, 2**MAX_ENUM_DIM)
    return sorted(cube.member(choice) for choice in itertools.product((0, 1), repeat=d))


def _main_index(cube: Cube, X: tuple[int, ...], j: int) -> int:
    """Window (variant A) or block (variant B) index of X's main projection in S_j."""
    part = cube.partition
    l = part.l
    pos = {x: idx for idx, x in enumerate(X, start=1)}
    Sj = part.intervals[j - 1]
    if cube.variant == "A":
        R = set(cube.R)
        h = next(idx for idx, a in enumerate(Sj) if a not in R)  # 0-based
        first = Sj[h: h + l]
        second = Sj[h + 1: h + l + 1]
        hits = [pos[w[0]] for w in (first, second)
                if w[0] in pos and X[pos[w[0]] - 1: pos[w[0]] - 1 + l] == w]
        if len(hits) != 1:
            raise ConsistencyError(f"member {X} has {len(hits)} main projections in S_{j}")
        return hits[0]
    inter = tuple(x for x in X if Sj[0] <= x <= Sj[-1])
    start = pos[inter[0]]
    if (start - 1) % l or X[start - 1: start - 1 + l] != inter:
        raise ConsistencyError(f"member {X} meets S_{j} off the block grid")
    return (start - 1) // l + 1


def main_projections(cube: Cube, members: list[tuple[int, ...]] | None = None) -> tuple[dict[int, int], tuple[int, ...]]:
    """Map each i in J to the index of its main projection, checked on every member.

    Variant A returns window indices j with Pi_j(X) inside S_i; variant B
    returns the block index q with X_q = X cut S_i.
    """
    members = enumerate_cube(cube) if members is None else members
    index: dict[int, int] = {}
    for X in members:
        for i in cube.J:
            j = _main_index(cube, X, i)
            if index.setdefault(i, j) != j:
                raise ConsistencyError(f"main projection of S_{i} moves between members")
    B = tuple(sorted(index.values()))
    if len(B) != cube.dimension:
        raise ConsistencyError("two intervals share a main projection")
    return index, B


@dataclass(frozen=True)
class CubeImageCode:
    B: tuple[int, ...]
    sigma: tuple[tuple[int, int], ...]
    f_table: tuple[tuple[int, tuple[tuple[tuple[int, int], int], ...]], ...]

    def f(self) -> dict[int, dict[tuple[int, int], int]]:
        return {i: dict(items) for i, items in self.f_table}

    def to_dict(self) -> dict:
        return {
            "B": list(self.B),
            "sigma": [list(s) for s in self.sigma],
            "f": {str(i): {f"{a},{b}": v for (a, b), v in items} for i, items in self.f_table},
        }


def _neighbours(B: tuple[int, ...], i: int) -> tuple[int | None, int | None]:
    left = max((b for b in B if b < i), default=None)
    right = min((b for b in B if b > i), default=None)
    return left, right


def _key(q, left, right) -> tuple[int, int]:
    # 1 stands in for a missing neighbour
    return (q[left - 1] if left else 1, q[right - 1] if right else 1)


def image(cube: Cube, kappa, members: list[tuple[int, ...]] | None = None) -> list[tuple[int, ...]]:
    """Window vectors (colors shifted to start at 1) of the cube members, in member order."""
    members = enumerate_cube(cube) if members is None else members
    return [tuple(c + 1 for c in kappa.window_colors(X)) for X in members]


def encode_image(cube: Cube, kappa) -> CubeImageCode:
    _require(cube.partition, "A")
    if kappa.l != cube.partition.l:
        raise InvalidArgument(f"pipeline has {kappa.l} levels but windows have length {cube.partition.l}")
    members = enumerate_cube(cube)
    vectors = image(cube, kappa, members)
    _, B = main_projections(cube, members)
    restricted = {tuple(q[j - 1] for j in B) for q in vectors}
    if len(restricted) != len(vectors):
        raise ConsistencyError("window vectors restricted to B are not injective on the cube")
    sigma = []
    for j in B:
        seen = sorted({q[j - 1] for q in vectors})
        if len(seen) != 2:
            raise ConsistencyError(f"coordinate {j} of B takes {len(seen)} colors")
        sigma.append(tuple(seen))
    p = len(vectors[0])
    table = []
    for i in range(1, p + 1):
        if i in B:
            continue
        left, right = _neighbours(B, i)
        f: dict[tuple[int, int], int] = {}
        for q in vectors:
            key = _key(q, left, right)
            if f.setdefault(key, q[i - 1]) != q[i - 1]:
                raise ConsistencyError(f"color at {i} is not a function of its B-neighbours")
        table.append((i, tuple(sorted(f.items()))))
    return CubeImageCode(B, tuple(sigma), tuple(table))


def decode_image(code: CubeImageCode, p_win: int) -> set[tuple[int, ...]]:
    B = code.B
    if not B:
        raise MalformedCode("B must be non-empty")
    if len(code.sigma) != len(B):
        raise MalformedCode("sigma and B differ in length")
    if B[0] < 1 or B[-1] > p_win:
        raise MalformedCode(f"B={B} outside 1..{p_win}")
    f = code.f()
    free = [i for i in range(1, p_win + 1) if i not in B]
    if set(f) != set(free):
        raise MalformedCode("f must be given exactly on the coordinates outside B")
    out = set()
    for choice in itertools.product(*code.sigma):
        q = [0] * p_win
        for j, c in zip(B, choice):
            q[j - 1] = c
        for i in free:
            left, right = _neighbours(B, i)
            key = _key(q, left, right)
            if key not in f[i]:
                raise MalformedCode(f"f_{i} undefined on {key}")
            q[i - 1] = f[i][key]
        out.add(tuple(q))
    return out


def all_maximal_cubes(part: IntervalPartition, k_sets: Iterable[tuple[int, ...]]) -> tuple[dict[tuple, tuple[Cube, list]], list]:
    """Group k-sets by maximal cube; returns (cube key -> members, uncovered sets)."""
    groups: dict[tuple, list] = {}
    cubes: dict[tuple, Cube] = {}
    uncovered = []
    for X in k_sets:
        cube = maximal_cube(X, part)
        if cube is None:
            uncovered.append(X)
            continue
        key = cube.key()
        cubes.setdefault(key, cube)
        groups.setdefault(key, []).append(X)
    return {key: (cubes[key], members) for key, members in groups.items()}, uncovered


def random_cube_B(part: IntervalPartition, J: Iterable[int], rng: random.Random) -> Cube:
    """A random valid variant-B cube with the given J.

    Outside J each interval contributes about l elements of R; sizes are
    shuffled only within stretches between consecutive J indices, which keeps
    every count before a J interval divisible by l.
    """
    _require(part, "B")
    J = sorted(set(J))
    l, n = part.l, part.n
    sizes = {i: l for i in range(1, n + 1) if i not in J}
    stretches: list[list[int]] = [[]]
    for i in range(1, n + 1):
        if i in J:
            stretches.append([])
        else:
            stretches[-1].append(i)
    for stretch in stretches:
        for _ in range(2 * len(stretch)):
            if len(stretch) < 2:
                break
            a, b = rng.sample(stretch, 2)
            if sizes[a] < l + 1 and sizes[b] > 0:
                sizes[a] += 1
                sizes[b] -= 1
    R: list[int] = []
    for i, size in sizes.items():
        R.extend(rng.sample(part.intervals[i - 1], size))
    return Cube(part, tuple(J), tuple(R))
