"""Shift graphs Sh(N, l) and an explicit layered coloring of them.

Level h colors the h-subsets of [N]. Level 1 gives {x} the color x - 1; every
later level colors an h-set from the colors of its prefix (first h-1 elements)
and suffix (last h-1 elements), which are adjacent at level h-1. Step kinds:

``ordered``  level 2 only: index of the highest bit where x-1 and y-1 differ.
             Uses x < y, so it needs ceil(log2 N) colors instead of twice that.
``delta``    2*i + bit_i(prefix color), i the lowest bit where the prefix
             and suffix colors differ (bipartite cover of the previous level).
``subset``   colors are identified with the floor(s/2)-subsets of [s] in
             lexicographic order; the new color is min(A(prefix) - A(suffix)) - 1.
             With at most 6 colors this is the 2-subsets-of-{1,2,3,4} step.
``pair``     K4-colored input; the new color names the ordered pair
             (prefix color, suffix color), i.e. a vertex of the line digraph of K4.
``k4``       paths (a, b), (b, c) in K4 (colors 1..4): b if b != 4, else
             min({1,2,3} - {a, c}). Output ids are 0..2.
``carry``    the prefix color; keeps a proper coloring proper one level up.

The line digraph of K4 is not 3-colorable, so the K4 path step sits two
levels above the 4-colored level, with a ``pair`` level in between.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .enumeration import as_sorted_set, check_budget
from .errors import InvalidArgument, NExceedsTowerBound

K4_PAIRS = [(a, b) for a in range(4) for b in range(4) if a != b]
_TABLE_LIMIT = 4096
_FLOAT_EXACT = 1 << 53


def sperner_width(colors: int) -> int:
    """Smallest s with C(s, floor(s/2)) >= colors."""
    s = 1
    while comb(s, s // 2) < colors:
        s += 1
    return s


def bit_width(colors: int) -> int:
    """Bits needed for the ids 0..colors-1."""
    return max(1, (colors - 1).bit_length())


def _highest_bit(w):
    if isinstance(w, np.ndarray):
        return np.frexp(w.astype(np.float64))[1].astype(np.int64) - 1
    return int(w).bit_length() - 1


def _lowest_bit(w):
    return _highest_bit(w & -w)


def subset_table(colors: int) -> np.ndarray:
    s = sperner_width(colors)
    family = [frozenset(c) for c in itertools.combinations(range(1, s + 1), s // 2)][:colors]
    t = np.full((colors, colors), -1, dtype=np.int64)
    for u, a in enumerate(family):
        for v, b in enumerate(family):
            if u != v:
                t[u, v] = min(a - b) - 1
    return t


def delta_table(colors: int) -> np.ndarray:
    t = np.full((colors, colors), -1, dtype=np.int64)
    for u in range(colors):
        for v in range(colors):
            if u != v:
                i = _lowest_bit(u ^ v)
                t[u, v] = 2 * i + ((u >> i) & 1)
    return t


def pair_table() -> np.ndarray:
    t = np.full((4, 4), -1, dtype=np.int64)
    for idx, (a, b) in enumerate(K4_PAIRS):
        t[a, b] = idx
    return t


def psi(a: int, b: int, c: int) -> int:
    """The 3-coloring of K4 paths (a, b), (b, c); colors are 1..4."""
    if b != 4:
        return b
    return min({1, 2, 3} - {a, c})


def k4_table() -> np.ndarray:
    n = len(K4_PAIRS)
    t = np.full((n, n), -1, dtype=np.int64)
    for u, (a, b) in enumerate(K4_PAIRS):
        for v, (b2, c) in enumerate(K4_PAIRS):
            if b == b2:
                t[u, v] = psi(a + 1, b + 1, c + 1) - 1
    return t


def carry_table(colors: int) -> np.ndarray:
    return np.repeat(np.arange(colors, dtype=np.int64)[:, None], colors, axis=1)


@dataclass(frozen=True)
class Level:
    kind: str
    colors: int
    table: np.ndarray | None = field(default=None, repr=False, compare=False)

    def combine(self, u, v):
        """Color of an h-set from its prefix color ``u`` and suffix color ``v``."""
        if self.table is not None:
            return self.table[u, v] if isinstance(u, np.ndarray) else int(self.table[u, v])
        if self.kind == "ordered":
            return _highest_bit(u ^ v)
        if self.kind == "delta":
            i = _lowest_bit(u ^ v)
            return 2 * i + ((u >> i) & 1)
        raise InvalidArgument(f"level kind {self.kind!r} has no combine rule")


def make_level(kind: str, prev_colors: int) -> Level:
    if kind == "ordered":
        return Level(kind, bit_width(prev_colors))
    if kind == "delta":
        out = 2 * bit_width(prev_colors)
        table = delta_table(prev_colors) if prev_colors <= _TABLE_LIMIT else None
        return Level(kind, out, table)
    if kind == "subset":
        if prev_colors > _TABLE_LIMIT:
            raise InvalidArgument(f"subset step on {prev_colors} colors is too large to tabulate")
        return Level(kind, sperner_width(prev_colors), subset_table(prev_colors))
    if kind == "pair":
        if prev_colors > 4:
            raise InvalidArgument("pair step needs a K4 coloring")
        return Level(kind, len(K4_PAIRS), pair_table())
    if kind == "k4":
        return Level(kind, 3, k4_table())
    if kind == "carry":
        return Level(kind, prev_colors, carry_table(prev_colors) if prev_colors <= _TABLE_LIMIT else None)
    raise InvalidArgument(f"unknown level kind {kind!r}")


def plan_levels(N: int, l: int, strategy: str = "greedy") -> list[Level]:
    """Level sequence minimising the final color count within l levels.

    ``greedy`` uses the ordered first step and the general subset step.
    ``delta`` follows the plain bipartite-cover descent (delta steps down to
    at most 6 colors, then subset, pair, k4).
    """
    if strategy not in ("greedy", "delta"):
        raise InvalidArgument(f"unknown strategy {strategy!r}")
    levels = [Level("base", N)]
    for h in range(2, l + 1):
        prev = levels[-1]
        C = prev.colors
        remaining = l - h
        if prev.kind == "pair":
            kind = "k4"
        elif C <= 3:
            kind = "carry"
        elif C <= 4:
            kind = "pair" if remaining >= 1 else "carry"
        elif h == 2 and strategy == "greedy":
            kind = "ordered"
        elif strategy == "delta" and C > 6:
            kind = "delta"
        else:
            kind = "subset"
        levels.append(make_level(kind, C))
    return levels


def _max_colors_reaching_three(remaining: int) -> int | None:
    """Largest color count at a level from which 3 colors are reachable in ``remaining`` steps."""
    if remaining <= 1:
        return 3
    f = 4
    for _ in range(remaining - 2):
        if f > 200_000:
            return None
        f = comb(f, f // 2)
    return f if f.bit_length() <= 1 << 20 else None


def max_admissible_bits(l: int) -> int | None:
    """Bit length of the largest N for which :func:`build_pipeline` reaches 3 colors.

    None when the number is too large to compute.
    """
    if l == 1:
        return 2
    f = _max_colors_reaching_three(l - 2)
    return None if f is None else f + 1


class ColoringPipeline:
    """Layered proper coloring of Sh(N, h) for every h <= l."""

    def __init__(self, N: int, levels: list[Level], memo: bool = True):
        self.N = N
        self.levels = levels
        self.memo = memo
        self._cache: dict[tuple[int, ...], int] = {}

    @property
    def l(self) -> int:
        return len(self.levels)

    @property
    def color_counts(self) -> tuple[int, ...]:
        return tuple(lv.colors for lv in self.levels)

    @property
    def kinds(self) -> tuple[str, ...]:
        return tuple(lv.kind for lv in self.levels)

    @property
    def num_colors(self) -> int:
        return self.levels[-1].colors

    @property
    def is_three_color(self) -> bool:
        return self.num_colors <= 3

    def describe(self) -> dict:
        return {
            "N": self.N,
            "l": self.l,
            "kinds": list(self.kinds),
            "color_counts": list(self.color_counts),
            "three_color": self.is_three_color,
        }

    def replace_level(self, h: int, level: Level) -> "ColoringPipeline":
        """Copy with level ``h`` (1-based) swapped out; used for mutation checks."""
        levels = list(self.levels)
        levels[h - 1] = level
        return ColoringPipeline(self.N, levels, self.memo)

    def color(self, block) -> int:
        block = as_sorted_set(block, self.N)
        if len(block) > self.l:
            raise InvalidArgument(f"block of size {len(block)} exceeds pipeline levels {self.l}")
        return self._color(block)

    def _color(self, block: tuple[int, ...]) -> int:
        if len(block) == 1:
            return block[0] - 1
        if self.memo:
            hit = self._cache.get(block)
            if hit is not None:
                return hit
        c = self.levels[len(block) - 1].combine(self._color(block[:-1]), self._color(block[1:]))
        if self.memo:
            self._cache[block] = c
        return c

    def window_colors(self, X, h: int | None = None) -> list[int]:
        """Level-h colors of all consecutive h-windows of the sorted set X (default h = l)."""
        h = self.l if h is None else h
        if not 1 <= h <= self.l:
            raise InvalidArgument(f"level {h} outside 1..{self.l}")
        if len(X) < h:
            raise InvalidArgument(f"set of size {len(X)} has no windows of size {h}")
        row = [x - 1 for x in X]
        for lv in self.levels[1:h]:
            row = [lv.combine(u, v) for u, v in zip(row, row[1:])]
        return row

    def color_many(self, blocks: np.ndarray, upto: int | None = None) -> np.ndarray:
        """Vectorised coloring of the rows of ``blocks`` (shape (M, w)).

        Returns the level-``upto`` colors of every consecutive window, shape
        (M, w - upto + 1); ``upto`` defaults to the row width.
        """
        blocks = np.asarray(blocks, dtype=np.int64)
        w = blocks.shape[1]
        upto = w if upto is None else upto
        if upto > self.l:
            raise InvalidArgument(f"level {upto} exceeds pipeline levels {self.l}")
        if self.N >= _FLOAT_EXACT:
            raise InvalidArgument("vectorised coloring needs N < 2**53")
        row = blocks - 1
        for lv in self.levels[1:upto]:
            row = lv.combine(row[:, :-1], row[:, 1:])
        return row


def build_pipeline(N: int, l: int, *, strict: bool = True, strategy: str = "greedy", memo: bool = True) -> ColoringPipeline:
    """Pipeline coloring Sh(N, l); with ``strict`` it must end with at most 3 colors."""
    if l < 1:
        raise InvalidArgument("l must be >= 1")
    if N < l:
        raise InvalidArgument(f"N={N} must be >= l={l}")
    pipe = ColoringPipeline(N, plan_levels(N, l, strategy), memo)
    if strict and not pipe.is_three_color:
        bits = max_admissible_bits(l) if strategy == "greedy" else None
        where = f"maximal admissible N has bit length {bits}" if bits else "no closed form for the admissible range"
        raise NExceedsTowerBound(f"N={N} too large for a 3-coloring of Sh(N,{l}) ({strategy} strategy): {where}")
    return pipe


def is_shift_edge(a, b) -> bool:
    """True iff b = (a minus min a) plus some y > max a."""
    a, b = tuple(a), tuple(b)
    if len(a) != len(b) or not a:
        raise InvalidArgument("shift edge endpoints must be non-empty sets of equal size")
    return a[1:] == b[:-1] and b[-1] > a[-1]


@dataclass(frozen=True)
class VerifyReport:
    mode: str
    edges_checked: int
    violations: int
    colors_used: int
    seed: int | None = None

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "edges_checked": self.edges_checked,
            "violations": self.violations,
            "colors_used": self.colors_used,
            "seed": self.seed,
        }


def all_subsets_array(N: int, r: int) -> np.ndarray:
    flat = np.fromiter(itertools.chain.from_iterable(itertools.combinations(range(1, N + 1), r)), dtype=np.int64)
    return flat.reshape(-1, r)


def sample_subsets_array(N: int, r: int, samples: int, seed: int) -> np.ndarray:
    """``samples`` uniform r-subsets of [N] as sorted rows (rejection of repeated draws)."""
    if r > N:
        raise InvalidArgument(f"cannot draw {r}-subsets of [{N}]")
    rng = np.random.default_rng(seed)
    out = np.empty((0, r), dtype=np.int64)
    while len(out) < samples:
        need = samples - len(out)
        batch = np.sort(rng.integers(1, N + 1, size=(need + need // 4 + 16, r)), axis=1)
        ok = np.all(np.diff(batch, axis=1) > 0, axis=1)
        out = np.concatenate([out, batch[ok][:need]])
    return out


def verify_proper(pipeline: ColoringPipeline, mode: str = "exhaustive", budget: int = 10**6, seed: int = 0,
                  chunk: int = 200_000) -> VerifyReport:
    """Check color(tail) != color(head) for every checked shift edge of Sh(N, l).

    An edge is given by its (l+1)-set witness; tail and head are its prefix and suffix.
    """
    N, l = pipeline.N, pipeline.l
    if mode == "exhaustive":
        check_budget(f"C({N}, {l + 1})", comb(N, l + 1), budget)
        witnesses = all_subsets_array(N, l + 1)
    elif mode == "sampled":
        witnesses = sample_subsets_array(N, l + 1, budget, seed)
    else:
        raise InvalidArgument(f"unknown mode {mode!r}")
    violations = 0
    used: set[int] = set()
    for start in range(0, len(witnesses), chunk):
        cols = pipeline.color_many(witnesses[start:start + chunk], upto=l)
        violations += int(np.count_nonzero(cols[:, 0] == cols[:, 1]))
        used.update(np.unique(cols).tolist())
    return VerifyReport(mode, len(witnesses), violations, len(used), seed if mode == "sampled" else None)


def shift_neighbors(v: tuple[int, ...], N: int):
    """Undirected neighbours of the l-set v in Sh(N, l)."""
    for y in range(v[-1] + 1, N + 1):
        yield v[1:] + (y,)
    for x in range(1, v[0]):
        yield (x,) + v[:-1]


def odd_cycle_check(N: int, l: int, budget: int = 10**6) -> bool:
    """True iff Sh(N, l) is not bipartite (a BFS 2-coloring attempt fails)."""
    if l < 1 or N < l:
        raise InvalidArgument("need 1 <= l <= N")
    check_budget(f"C({N}, {l})", comb(N, l), budget)
    side: dict[tuple[int, ...], int] = {}
    for start in itertools.combinations(range(1, N + 1), l):
        if start in side:
            continue
        side[start] = 0
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in shift_neighbors(v, N):
                if w not in side:
                    side[w] = 1 - side[v]
                    queue.append(w)
                elif side[w] == side[v]:
                    return True
    return False
