"""Relative discrepancy of colorings on C(S, k): exact, Monte Carlo, and by cube cover.

The relative discrepancy of f on a family A with color set C is
max over colors i of |P[f(X) = i] - 1/|C||, X uniform on A.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

from .cubes import IntervalPartition, enumerate_cube, hit_indices, maximal_cube
from .enumeration import as_sorted_set, check_budget, iter_subsets, sample_ranks, sample_subsets, unrank
from .errors import ConsistencyError, InvalidArgument
from .towers import ParamsA, ParamsB, azuma_hit, chernoff_hit

DEFAULT_BUDGET = 10**7
CONFIDENCE = 0.99


def deviation(counts: dict, colors: Sequence) -> Fraction:
    total = sum(counts.values())
    if total == 0:
        raise InvalidArgument("empty family")
    unknown = set(counts) - set(colors)
    if unknown:
        raise InvalidArgument(f"colors {sorted(unknown)} are not in the color set")
    c = len(colors)
    return max(abs(Fraction(counts.get(i, 0), total) - Fraction(1, c)) for i in colors)


def hoeffding_radius(samples: int, num_colors: int, confidence: float = CONFIDENCE) -> float:
    return math.sqrt(math.log(2 * num_colors / (1 - confidence)) / (2 * samples))


@dataclass(frozen=True)
class DiscrepancyReport:
    color_counts: dict
    total: int
    colors: tuple
    deviation: float
    method: str
    seed: int | None = None
    samples: int | None = None
    confidence_radius: float = 0.0
    deviation_exact: Fraction | None = field(default=None, compare=False)

    @property
    def signed_sum(self) -> int | None:
        if set(self.colors) != {-1, 1}:
            return None
        return self.color_counts.get(1, 0) - self.color_counts.get(-1, 0)

    @property
    def frequencies(self) -> dict:
        return {c: self.color_counts.get(c, 0) / self.total for c in self.colors}

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "seed": self.seed,
            "samples": self.samples,
            "total": self.total,
            "color_counts": {str(c): self.color_counts.get(c, 0) for c in self.colors},
            "frequencies": {str(c): f for c, f in self.frequencies.items()},
            "deviation": self.deviation,
            "confidence_radius": self.confidence_radius,
            "signed_sum": self.signed_sum,
        }


def report_from_counts(counts: dict, colors: Sequence, method: str = "exact", **kw) -> DiscrepancyReport:
    dev = deviation(counts, colors)
    return DiscrepancyReport(dict(counts), sum(counts.values()), tuple(colors), float(dev), method,
                             deviation_exact=dev, **kw)


def _colors_of(coloring, colors):
    colors = colors if colors is not None else getattr(coloring, "colors", None)
    if colors is None or len(colors) < 2:
        raise InvalidArgument("a color set with at least two colors is required")
    return tuple(colors)


def _count(coloring, sets: list, threads: int) -> Counter:
    if threads <= 1 or len(sets) < 2 * threads:
        return Counter(coloring(X) for X in sets)
    size = -(-len(sets) // threads)
    chunks = [sets[i:i + size] for i in range(0, len(sets), size)]
    with ThreadPoolExecutor(threads) as pool:
        parts = list(pool.map(lambda chunk: Counter(coloring(X) for X in chunk), chunks))
    total = Counter()
    for part in parts:
        total.update(part)
    return total


def exact_discrepancy(coloring, S: Sequence[int], k: int, budget: int = DEFAULT_BUDGET,
                      colors: Sequence | None = None, threads: int = 1) -> DiscrepancyReport:
    colors = _colors_of(coloring, colors)
    S = as_sorted_set(S)
    sets = list(iter_subsets(S, k, budget))
    return report_from_counts(_count(coloring, sets, threads), colors, "exact")


def mc_discrepancy(coloring, S: Sequence[int], k: int, samples: int, seed: int = 0,
                   colors: Sequence | None = None, threads: int = 1) -> DiscrepancyReport:
    """Estimate from ``samples`` uniform draws (seeded uniform ranks, lexicographic unranking)."""
    if samples < 1:
        raise InvalidArgument("samples must be >= 1")
    colors = _colors_of(coloring, colors)
    S = as_sorted_set(S)
    sets = sample_subsets(S, k, samples, seed)
    counts = _count(coloring, sets, threads)
    dev = deviation(counts, colors)
    return DiscrepancyReport(dict(counts), samples, colors, float(dev), "monte_carlo", seed, samples,
                             hoeffding_radius(samples, len(colors)), dev)


@dataclass
class CoverReport:
    total: int
    covered: int
    uncovered_small: int
    per_cube: list  # (dimension, size, deviation)
    max_cube_deviation: Fraction
    composition_bound: Fraction
    overall_exact_deviation: Fraction
    dim_threshold: int

    @property
    def covered_fraction(self) -> float:
        return self.covered / self.total

    @property
    def uncovered_fraction(self) -> float:
        return self.uncovered_small / self.total

    @property
    def holds(self) -> bool:
        return self.overall_exact_deviation <= self.composition_bound

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "covered_fraction": self.covered_fraction,
            "uncovered_fraction": self.uncovered_fraction,
            "dim_threshold": self.dim_threshold,
            "cubes": len(self.per_cube),
            "per_cube": [{"dimension": d, "size": s, "deviation": float(dev)} for d, s, dev in self.per_cube],
            "max_cube_deviation": float(self.max_cube_deviation),
            "composition_bound": float(self.composition_bound),
            "overall_exact_deviation": float(self.overall_exact_deviation),
            "holds": self.holds,
        }


def cube_cover_report(S: Sequence[int], params, coloring, dim_threshold: int = 0,
                      budget: int = DEFAULT_BUDGET, colors: Sequence | None = None) -> CoverReport:
    """Split C(S, k) into maximal cubes and check the superset-slack inequality.

    Cubes of dimension >= dim_threshold form the covered part B; the bound is
    (max deviation over those cubes) + |A minus B| / |A|, which the exact
    deviation on all of A must not exceed.
    """
    colors = _colors_of(coloring, colors)
    part = IntervalPartition.for_params(S, params)
    k = part.k
    check_budget(f"C({len(part.S)}, {k})", comb(len(part.S), k), budget)
    groups: dict[tuple, list] = {}
    cubes = {}
    overall: Counter = Counter()
    uncovered = 0
    for X in iter_subsets(part.S, k):
        color = coloring(X)
        overall[color] += 1
        cube = maximal_cube(X, part)
        if cube is None:
            uncovered += 1
            continue
        cubes.setdefault(cube.key(), cube)
        groups.setdefault(cube.key(), []).append((X, color))
    total = sum(overall.values())
    per_cube = []
    small = uncovered
    worst = Fraction(0)
    for key, members in groups.items():
        cube = cubes[key]
        if [X for X, _ in members] != enumerate_cube(cube):
            raise ConsistencyError(f"maximal cube {key} does not match the sets mapped to it")
        dev = deviation(Counter(c for _, c in members), colors)
        per_cube.append((cube.dimension, len(members), dev))
        if cube.dimension >= dim_threshold:
            worst = max(worst, dev)
        else:
            small += len(members)
    per_cube.sort(key=lambda t: (-t[0], t[2]))
    bound = worst + Fraction(small, total)
    return CoverReport(total, total - uncovered, small, per_cube, worst, bound,
                       deviation(overall, colors), dim_threshold)


@dataclass
class WorstSetReport:
    max_deviation: float
    argmax: tuple
    evaluated: int
    mode: str
    per_set: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "evaluated": self.evaluated,
            "max_deviation": self.max_deviation,
            "argmax": list(self.argmax),
        }


def set_deviation(coloring, S, k, colors, budget, mc_samples, seed) -> tuple[float, str]:
    if comb(len(S), k) <= budget:
        return exact_discrepancy(coloring, S, k, budget, colors).deviation, "exact"
    return mc_discrepancy(coloring, S, k, mc_samples, seed, colors).deviation, "monte_carlo"


def worst_set_scan(N: int, params, coloring, mode: str = "exhaustive", samples: int = 100, seed: int = 0,
                   budget: int = DEFAULT_BUDGET, size: int | None = None, mc_samples: int = 10_000,
                   colors: Sequence | None = None, keep: bool = False) -> WorstSetReport:
    """Largest deviation over ground sets S of the given size (default m) inside [N]."""
    colors = _colors_of(coloring, colors)
    size = params.m if size is None else size
    k = params.k
    if size > N or size < k:
        raise InvalidArgument(f"ground-set size {size} must lie in [{k}, {N}]")
    ground = tuple(range(1, N + 1))
    if mode == "exhaustive":
        candidates: Iterable = iter_subsets(ground, size, budget)
    elif mode == "sampled":
        candidates = sample_subsets(ground, size, samples, seed)
    else:
        raise InvalidArgument(f"unknown mode {mode!r}")
    best, arg, count, per = -1.0, (), 0, []
    for idx, S in enumerate(candidates):
        dev, method = set_deviation(coloring, S, k, colors, budget, mc_samples, seed * 1_000_003 + idx)
        count += 1
        if keep:
            per.append((S, dev, method))
        if dev > best:
            best, arg = dev, S
    return WorstSetReport(best, arg, count, mode, per)


@dataclass
class HitStats:
    variant: str
    n: int
    l: int
    samples: int
    seed: int
    mean: float
    threshold: float
    below_threshold: float
    reference_bound: float
    histogram: dict

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "n": self.n,
            "l": self.l,
            "samples": self.samples,
            "seed": self.seed,
            "mean_hits": self.mean,
            "threshold": self.threshold,
            "fraction_below_threshold": self.below_threshold,
            "reference_bound": self.reference_bound,
            "reference_note": "asymptotic form, constants dropped; reported, not asserted",
            "histogram": {str(z): c for z, c in sorted(self.histogram.items())},
        }


def hit_count_stats(params, samples: int, seed: int = 0, delta: float = 0.5) -> HitStats:
    """Empirical distribution of the number of properly hit intervals of a uniform k-subset.

    Variant A compares against n/2e and the Chernoff-type reference;
    variant B against n/(e l^2) and the Azuma-type reference with the given delta.
    """
    part = IntervalPartition(tuple(range(1, params.m + 1)), params.variant, params.l)
    k = part.k
    total = comb(params.m, k)
    hist: Counter = Counter()
    for r in sample_ranks(total, samples, seed):
        hist[len(hit_indices(unrank(r, part.S, k), part))] += 1
    if isinstance(params, ParamsA):
        threshold = params.n / (2 * math.e)
        ref = chernoff_hit(params.n)
    elif isinstance(params, ParamsB):
        threshold = params.n / (math.e * params.l**2)
        ref = azuma_hit(params.l, delta)
    else:
        raise InvalidArgument("params must be ParamsA or ParamsB")
    mean = sum(z * c for z, c in hist.items()) / samples
    below = sum(c for z, c in hist.items() if z < threshold) / samples
    return HitStats(params.variant, params.n, params.l, samples, seed, mean, threshold, below, ref, dict(hist))
