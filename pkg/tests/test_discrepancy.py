from __future__ import annotations

import itertools
import math
import random
from collections import Counter
from fractions import Fraction
from math import comb

import pytest

from shiftdisc.colorings import Coloring, explicit_coloring, randomized_coloring
from shiftdisc.cubes import IntervalPartition, count_hits
from shiftdisc.discrepancy import (
    cube_cover_report,
    deviation,
    exact_discrepancy,
    hit_count_stats,
    hoeffding_radius,
    mc_discrepancy,
    report_from_counts,
    worst_set_scan,
)
from shiftdisc.errors import BudgetError, InvalidArgument
from shiftdisc.shift_graph import build_pipeline
from shiftdisc.towers import ParamsA, ParamsB


def parity_coloring():
    return Coloring(lambda X: sum(X) % 2, (0, 1), "sum-parity")


def test_constant_coloring():
    rep = exact_discrepancy(Coloring(lambda X: 0, (0, 1)), range(1, 9), 6)
    assert rep.total == 28
    assert rep.deviation == 0.5


def test_balanced_coloring():
    order = list(itertools.combinations(range(1, 9), 6))
    half = set(order[::2])
    rep = exact_discrepancy(Coloring(lambda X: 1 if X in half else -1, (-1, 1)), range(1, 9), 6)
    assert rep.color_counts == {1: 14, -1: 14}
    assert rep.deviation == 0
    assert rep.signed_sum == 0


def test_counts_example():
    assert report_from_counts({0: 7, 1: 3}, (0, 1)).deviation == pytest.approx(0.2)


def test_two_color_signed_sum_identity():
    kappa = build_pipeline(16, 4)
    rep = exact_discrepancy(randomized_coloring(kappa, 5), range(1, 13), 8)
    assert sum(rep.frequencies.values()) == pytest.approx(1)
    assert rep.deviation_exact == Fraction(abs(rep.signed_sum), 2 * rep.total)


def test_deviation_validation():
    with pytest.raises(InvalidArgument):
        deviation({}, (0, 1))
    with pytest.raises(InvalidArgument):
        deviation({5: 1}, (0, 1))


def test_exact_budget_names_binomial():
    with pytest.raises(BudgetError, match=r"C\(30, 15\)"):
        exact_discrepancy(parity_coloring(), range(1, 31), 15, budget=10)


def test_mc_single_sample():
    rep = mc_discrepancy(explicit_coloring(build_pipeline(16, 4)), range(1, 17), 8, 1, seed=9)
    assert sorted(rep.color_counts.values()) == [1]
    assert rep.deviation == pytest.approx(1 - 1 / 3)


def test_mc_radius_and_determinism():
    g = parity_coloring()
    a = mc_discrepancy(g, range(1, 21), 10, 500, seed=4)
    assert a == mc_discrepancy(g, range(1, 21), 10, 500, seed=4)
    assert a == mc_discrepancy(g, range(1, 21), 10, 500, seed=4, threads=4)
    assert a.confidence_radius == pytest.approx(math.sqrt(math.log(2 * 2 / 0.01) / 1000))
    with pytest.raises(InvalidArgument):
        mc_discrepancy(g, range(1, 21), 10, 0)


def test_exact_threads_identical():
    g = explicit_coloring(build_pipeline(16, 4))
    assert exact_discrepancy(g, range(1, 17), 8, threads=1) == exact_discrepancy(g, range(1, 17), 8, threads=3)


def test_permutation_invariance():
    kappa = build_pipeline(16, 4)
    g = explicit_coloring(kappa)
    S = (2, 3, 5, 8, 9, 11, 13, 16)
    T = tuple(range(1, 9))
    to_S = dict(zip(T, S))
    transported = Coloring(lambda X: g(tuple(to_S[x] for x in X)), g.colors)
    assert exact_discrepancy(g, S, 4) .color_counts == exact_discrepancy(transported, T, 4).color_counts


def test_mc_error_halves_when_samples_quadruple():
    g = explicit_coloring(build_pipeline(16, 4))
    S = range(1, 15)
    truth = exact_discrepancy(g, S, 8).frequencies[0]

    def rms(samples):
        errs = [mc_discrepancy(g, S, 8, samples, seed).frequencies[0] - truth for seed in range(40)]
        return math.sqrt(sum(e * e for e in errs) / len(errs))

    ratio = rms(200) / rms(800)
    assert 2 / 1.5 <= ratio <= 2 * 1.5


def test_cover_report_variant_A_example():
    kappa = build_pipeline(8, 2)
    p = ParamsA.from_nl(2, 2)
    rep = cube_cover_report(range(1, 9), p, randomized_coloring(kappa, 0))
    part = IntervalPartition(tuple(range(1, 9)), "A", 2)
    hit = sum(1 for X in itertools.combinations(range(1, 9), 6) if count_hits(X, part) >= 1)
    assert rep.covered == hit and rep.total == 28
    assert rep.covered_fraction == pytest.approx(hit / 28)
    assert rep.uncovered_fraction == pytest.approx((28 - hit) / 28)
    assert rep.holds


@pytest.mark.parametrize("threshold", [0, 1, 2, 3])
def test_cover_bound_holds_for_many_colorings(threshold):
    p = ParamsB.from_nl(3, 2)
    rng = random.Random(threshold)
    for _ in range(5):
        table = {X: rng.randrange(3) for X in itertools.combinations(range(1, 10), 6)}
        rep = cube_cover_report(range(1, 10), p, Coloring(table.__getitem__, (0, 1, 2)), threshold)
        assert rep.holds
        small = rep.total - rep.covered + sum(s for d, s, _ in rep.per_cube if d < threshold)
        assert rep.uncovered_small == small


def test_disjoint_union_max():
    p = ParamsB.from_nl(3, 2)
    g = Coloring(lambda X: sum(X) % 3, (0, 1, 2))
    rep = cube_cover_report(range(1, 10), p, g)
    covered = [X for X in itertools.combinations(range(1, 10), 6)]
    part = IntervalPartition(tuple(range(1, 10)), "B", 2)
    B = [X for X in covered if count_hits(X, part) >= 1]
    union_dev = deviation(Counter(g(X) for X in B), g.colors)
    assert union_dev <= rep.max_cube_deviation


def _exact_dev(g, S, k):
    return exact_discrepancy(g, S, k).deviation_exact


def test_monotone_in_set_size():
    g = Coloring(lambda X: (X[0] * 7 + X[-1] * 3 + len(X)) % 3, (0, 1, 2))
    N, k, m = 9, 3, 6
    worst_m = max(_exact_dev(g, S, k) for S in itertools.combinations(range(1, N + 1), m))
    for S in itertools.combinations(range(1, N + 1), m + 1):
        assert _exact_dev(g, S, k) <= worst_m


def test_worst_set_single_ground_set():
    kappa = build_pipeline(8, 2)
    p = ParamsB.from_nl(2, 2)
    rep = worst_set_scan(6, p, explicit_coloring(kappa), "exhaustive")
    assert rep.evaluated == 1 and rep.argmax == tuple(range(1, 7))


def test_worst_set_sampled_reproducible():
    kappa = build_pipeline(16, 4)
    p = ParamsB.from_nl(2, 4)
    g = explicit_coloring(kappa)
    a = worst_set_scan(16, p, g, "sampled", samples=8, seed=3)
    assert a.evaluated == 8
    assert a.argmax == worst_set_scan(16, p, g, "sampled", samples=8, seed=3).argmax
    with pytest.raises(InvalidArgument):
        worst_set_scan(16, p, g, "nope")
    with pytest.raises(BudgetError):
        worst_set_scan(16, p, g, "exhaustive", budget=100)


def test_worst_set_falls_back_to_sampling():
    kappa = build_pipeline(16, 4)
    p = ParamsB.from_nl(2, 4)
    rep = worst_set_scan(16, p, explicit_coloring(kappa), "sampled", samples=2, seed=0, budget=5, mc_samples=50,
                         keep=True)
    assert {method for _, _, method in rep.per_set} == {"monte_carlo"}


def test_hit_stats_small():
    s = hit_count_stats(ParamsA.from_nl(2, 2), 2000, seed=1)
    part = IntervalPartition(tuple(range(1, 9)), "A", 2)
    exact_mean = sum(count_hits(X, part) for X in itertools.combinations(range(1, 9), 6)) / comb(8, 6)
    assert abs(s.mean - exact_mean) < 0.1
    assert sum(s.histogram.values()) == 2000
    b = hit_count_stats(ParamsB.from_nl(4, 2), 500, seed=1)
    assert b.variant == "B" and b.threshold == pytest.approx(4 / (math.e * 4))


def test_hoeffding_formula():
    assert hoeffding_radius(100, 3) == pytest.approx(math.sqrt(math.log(600) / 200))
