from __future__ import annotations

import itertools
import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from shiftdisc.colorings import (
    affine_model_counts,
    block_vector,
    cube_block_options,
    cube_color_counts,
    explicit_coloring,
    gamma_explicit,
    gamma_randomized,
    member_colors,
    psi_hash,
    randomized_coloring,
    window_vector,
)
from shiftdisc.cubes import Cube, IntervalPartition, enumerate_cube, random_cube_B
from shiftdisc.errors import InvalidArgument
from shiftdisc.parity import alpha_c
from shiftdisc.shift_graph import build_pipeline


@pytest.fixture(scope="module")
def kappa6():
    return build_pipeline(1024, 6)


def test_window_vector_lengths():
    kappa = build_pipeline(8, 2)
    assert len(window_vector((3, 7), kappa)) == 1
    w = window_vector((1, 2, 3, 5, 6, 7), kappa)
    assert len(w) == 5
    assert all(a != b for a, b in zip(w, w[1:]))
    assert set(w) <= {1, 2, 3}
    with pytest.raises(InvalidArgument):
        window_vector((1,), kappa)


def test_gamma_explicit_sums_blocks():
    kappa = build_pipeline(16, 4)
    X = (1, 2, 3, 5, 6, 8, 9, 12)
    blocks = block_vector(X, kappa)
    assert gamma_explicit(X, kappa, 3) == sum(blocks) % 3
    assert gamma_explicit(X, kappa, 5) == sum(blocks) % 5


def test_gamma_explicit_small_examples():
    kappa = build_pipeline(16, 4)
    zero = [b for b in itertools.combinations(range(1, 17), 4) if kappa.color(b) == 0]
    two = [b for b in itertools.combinations(range(1, 17), 4) if kappa.color(b) == 2]
    first = zero[0]
    second = next(b for b in zero if b[0] > first[-1])
    assert gamma_explicit(first + second, kappa) == 0
    first = two[0]
    second = next(b for b in two if b[0] > first[-1])
    assert gamma_explicit(first + second, kappa) == 1


def test_gamma_explicit_errors():
    kappa = build_pipeline(16, 4)
    with pytest.raises(InvalidArgument):
        gamma_explicit((1, 2, 3, 4, 5), kappa)
    with pytest.raises(InvalidArgument):
        gamma_explicit((1, 2, 3, 4), kappa, 4)
    with pytest.raises(InvalidArgument):
        explicit_coloring(build_pipeline(12, 2, strict=False))


def test_members_differing_in_one_block_differ():
    kappa = build_pipeline(8, 2)
    cube = Cube(IntervalPartition(tuple(range(1, 7)), "B", 2), (1, 2), ())
    members = enumerate_cube(cube)
    cols = {X: gamma_explicit(X, kappa) for X in members}
    pairs = 0
    for X, Y in itertools.combinations(members, 2):
        if len(set(X) ^ set(Y)) == 2:
            pairs += 1
            assert cols[X] != cols[Y]
    assert pairs == 4


def test_randomized_deterministic_and_factors_through_windows():
    kappa = build_pipeline(16, 4)
    X = (1, 3, 4, 7, 9, 12, 13, 16)
    assert gamma_randomized(X, kappa, 42) == gamma_randomized(X, kappa, 42)
    by_vector: dict = {}
    for Y in itertools.islice(itertools.combinations(range(1, 17), 8), 3000):
        v = window_vector(Y, kappa)
        for seed in (0, 1, 2):
            by_vector.setdefault((v, seed), set()).add(gamma_randomized(Y, kappa, seed))
    assert all(len(s) == 1 for s in by_vector.values())


def test_hash_layout_is_stable():
    assert [psi_hash((1, 2, 3, 1), s) for s in range(8)] == [psi_hash((1, 2, 3, 1), s) for s in range(8)]
    assert psi_hash((1, 2), 0) in (-1, 1)
    assert psi_hash((1, 2), 2**64) == psi_hash((1, 2), 0)


def test_hash_mean_near_zero():
    vectors = itertools.islice(itertools.product((1, 2, 3), repeat=12), 100_000)
    mean = sum(psi_hash(v, 7) for v in vectors) / 100_000
    assert -0.02 <= mean <= 0.02


def test_hash_unbiased_over_seeds():
    v = (1, 2, 1, 3, 2)
    mean = sum(psi_hash(v, s) for s in range(20_000)) / 20_000
    assert abs(mean) < 0.03


def test_coloring_objects():
    kappa = build_pipeline(16, 4)
    g = explicit_coloring(kappa)
    r = randomized_coloring(kappa, 3)
    X = (1, 2, 3, 5, 6, 8, 9, 12)
    assert g.colors == (0, 1, 2) and g(X) == gamma_explicit(X, kappa)
    assert r.colors == (-1, 1) and r(X) == gamma_randomized(X, kappa, 3)


def test_relabeling_preserving_block_colors():
    kappa = build_pipeline(16, 4)
    X = (1, 2, 3, 5, 6, 8, 9, 12)
    shifted = tuple(x + 1 for x in X)
    if block_vector(shifted, kappa) == block_vector(X, kappa):
        assert gamma_explicit(shifted, kappa) == gamma_explicit(X, kappa)
    blocks = [b for b in itertools.combinations(range(1, 17), 4)]
    a = next(b for b in blocks if b[-1] <= 8 and kappa.color(b) == kappa.color(X[:4]))
    b = next(b for b in blocks if b[0] > 8 and kappa.color(b) == kappa.color(X[4:]))
    assert gamma_explicit(a + b, kappa) == gamma_explicit(X, kappa)


def _random_cube(seed, d, l=6, n=12):
    rng = random.Random(seed)
    part = IntervalPartition(tuple(sorted(rng.sample(range(1, 1025), n * (l + 1)))), "B", l)
    return random_cube_B(part, rng.sample(range(1, n + 1), d), rng)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 10))
def test_affine_model_matches_enumeration(kappa6, seed, d):
    cube = _random_cube(seed, d)
    A, options, _ = cube_block_options(cube, kappa6)
    gaps = [(b - a) % 3 for a, b in options]
    assert all(g in (1, 2) for g in gaps)
    direct = Counter(member_colors(cube, kappa6))
    model = affine_model_counts(options, A, 3)
    assert [direct.get(r, 0) for r in range(3)] == model
    assert list(cube_color_counts(cube, kappa6)) == model


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 12))
def test_per_cube_balance(kappa6, seed, d):
    cube = _random_cube(seed, d)
    counts = cube_color_counts(cube, kappa6)
    freq = counts / 2**d
    assert max(abs(f - 1 / 3) for f in freq) <= alpha_c(3) ** (d / 4) + 1e-12
