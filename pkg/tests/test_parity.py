from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shiftdisc.errors import InvalidArgument
from shiftdisc.parity import ParityParams, alpha_c, as_probability, mod_distribution, parity_bound, parity_report


def enumerate_mod(p: Fraction, n: int, l: int) -> list[Fraction]:
    """Oracle: sum over all 2^n outcomes with exact weights."""
    q = 1 - p
    out = [Fraction(0)] * l
    for bits in itertools.product((0, 1), repeat=n):
        s = sum(bits)
        out[s % l] += p**s * q ** (n - s)
    return out


@pytest.mark.parametrize("p,n,l,expected", [
    ("1/2", 2, 3, [Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)]),
    ("1/2", 3, 2, [Fraction(1, 2), Fraction(1, 2)]),
    ("2/3", 3, 2, [Fraction(13, 27), Fraction(14, 27)]),
])
def test_distribution_examples(p, n, l, expected):
    dist = mod_distribution(ParityParams(p, n, l))
    assert dist == pytest.approx([float(e) for e in expected], abs=1e-15)
    assert enumerate_mod(Fraction(p), n, l) == expected


def test_bound_examples():
    assert parity_bound(ParityParams("1/2", 2, 3)) == pytest.approx(0.25, abs=1e-15)
    assert parity_bound(ParityParams("1/2", 3, 2)) == 0.0
    assert parity_bound(ParityParams("2/3", 3, 2)) == pytest.approx(1 / 27, abs=1e-15)
    rep = parity_report(ParityParams("2/3", 3, 2, 1))
    assert rep["deviation"] == pytest.approx(1 / 54, abs=1e-15)


def test_report_example():
    rep = parity_report(ParityParams((1, 2), 2, 3, 0))
    assert rep["probability"] == pytest.approx(0.25)
    assert rep["uniform"] == pytest.approx(1 / 3)
    assert rep["deviation"] == pytest.approx(1 / 12)
    assert rep["bound"] == pytest.approx(0.25)


def test_alpha():
    assert alpha_c(3) == pytest.approx(0.25, abs=1e-15)
    assert alpha_c(5) == pytest.approx(1 - (1 - math.cos(math.radians(72))) / 2)
    assert alpha_c(5) == pytest.approx(0.6545, abs=1e-4)
    assert alpha_c(5) < alpha_c(7) < 1
    for bad in (2, 4, 1):
        with pytest.raises(InvalidArgument):
            alpha_c(bad)


@pytest.mark.parametrize("p,n,l,h", [(0, 1, 2, 0), (1, 1, 2, 0), ("1/2", 0, 2, 0), ("1/2", 1, 1, 0), ("1/2", 1, 3, 3)])
def test_invalid_params(p, n, l, h):
    with pytest.raises(InvalidArgument):
        ParityParams(p, n, l, h)


def test_probability_forms():
    assert as_probability("3/10") == as_probability(0.3) == as_probability((3, 10))


@given(st.integers(2, 8), st.integers(1, 12), st.sampled_from(["3/10", "1/2", "5/7", "1/9"]))
def test_dp_matches_enumeration(l, n, p):
    dist = mod_distribution(ParityParams(p, n, l))
    oracle = enumerate_mod(Fraction(p), n, l)
    assert np.allclose(dist, [float(o) for o in oracle], atol=1e-12, rtol=0)
    assert abs(dist.sum() - 1) < 1e-12
    assert (dist >= 0).all()


@given(st.integers(2, 8), st.integers(1, 40), st.floats(0.01, 0.99))
def test_bound_monotone_and_valid(l, n, p):
    a = ParityParams(p, n, l)
    b = ParityParams(p, n + 1, l)
    assert parity_bound(b) <= parity_bound(a) + 1e-15
    dist = mod_distribution(a)
    assert np.max(np.abs(dist - 1 / l)) <= parity_bound(a) + 1e-12
