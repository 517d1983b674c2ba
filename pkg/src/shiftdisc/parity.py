"""Distribution of sums of independent Bernoulli variables modulo l."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidArgument


def as_probability(p) -> float:
    """Accept a float, a Fraction, a ``"num/den"`` string or a (num, den) pair."""
    if isinstance(p, tuple):
        p = Fraction(*p)
    elif isinstance(p, str):
        p = Fraction(p)
    p = float(p)
    if not 0 < p < 1:
        raise InvalidArgument(f"p={p} must lie strictly between 0 and 1")
    return p


@dataclass(frozen=True)
class ParityParams:
    p: float
    n: int
    l: int
    h: int = 0

    def __post_init__(self):
        object.__setattr__(self, "p", as_probability(self.p))
        if self.n < 1:
            raise InvalidArgument("n must be >= 1")
        if self.l < 2:
            raise InvalidArgument("l must be >= 2")
        if not 0 <= self.h < self.l:
            raise InvalidArgument(f"h={self.h} must lie in [0, {self.l})")

    @property
    def q(self) -> float:
        return 1.0 - self.p


def mod_distribution(params: ParityParams) -> np.ndarray:
    """P[x_1 + ... + x_n = r mod l] for r = 0..l-1, by dynamic programming over residues."""
    p, q = params.p, params.q
    dist = np.zeros(params.l)
    dist[0] = 1.0
    for _ in range(params.n):
        dist = q * dist + p * np.roll(dist, 1)
    return dist


def parity_bound(params: ParityParams) -> float:
    """(1 - 2pq(1 - cos(2 pi / l)))^(n/2); bounds |P[sum = h mod l] - 1/l| for every h."""
    base = 1 - 2 * params.p * params.q * (1 - math.cos(2 * math.pi / params.l))
    return max(base, 0.0) ** (params.n / 2)


def alpha_c(c: int) -> float:
    """1 - (1 - cos(2 pi / c)) / 2, the per-coordinate decay rate for fair 0/1 summands mod c."""
    if c < 3 or c % 2 == 0:
        raise InvalidArgument(f"c={c} must be odd and >= 3")
    return 1 - (1 - math.cos(2 * math.pi / c)) / 2


def parity_report(params: ParityParams) -> dict:
    dist = mod_distribution(params)
    prob = float(dist[params.h])
    return {
        "probability": prob,
        "uniform": 1 / params.l,
        "deviation": abs(prob - 1 / params.l),
        "bound": parity_bound(params),
        "distribution": dist.tolist(),
    }
