"""Tower functions, construction parameters and closed-form bound calculators.

Two towers are provided:

* ``standard``: tw_1(x) = x, tw_{i+1}(x) = 2 ** tw_i(x)
* ``sqrt2``:    tw̄_1(x) = 2x, tw̄_{i+1}(x) = 2 ** (tw̄_i(x) / 2)

Values past ``bit_limit`` bits are not materialised; the result then carries a
lower bound on the bit length instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import InvalidArgument, RangeError

KINDS = ("standard", "sqrt2")
ASYMPTOTIC_NOTE = "asymptotic form, constants dropped"
LN84 = math.log(84)


@dataclass(frozen=True)
class TowerValue:
    kind: str
    height: int
    base_arg: int
    value: int | None
    bit_length: int | None  # exact, when known
    bit_length_lower_bound: int

    @property
    def exceeds_limit(self) -> bool:
        return self.value is None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "height": self.height,
            "x": self.base_arg,
            "exceeds_limit": self.exceeds_limit,
            "value": self.value,
            "bit_length": self.bit_length,
            "bit_length_lower_bound": self.bit_length_lower_bound,
        }


def tower(kind: str, height: int, x: int, bit_limit: int = 1 << 20) -> TowerValue:
    if kind not in KINDS:
        raise InvalidArgument(f"unknown tower kind {kind!r}")
    if height < 1 or x < 1:
        raise InvalidArgument("tower needs height >= 1 and x >= 1")
    standard = kind == "standard"
    v: int | None = x if standard else 2 * x
    bits: int | None = v.bit_length()
    lb = bits
    if bits > bit_limit:
        v = None
    for _ in range(height - 1):
        if v is not None:
            e = v if standard else v // 2
            bits = lb = e + 1
            v = 1 << e if bits <= bit_limit else None
            continue
        # value >= 2**(lb - 1), so the next exponent is >= 2**(lb - 1) (or half of that)
        eb = lb - 1 if standard else lb - 2
        lb = (1 << eb) + 1 if eb <= bit_limit else lb + 1
        bits = None
    return TowerValue(kind, height, x, v, bits, lb)


def tower_domination_check(i: int, x: int) -> bool:
    """Exact test of tw̄_i(2x) >= 4 * tw_i(x)."""
    if x < 2:
        raise InvalidArgument("x must be >= 2")
    if not 1 <= i <= 4:
        raise RangeError(f"height {i} outside the exact range 1..4")
    lhs = tower("sqrt2", i, 2 * x)
    rhs = tower("standard", i, x)
    if lhs.exceeds_limit or rhs.exceeds_limit:
        raise RangeError(f"tw_{i}({x}) is not exactly representable")
    return lhs.value >= 4 * rhs.value


@dataclass(frozen=True)
class ParamsA:
    """Sliding-window construction: intervals of length 2l, one missing element each."""

    k: int
    l: int
    n: int = field(init=False)
    m: int = field(init=False)
    p_win: int = field(init=False)

    def __post_init__(self):
        if self.k < 1 or self.l < 1:
            raise InvalidArgument("k and l must be positive")
        if self.k % (2 * self.l - 1):
            raise InvalidArgument(f"k={self.k} is not divisible by 2l-1={2 * self.l - 1}")
        n = self.k // (2 * self.l - 1)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", 2 * self.l * n)
        object.__setattr__(self, "p_win", self.k - self.l + 1)

    @classmethod
    def from_nl(cls, n: int, l: int) -> "ParamsA":
        return cls(n * (2 * l - 1), l)

    variant = "A"


@dataclass(frozen=True)
class ParamsB:
    """Disjoint-block construction: intervals of length l+1, colors summed mod c."""

    k: int
    l: int
    c: int = 3
    n: int = field(init=False)
    m: int = field(init=False)

    def __post_init__(self):
        if self.k < 1 or self.l < 1:
            raise InvalidArgument("k and l must be positive")
        if self.k % self.l:
            raise InvalidArgument(f"k={self.k} is not divisible by l={self.l}")
        if self.c < 3 or self.c % 2 == 0:
            raise InvalidArgument(f"c={self.c} must be odd and >= 3")
        n = self.k // self.l
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", n * (self.l + 1))

    @classmethod
    def from_nl(cls, n: int, l: int, c: int = 3) -> "ParamsB":
        return cls(n * l, l, c)

    variant = "B"


@dataclass(frozen=True)
class BoundValue:
    name: str
    value: float
    log_value: float | None = None
    extra: dict = field(default_factory=dict)
    note: str = ASYMPTOTIC_NOTE

    def to_dict(self) -> dict:
        d = {"name": self.name, "value": self.value, "note": self.note}
        if self.log_value is not None:
            d["log_value"] = self.log_value
        d.update(self.extra)
        return d


def _num(params: Mapping, key: str) -> Fraction:
    if key not in params:
        raise InvalidArgument(f"missing parameter {key!r}")
    raw = params[key]
    try:
        val = Fraction(raw) if not isinstance(raw, float) else Fraction(raw).limit_denominator(10**15)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InvalidArgument(f"parameter {key}={raw!r} is not a rational") from exc
    if val <= 0:
        raise InvalidArgument(f"parameter {key} must be positive")
    return val


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def chernoff_hit(n) -> float:
    """Probability bound for fewer than n/2e properly hit intervals (variant A)."""
    return math.exp(-float(n) / (8 * math.e))


def union_bound(k, l, delta=None) -> tuple[float, float, bool]:
    """(value, log value, feasible) of 84^k * exp(-2 delta^2 2^(k/12l)).

    ``delta`` defaults to 2^(-k/60l). Computed in the log domain so large k
    neither overflows nor underflows.
    """
    k, l = float(k), float(l)
    if delta is None:
        log_two_d2 = math.log(2) * (1 - k / (30 * l))
    else:
        log_two_d2 = math.log(2 * float(delta) ** 2)
    penalty = _safe_exp(log_two_d2 + math.log(2) * k / (12 * l))
    log_value = k * LN84 - penalty
    return _safe_exp(log_value), log_value, log_value < 0


def l_bound(k) -> float:
    """Largest admissible l (exclusive) for union-bound feasibility: k / (20 log2 5k)."""
    k = float(k)
    return k / (20 * math.log2(5 * k))


def azuma_hit(l, delta) -> float:
    return 2 * math.exp(-float(l) ** float(delta) / 8)


def image_count(p: int) -> int:
    return 84 ** int(p)


def hit_expectation_B(n, l, delta) -> tuple[float, float]:
    """Lower/upper bounds on the expected number of properly h-hit segments."""
    n, l, delta = float(n), float(l), float(delta)
    base = n / l**2 - l**delta
    return 2 / math.e * base, 2 / math.e * (base + l ** (1 + delta))


def bound_calculators(name: str, params: Mapping) -> BoundValue:
    if name == "chernoff_hit":
        n = _num(params, "n")
        return BoundValue(name, chernoff_hit(n), -float(n) / (8 * math.e))
    if name == "union_bound":
        k, l = _num(params, "k"), _num(params, "l")
        delta = _num(params, "delta") if "delta" in params else None
        value, log_value, feasible = union_bound(k, l, delta)
        extra = {"feasible": feasible, "delta": float(delta) if delta is not None else 2.0 ** (-float(k) / (60 * float(l)))}
        return BoundValue(name, value, log_value, extra)
    if name == "l_bound":
        k = _num(params, "k")
        value = l_bound(k)
        extra = {"satisfied": float(_num(params, "l")) < value} if "l" in params else {}
        return BoundValue(name, value, None, extra)
    if name in ("azuma_hit", "cover_fraction_B"):
        l, delta = _num(params, "l"), _num(params, "delta")
        return BoundValue(name, azuma_hit(l, delta), math.log(2) - float(l) ** float(delta) / 8)
    if name == "image_count":
        p = _num(params, "p")
        if p.denominator != 1:
            raise InvalidArgument("p must be an integer")
        exact = image_count(int(p))
        return BoundValue(name, float(exact), int(p) * LN84, {"exact": exact}, note="exact count bound")
    if name == "hit_expectation_B":
        lo, hi = hit_expectation_B(_num(params, "n"), _num(params, "l"), _num(params, "delta"))
        return BoundValue(name, lo, None, {"lower": lo, "upper": hi})
    raise InvalidArgument(f"unknown bound {name!r}")


BOUND_NAMES = ("chernoff_hit", "union_bound", "l_bound", "azuma_hit", "cover_fraction_B", "image_count", "hit_expectation_B")
