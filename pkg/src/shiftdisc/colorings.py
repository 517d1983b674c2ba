"""The two k-set colorings built on a shift-graph coloring kappa.

``gamma_explicit``   sum of kappa over the k/l disjoint consecutive blocks, mod c.
``gamma_randomized`` a seeded hash of the sliding-window color vector, as a sign.

Hash layout for ``gamma_randomized`` (algorithm id ``blake2b-64/u8``): BLAKE2b
with an 8-byte digest, keyed by the seed as 8 little-endian bytes (seed mod
2**64); the message is the window vector, one byte per entry (colors 1..255).
The sign is +1 when the digest, read little-endian, is odd.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .cubes import Cube, enumerate_cube, main_projections
from .errors import InvalidArgument

HASH_ID = "blake2b-64/u8"


def window_vector(X: Sequence[int], kappa) -> tuple[int, ...]:
    """kappa colors (shifted to 1..) of the k - l + 1 windows of l consecutive elements."""
    if len(X) < kappa.l:
        raise InvalidArgument(f"|X| = {len(X)} is smaller than the window length {kappa.l}")
    return tuple(c + 1 for c in kappa.window_colors(tuple(X)))


def block_vector(X: Sequence[int], kappa) -> tuple[int, ...]:
    """kappa colors (0-based) of the consecutive disjoint l-blocks of X."""
    l = kappa.l
    if len(X) % l:
        raise InvalidArgument(f"|X| = {len(X)} is not divisible by l = {l}")
    X = tuple(X)
    return tuple(kappa.color(X[i:i + l]) for i in range(0, len(X), l))


def _check_explicit(kappa, c: int) -> None:
    if c < 3 or c % 2 == 0:
        raise InvalidArgument(f"c={c} must be odd and >= 3")
    if not kappa.is_three_color:
        raise InvalidArgument(f"kappa uses {kappa.num_colors} colors; the explicit coloring needs 3")


def gamma_explicit(X: Sequence[int], kappa, c: int = 3) -> int:
    _check_explicit(kappa, c)
    return sum(block_vector(X, kappa)) % c


def psi_hash(vector: Sequence[int], seed: int) -> int:
    key = (seed % (1 << 64)).to_bytes(8, "little")
    digest = hashlib.blake2b(bytes(vector), digest_size=8, key=key).digest()
    return 1 if int.from_bytes(digest, "little") & 1 else -1


def gamma_randomized(X: Sequence[int], kappa, seed: int = 0) -> int:
    return psi_hash(window_vector(X, kappa), seed)


@dataclass(frozen=True)
class Coloring:
    """A k-set coloring together with its color set (needed for discrepancy)."""

    fn: Callable[[tuple[int, ...]], int]
    colors: tuple[int, ...]
    name: str = "custom"

    def __call__(self, X) -> int:
        return self.fn(X)


def explicit_coloring(kappa, c: int = 3) -> Coloring:
    _check_explicit(kappa, c)
    l = kappa.l

    def fn(X):
        if len(X) % l:
            raise InvalidArgument(f"|X| = {len(X)} is not divisible by l = {l}")
        return sum(kappa.color(X[i:i + l]) for i in range(0, len(X), l)) % c

    return Coloring(fn, tuple(range(c)), f"explicit(c={c})")


def randomized_coloring(kappa, seed: int = 0) -> Coloring:
    return Coloring(lambda X: gamma_randomized(X, kappa, seed), (-1, 1), f"randomized(seed={seed})")


def cube_block_options(cube: Cube, kappa) -> tuple[int, list[tuple[int, int]], dict[int, int]]:
    """Split gamma_explicit on a variant-B cube into a constant and per-block options.

    Returns (A, [(a_q, b_q) for q in B], q_of) where a member's block-color sum is
    A plus, for each main block q, a_q or b_q; q_of maps each i in J to its block.
    Only two members are colored here; the structure is checked elsewhere.
    """
    if cube.variant != "B":
        raise InvalidArgument("block options are defined for variant-B cubes")
    d = cube.dimension
    base = cube.member([0] * d)
    q_of, B = main_projections(cube, [base, cube.member([1] * d)])
    blocks = block_vector(base, kappa)
    A = sum(c for q, c in enumerate(blocks, start=1) if q not in B)
    options = [(kappa.color(first), kappa.color(second)) for first, second in cube.options()]
    return A, options, q_of


def cube_color_counts(cube: Cube, kappa, c: int = 3) -> np.ndarray:
    """Exact color counts of gamma_explicit over all 2^d members (vectorised)."""
    _check_explicit(kappa, c)
    A, options, _ = cube_block_options(cube, kappa)
    d = len(options)
    idx = np.arange(1 << d, dtype=np.int64)
    total = np.full(1 << d, A, dtype=np.int64)
    for r, (a, b) in enumerate(options):
        total += np.where((idx >> r) & 1, b, a)
    return np.bincount(total % c, minlength=c)


def affine_model_counts(options: list[tuple[int, int]], A: int, c: int) -> list[int]:
    """Color counts of A + sum of one option per coordinate, mod c, by convolution."""
    counts = [0] * c
    counts[A % c] = 1
    for a, b in options:
        counts = [counts[(r - a) % c] + counts[(r - b) % c] for r in range(c)]
    return counts


def member_colors(cube: Cube, kappa, c: int = 3) -> list[int]:
    """gamma_explicit evaluated directly on every member (small cubes)."""
    return [gamma_explicit(X, kappa, c) for X in enumerate_cube(cube)]
