from __future__ import annotations

import random
from fractions import Fraction

import pytest

from geomorse.exactnum import ExactScalar, Turn, compare, scalar, sqrt_scalar
from geomorse.iteration import GeodesicSpec
from geomorse.normalforms import (
    Decomposition,
    Hyp,
    N1Minus,
    N1Plus,
    N2Block,
    Rot,
    counts,
    index_parity,
)

IRRATIONAL_POOL: list[ExactScalar] = [
    sqrt_scalar(2, Fraction(1, 2)),
    sqrt_scalar(3) - 1,
    sqrt_scalar(5, Fraction(1, 2)) - Fraction(1, 2),
    sqrt_scalar(2) - 1,
    sqrt_scalar(7) - 2,
    sqrt_scalar(3, Fraction(1, 3)),
    scalar(Fraction(4, 3)) - sqrt_scalar(2, Fraction(1, 2)),
    sqrt_scalar(11) - 3,
    sqrt_scalar(6) - 2,
    sqrt_scalar(10, Fraction(1, 4)),
]


def random_turn(rng: random.Random) -> Turn:
    if rng.random() < 0.5:
        return Turn(rng.choice(IRRATIONAL_POOL))
    den = rng.choice([3, 4, 5, 6, 7, 8, 9])
    num = rng.randrange(1, den)
    while Fraction(num, den) == Fraction(1, 2):
        num = rng.randrange(1, den)
    return Turn(scalar(Fraction(num, den)))


def _block_with_index(rng: random.Random) -> tuple[object, int]:
    """One random block plus an initial index admissible for a path ending
    there.  Per-block index iteration never drops below these choices, so a
    spec assembled as a sum of such blocks satisfies the iterated lower
    bound by additivity."""
    kind = rng.randrange(6)
    if kind == 0:
        a = rng.choice([-1, 0, 1])
        i1b = 2 * rng.randrange(0, 3) if a == -1 else 1 + 2 * rng.randrange(0, 3)
        return N1Plus(a), i1b
    if kind == 1:
        return N1Minus(rng.choice([-1, 0, 1])), 1 + 2 * rng.randrange(0, 3)
    if kind in (2, 3):
        return Rot(random_turn(rng)), 1 + 2 * rng.randrange(0, 3)
    if kind == 4:
        turn = random_turn(rng)
        nontrivial = rng.random() < 0.5
        floor = 2 if (nontrivial and turn.is_rational()) else 0
        return N2Block(turn, nontrivial), floor + 2 * rng.randrange(0, 2)
    sign = rng.choice([-1, 1])
    i1b = 1 + 2 * rng.randrange(0, 3) if sign == -1 else 2 * rng.randrange(0, 3)
    return Hyp(sign), i1b


def random_spec(
    rng: random.Random, max_blocks: int = 4, require_positive_mean: bool = False
) -> GeodesicSpec:
    """A realizable random spec assembled block by block: each block carries
    an admissible path index, so the total initial index has the forced
    parity and the iterated index never drops below it."""
    while True:
        blocks = []
        i1 = 0
        h_minus_used = False
        for _ in range(rng.randrange(1, max_blocks + 1)):
            block, i1b = _block_with_index(rng)
            if isinstance(block, Hyp) and block.sign == -1:
                if h_minus_used:
                    block = Hyp(1)
                    i1b = 2 * rng.randrange(0, 3)
                h_minus_used = True
            blocks.append(block)
            i1 += i1b
        dec = Decomposition(blocks)
        spec = GeodesicSpec(dec, counts(dec).dim + 1, i1)
        if require_positive_mean:
            from geomorse.iteration import mean_index

            if mean_index(spec).sign() <= 0:
                continue
        return spec


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20260808)


@pytest.fixture
def canonical_spec() -> GeodesicSpec:
    """Two irrational rotations with turn sum 4/3 plus an N1(+1,-1) block."""
    s2 = sqrt_scalar(2, Fraction(1, 2))
    dec = Decomposition([Rot(Turn(scalar(Fraction(4, 3)) - s2)), Rot(Turn(s2)), N1Plus(-1)])
    return GeodesicSpec(dec, 4, 0)
