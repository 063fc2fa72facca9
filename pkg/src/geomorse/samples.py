"""Shipped irrational seeds and deterministic interval placement."""
from __future__ import annotations

from fractions import Fraction

from .exactnum import ExactScalar, compare, scalar, sqrt_scalar

# three quadratic seeds in (0,1) with distinct radicands
DEFAULT_SAMPLES: tuple[ExactScalar, ...] = (
    sqrt_scalar(2, Fraction(1, 2)),
    sqrt_scalar(3) - 1,
    sqrt_scalar(5, Fraction(1, 2)) - Fraction(1, 2),
)


def place_in_interval(seed: ExactScalar, lo: Fraction, hi: Fraction) -> ExactScalar:
    """Seed itself when it already lies in (lo, hi), otherwise the seed
    rescaled affinely into that open interval.  Irrationality is preserved."""
    if lo >= hi:
        raise ValueError(f"empty interval ({lo}, {hi})")
    if compare(seed, lo) > 0 and compare(seed, hi) < 0:
        return seed
    return scalar(lo) + seed * (hi - lo)
