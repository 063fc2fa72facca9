"""geomorse: exact index iteration and Morse-theoretic audits for closed geodesics.

All arithmetic is exact: rationals plus rational combinations of square
roots of square-free integers.  Hot scan loops run on certified 64-bit
modular kernels (numba or numpy, see ``geomorse._kernels``) with an exact
fallback for the rare undecided cases, so results never depend on floating
point.
"""
from .exactnum import (
    ExactScalar,
    Rational,
    Turn,
    ceil_exact,
    compare,
    floor_exact,
    format_scalar,
    frac_exact,
    parse_scalar,
    scalar,
    sqrt_scalar,
    varphi_exact,
)

__all__ = [
    "ExactScalar",
    "Rational",
    "Turn",
    "ceil_exact",
    "compare",
    "floor_exact",
    "format_scalar",
    "frac_exact",
    "parse_scalar",
    "scalar",
    "sqrt_scalar",
    "varphi_exact",
]

__version__ = "0.1.0"
