"""Exact arithmetic over rationals extended by square roots of integers.

A value is ``q0 + q1*sqrt(n1) + ... + qk*sqrt(nk)`` with rational
coefficients and pairwise distinct square-free radicands ``ni >= 2``.
Distinct square-free square roots are linearly independent over the
rationals, so the canonical form is unique: a value is zero iff its
canonical form is empty, and equality is structural.

Signs, floors and ceilings of nonzero values are certified by refining
integer bounds on each sqrt(n) (via ``math.isqrt``) until the question is
decided.  Refinement always terminates because a nonzero value is detected
syntactically first.  No floating point is used anywhere in this module.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

Rational = Fraction

LESS, EQUAL, GREATER = -1, 0, 1


def square_free_split(n: int) -> tuple[int, int]:
    """Split n >= 1 as s*s*f with f square-free; returns (s, f)."""
    if n < 1:
        raise ValueError("radicand must be positive")
    s, f, m, d = 1, 1, n, 2
    while d * d <= m:
        if m % d == 0:
            e = 0
            while m % d == 0:
                m //= d
                e += 1
            s *= d ** (e // 2)
            if e % 2:
                f *= d
        d += 1 if d == 2 else 2
    f *= m
    return s, f


def _merge_sqrt(a: int, b: int) -> tuple[int, int]:
    """sqrt(a)*sqrt(b) = g*sqrt(f) for square-free a, b; returns (g, f)."""
    g = gcd(a, b)
    return g, (a // g) * (b // g)


@dataclass(frozen=True)
class ExactScalar:
    """Canonical rational-plus-radicals value; immutable and hashable."""

    base: Fraction = Fraction(0)
    terms: tuple[tuple[Fraction, int], ...] = ()

    def __post_init__(self) -> None:
        last = 1
        for coeff, rad in self.terms:
            if coeff == 0:
                raise ValueError("zero coefficient in canonical form")
            if rad <= last:
                raise ValueError("radicands must be distinct and increasing")
            if square_free_split(rad)[0] != 1:
                raise ValueError(f"radicand {rad} is not square-free")
            last = rad

    # -- construction -----------------------------------------------------

    @staticmethod
    def _build(base: Fraction, termmap: dict[int, Fraction]) -> "ExactScalar":
        items = tuple(sorted((r, c) for r, c in termmap.items() if c != 0 and r != 1))
        extra = termmap.get(1, Fraction(0))
        return ExactScalar(base + extra, tuple((c, r) for r, c in items))

    # -- predicates --------------------------------------------------------

    def is_rational(self) -> bool:
        return not self.terms

    def is_integer(self) -> bool:
        return not self.terms and self.base.denominator == 1

    def as_fraction(self) -> Fraction:
        if self.terms:
            raise ValueError("value is irrational")
        return self.base

    # -- ring operations ---------------------------------------------------

    @staticmethod
    def _coerce(x) -> "ExactScalar":
        if isinstance(x, ExactScalar):
            return x
        if isinstance(x, (int, Fraction)):
            return ExactScalar(Fraction(x))
        return NotImplemented

    def __add__(self, other) -> "ExactScalar":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        tm: dict[int, Fraction] = {r: c for c, r in self.terms}
        for c, r in other.terms:
            tm[r] = tm.get(r, Fraction(0)) + c
        return self._build(self.base + other.base, tm)

    __radd__ = __add__

    def __neg__(self) -> "ExactScalar":
        return ExactScalar(-self.base, tuple((-c, r) for c, r in self.terms))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other) -> "ExactScalar":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        base = self.base * other.base
        tm: dict[int, Fraction] = {}
        for c, r in self.terms:
            tm[r] = tm.get(r, Fraction(0)) + c * other.base
        for c, r in other.terms:
            tm[r] = tm.get(r, Fraction(0)) + c * self.base
        for c1, r1 in self.terms:
            for c2, r2 in other.terms:
                g, f = _merge_sqrt(r1, r2)
                val = c1 * c2 * g
                if f == 1:
                    base += val
                else:
                    tm[f] = tm.get(f, Fraction(0)) + val
        return self._build(base, tm)

    __rmul__ = __mul__

    def _split_prime(self) -> tuple[int, "ExactScalar", "ExactScalar"]:
        """Write self = A + B*sqrt(p) for the smallest prime p in any radicand."""
        rad = self.terms[0][1]
        p = 2
        while rad % p:
            p += 1 if p == 2 else 2
        a_tm: dict[int, Fraction] = {}
        b_base = Fraction(0)
        b_tm: dict[int, Fraction] = {}
        for c, r in self.terms:
            if r % p == 0:
                rr = r // p
                if rr == 1:
                    b_base += c
                else:
                    b_tm[rr] = b_tm.get(rr, Fraction(0)) + c
            else:
                a_tm[r] = c
        return p, self._build(self.base, a_tm), self._build(b_base, b_tm)

    def inverse(self) -> "ExactScalar":
        if self.is_zero():
            raise ZeroDivisionError("exact scalar division by zero")
        if not self.terms:
            return ExactScalar(1 / self.base)
        p, a, b = self._split_prime()
        denom = a * a - b * b * p
        return (a - b * sqrt_scalar(p)) * denom.inverse()

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    # -- certified sign, floor, comparison ----------------------------------

    def is_zero(self) -> bool:
        return self.base == 0 and not self.terms

    def _int_parts(self) -> tuple[int, list[tuple[int, int]], int]:
        """Common-denominator integer form: (b0, [(ci, ni)], den)."""
        den = self.base.denominator
        for c, _ in self.terms:
            den = den * c.denominator // gcd(den, c.denominator)
        b0 = self.base.numerator * (den // self.base.denominator)
        parts = [(c.numerator * (den // c.denominator), r) for c, r in self.terms]
        return b0, parts, den

    def _scaled_bounds(self, prec: int, b0: int, parts) -> tuple[int, int]:
        """Integer bounds: lo <= value*den*2^prec <= hi."""
        lo = hi = b0 << prec
        for ci, ni in parts:
            s = isqrt(ni << (2 * prec))
            if ci >= 0:
                lo += ci * s
                hi += ci * (s + 1)
            else:
                lo += ci * (s + 1)
                hi += ci * s
        return lo, hi

    def sign(self) -> int:
        if self.is_zero():
            return 0
        if not self.terms:
            return 1 if self.base > 0 else -1
        b0, parts, _ = self._int_parts()
        prec = 16
        while True:
            lo, hi = self._scaled_bounds(prec, b0, parts)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            prec *= 2

    def floor(self) -> int:
        if not self.terms:
            return self.base.numerator // self.base.denominator
        b0, parts, den = self._int_parts()
        prec = 16
        while True:
            lo, hi = self._scaled_bounds(prec, b0, parts)
            q = den << prec
            flo, fhi = lo // q, hi // q
            if flo == fhi:
                return flo
            prec *= 2

    # -- ordering ------------------------------------------------------------

    def __lt__(self, other) -> bool:
        return compare(self, other) == LESS

    def __le__(self, other) -> bool:
        return compare(self, other) != GREATER

    def __gt__(self, other) -> bool:
        return compare(self, other) == GREATER

    def __ge__(self, other) -> bool:
        return compare(self, other) != LESS

    def __repr__(self) -> str:
        return f"ExactScalar({format_scalar(self)!r})"


def scalar(x) -> ExactScalar:
    """Exact scalar from an int or Fraction (or pass through)."""
    out = ExactScalar._coerce(x)
    if out is NotImplemented:
        raise TypeError(f"cannot make an exact scalar from {type(x).__name__}")
    return out


def sqrt_scalar(n: int, coeff=1) -> ExactScalar:
    """coeff * sqrt(n) in canonical form (square part extracted)."""
    s, f = square_free_split(n)
    c = Fraction(coeff) * s
    if f == 1:
        return ExactScalar(c)
    if c == 0:
        return ExactScalar(Fraction(0))
    return ExactScalar(Fraction(0), ((c, f),))


def floor_exact(x) -> int:
    return scalar(x).floor()


def ceil_exact(x) -> int:
    return -((-scalar(x)).floor())


def frac_exact(x) -> ExactScalar:
    x = scalar(x)
    return x - x.floor()


def varphi_exact(x) -> int:
    """0 if x is an integer, else 1 (ceiling minus floor)."""
    return 0 if scalar(x).is_integer() else 1


def compare(x, y) -> int:
    """Exact total order: LESS (-1), EQUAL (0), or GREATER (+1)."""
    return (scalar(x) - scalar(y)).sign()


# -- text encoding: "p/q" or "p/q + (a/b)r{n} [+ ...]" ------------------------

_TERM_RE = re.compile(r"^\(\s*(-?\d+(?:\s*/\s*\d+)?)\s*\)\s*r\{\s*(\d+)\s*\}$")


def parse_scalar(text: str) -> ExactScalar:
    chunks = [c.strip() for c in text.split("+")]
    if not chunks or not chunks[0]:
        raise ValueError(f"empty scalar text: {text!r}")
    start = 0
    out = ExactScalar(Fraction(0))
    if not chunks[0].startswith("("):
        try:
            out = ExactScalar(Fraction(chunks[0].replace(" ", "")))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad rational part {chunks[0]!r}") from exc
        start = 1
    for chunk in chunks[start:]:
        m = _TERM_RE.match(chunk)
        if not m:
            raise ValueError(f"bad radical term {chunk!r}")
        out = out + sqrt_scalar(int(m.group(2)), Fraction(m.group(1).replace(" ", "")))
    return out


def _fmt_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(x: ExactScalar) -> str:
    parts = [_fmt_fraction(x.base)]
    for c, r in x.terms:
        parts.append(f"({_fmt_fraction(c)})r{{{r}}}")
    return " + ".join(parts)


HALF = Fraction(1, 2)


@dataclass(frozen=True)
class Turn:
    """Rotation amount as a fraction of a full turn, in (0,1) and not 1/2.

    The exclusion of 1/2 keeps the rotation angle away from pi, where the
    2x2 rotation block degenerates to -I.
    """

    value: ExactScalar

    def __post_init__(self) -> None:
        v = self.value
        if not isinstance(v, ExactScalar):
            object.__setattr__(self, "value", scalar(v))
            v = self.value
        if not self._valid(v):
            raise ValueError(f"turn {format_scalar(v)} outside (0,1)\\{{1/2}}")

    @staticmethod
    def _valid(v: ExactScalar) -> bool:
        if v.sign() <= 0 or compare(v, 1) != LESS:
            return False
        return not (v.is_rational() and v.base == HALF)

    @classmethod
    def unchecked(cls, value) -> "Turn":
        t = object.__new__(cls)
        object.__setattr__(t, "value", scalar(value))
        return t

    def is_rational(self) -> bool:
        return self.value.is_rational()

    def denominator(self) -> int:
        return self.value.as_fraction().denominator

    def __repr__(self) -> str:
        return f"Turn({format_scalar(self.value)})"


def scaled_floor(x, bits: int = 64) -> int:
    """floor(x * 2**bits), computed exactly."""
    return floor_exact(scalar(x) * (1 << bits))
