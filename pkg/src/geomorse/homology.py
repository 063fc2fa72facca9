"""Betti numbers of the quotient free loop space for truncated-polynomial
cohomology rings, with exact partial sums and their closed forms.

The ring is Q[x]/(x^(h+1)) with deg x = d.  For odd d (forcing h = 1) the
table follows the sphere pattern directly.  For even d the table is the
coefficient sequence of a rational generating function; both the closed
per-degree rule and the expanded series are implemented so each can audit
the other.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


def _check_dh(d: int, h: int) -> None:
    if d < 2 or h < 1:
        raise ValueError("need generator degree d >= 2 and height h >= 1")
    if d % 2 == 1 and h != 1:
        raise ValueError("odd generator degree forces height 1")


def big_d(d: int, h: int) -> int:
    return d * (h + 1) - 2


@dataclass(frozen=True)
class BettiTable:
    d: int
    h: int
    q_max: int
    values: tuple[int, ...]

    @property
    def D(self) -> int:
        return big_d(self.d, self.h)

    def __getitem__(self, q: int) -> int:
        if q < 0:
            return 0
        if q > self.q_max:
            raise IndexError(f"degree {q} beyond table bound {self.q_max}")
        return self.values[q]


def B_constant(d: int, h: int) -> Fraction:
    """The constant that the weighted sum of mean characteristics must equal."""
    _check_dh(d, h)
    if d % 2 == 0:
        return Fraction(-h * (h + 1) * d, 2 * d * (h + 1) - 4)
    return Fraction(d + 1, 2 * d - 2)


# -- series oracle ---------------------------------------------------------------


def _poly_mul(a: list[int], b: list[int], q_max: int) -> list[int]:
    out = [0] * (q_max + 1)
    for i, ai in enumerate(a):
        if ai == 0 or i > q_max:
            continue
        top = min(len(b) - 1, q_max - i)
        for j in range(top + 1):
            if b[j]:
                out[i + j] += ai * b[j]
    return out


def _series_div(num: list[int], den: list[int], q_max: int) -> list[int]:
    """Power-series coefficients of num/den up to degree q_max (den[0] != 0)."""
    if den[0] == 0:
        raise ZeroDivisionError("denominator has no constant term")
    out = [0] * (q_max + 1)
    for q in range(q_max + 1):
        acc = num[q] if q < len(num) else 0
        for j in range(1, min(q, len(den) - 1) + 1):
            if den[j]:
                acc -= den[j] * out[q - j]
        if acc % den[0] != 0:
            raise ArithmeticError("series coefficients are not integral")
        out[q] = acc // den[0]
    return out


def _one_minus_t(power: int, q_max: int) -> list[int]:
    out = [0] * (max(power, 0) + 1)
    out[0] = 1
    if power <= q_max + 1:
        out[power] = -1
    return out[: q_max + 2]


def series_coefficients(d: int, h: int, q_max: int) -> list[int]:
    """Generating-function expansion of the Betti sequence, degree by degree."""
    _check_dh(d, h)
    if d % 2 == 0:
        D = big_d(d, h)
        num = _poly_mul(_one_minus_t(D + 2, q_max), _one_minus_t(d * h, q_max), q_max)
        num = [0] * (d - 1) + num  # t^(d-1) prefactor
        den = _poly_mul(
            _poly_mul(_one_minus_t(2, q_max), _one_minus_t(D, q_max), q_max),
            _one_minus_t(d, q_max),
            q_max,
        )
        return _series_div(num[: q_max + 1], den, q_max)
    # odd d: one cohomology generator, sphere-like pattern
    # t^(d-1)/(1-t^2) + t^(2d-2)/(1-t^(d-1))
    a = _series_div([0] * (d - 1) + [1], _one_minus_t(2, q_max), q_max)
    b = _series_div([0] * (2 * d - 2) + [1], _one_minus_t(d - 1, q_max), q_max)
    return [x + y for x, y in zip(a, b)]


# -- closed per-degree rule --------------------------------------------------------


def _u_term(d: int, h: int, k: int) -> int:
    if k < 0 or k % 2 == 1:
        return 0
    if k < (h - 1) * d:
        return k // d + 1
    return h


def _v_count(d: int, h: int, k: int) -> int:
    """Number of representations k = i*D + j*d with i >= 1, 0 <= j <= h-1.

    D > (h-1)*d makes the representation unique, so this is 0 or 1; scanning
    the h values of j keeps the query O(h) for any k.
    """
    D = big_d(d, h)
    hits = 0
    for j in range(h):
        rem = k - j * d
        if rem >= D and rem % D == 0:
            hits += 1
    return hits


def betti_closed(d: int, h: int, q: int) -> int:
    """Betti number in one degree, by the closed rule."""
    _check_dh(d, h)
    if q < 0:
        return 0
    if d % 2 == 0:
        if q % 2 == 0 or q <= d - 2:
            return 0
        k = q - (d - 1)
        return _u_term(d, h, k) + _v_count(d, h, k)
    # odd d, h = 1
    if q % 2 == 1 or q < d - 1:
        return 0
    if q >= 2 * (d - 1) and q % (d - 1) == 0:
        return 2
    return 1


def betti_series(d: int, h: int, q_max: int) -> BettiTable:
    """Betti table from the series expansion; the closed rule must agree."""
    vals = series_coefficients(d, h, q_max)
    return BettiTable(d, h, q_max, tuple(vals))


def betti_table(d: int, h: int, q_max: int) -> BettiTable:
    """Betti table from the closed rule (cheap for large ranges)."""
    _check_dh(d, h)
    return BettiTable(d, h, q_max, tuple(betti_closed(d, h, q) for q in range(q_max + 1)))


# -- partial sums and their closed forms ------------------------------------------


def _frac_mod(a: int, b: int) -> Fraction:
    return Fraction(a % b, b)


def epsilon_term(d: int, h: int, k: int) -> Fraction:
    """Bounded defect of the linear closed form of the cumulative sum (even d)."""
    _check_dh(d, h)
    if d % 2 != 0:
        raise ValueError("the defect term is defined for even generator degree")
    D = big_d(d, h)
    m = (k - (d - 1)) % D
    return (
        _frac_mod(m, h * d)
        - (Fraction(2, d) + Fraction(d - 2, h * d)) * Fraction(m, D)
        - h * _frac_mod(m, 2)
        - _frac_mod(m, d)
    )


def partial_sum(d: int, h: int, k: int, signed: bool = False) -> int:
    """Sum of Betti numbers through degree k (alternating if ``signed``),
    cross-checked against the closed forms.

    Admissible k: at least d-1; for even d with h >= 2 the linear closed
    form needs k >= h*d - 1.
    """
    _check_dh(d, h)
    if k < d - 1:
        raise ValueError(f"partial sums need k >= d-1 = {d - 1}")
    vals = [betti_closed(d, h, q) for q in range(k + 1)]
    total = sum(vals)
    alternating = sum(v if q % 2 == 0 else -v for q, v in enumerate(vals))
    if d % 2 == 1:
        # support on even degrees: total equals the alternating sum
        closed = k // (d - 1) + k // 2 - (d - 1) // 2
        eps = _frac_mod(k, d - 1) + _frac_mod(k, 2)
        linear = Fraction(k * (d + 1), 2 * (d - 1)) - Fraction(d - 1, 2) - eps
        if total != closed or alternating != closed or linear != total:
            raise ArithmeticError(f"cumulative sum mismatch at (d,h,k)=({d},{h},{k})")
        if not (0 <= eps < Fraction(3, 2) - Fraction(1, 2 * (d - 1))):
            raise ArithmeticError(f"defect bound failed at (d,h,k)=({d},{h},{k})")
    else:
        # support on odd degrees: total equals minus the alternating sum
        if h == 1:
            closed = ((k // (d - 1)) + 1) // 2 + (k + 1) // 2 - d // 2
            if total != closed or alternating != -closed:
                raise ArithmeticError(f"cumulative sum mismatch at (d,h,k)=({d},{h},{k})")
        if k >= h * d - 1:
            D = big_d(d, h)
            eps = epsilon_term(d, h, k)
            linear = (
                Fraction(h * (h + 1) * d, 2 * D) * (k - (d - 1))
                - Fraction(h * (h - 1) * d, 4)
                + 1
                + eps
            )
            if linear != total:
                raise ArithmeticError(f"linear closed form failed at (d,h,k)=({d},{h},{k})")
            if not (Fraction(-(h + 2)) < eps < 1):
                raise ArithmeticError(f"defect bound failed at (d,h,k)=({d},{h},{k})")
    return alternating if signed else total


def verify_partial_sums(d: int, h: int, k_max: int) -> int:
    """Check every admissible cumulative-sum identity for k <= k_max in one
    pass; returns the number of k values checked, raises on any mismatch."""
    _check_dh(d, h)
    vals = series_coefficients(d, h, k_max)
    total = 0
    alternating = 0
    checked = 0
    if d % 2 == 0:
        D = big_d(d, h)
        slope = Fraction(h * (h + 1) * d, 2 * D)
        eps_cycle = [epsilon_term(d, h, (d - 1) + m) for m in range(D)]
    for k in range(k_max + 1):
        total += vals[k]
        alternating += vals[k] if k % 2 == 0 else -vals[k]
        if k < d - 1:
            continue
        if d % 2 == 1:
            closed = k // (d - 1) + k // 2 - (d - 1) // 2
            eps = _frac_mod(k, d - 1) + _frac_mod(k, 2)
            linear = Fraction(k * (d + 1), 2 * (d - 1)) - Fraction(d - 1, 2) - eps
            ok = (
                total == closed == alternating
                and linear == total
                and 0 <= eps < Fraction(3, 2) - Fraction(1, 2 * (d - 1))
            )
        else:
            ok = alternating == -total
            if h == 1:
                closed = ((k // (d - 1)) + 1) // 2 + (k + 1) // 2 - d // 2
                ok = ok and total == closed
            if ok and k >= h * d - 1:
                eps = eps_cycle[(k - (d - 1)) % D]
                linear = slope * (k - (d - 1)) - Fraction(h * (h - 1) * d, 4) + 1 + eps
                ok = linear == total and Fraction(-(h + 2)) < eps < 1
        if not ok:
            raise ArithmeticError(f"cumulative sum identity failed at (d,h,k)=({d},{h},{k})")
        checked += 1
    return checked


def odd_sum_below_top_degree(d: int, h: int) -> Fraction:
    """Closed value of the Betti sum over odd degrees up to d*h - 3 (even d)."""
    if d % 2 != 0:
        raise ValueError("needs even generator degree")
    return Fraction(d * h * (h - 1), 4)
