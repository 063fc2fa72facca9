"""Quasi-monotonicity certificates for iterated Morse indices.

When the index sequence is not monotone, one can still find powers T whose
index separates everything before from everything after by explicit
constants: index(m) - index(T) >= K1 for m > T and index(T) - index(m) >= K2
for m < T.  A certificate packages such a T (found by a bounded corner
search over the irrational turns restricted to multiples of the analytical
period) together with the constants and the search margins that make the
separation provable.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .equidist import iter_pattern_hits
from .exactnum import ExactScalar, frac_exact, scalar
from .iteration import (
    GeodesicSpec,
    _profile,
    analytical_period,
    index,
    index_sweep,
    mean_index,
)
from .normalforms import counts


def index_floor_form(spec: GeodesicSpec, m: int) -> int:
    """m*lam + twice the sum of floors of m times each rotation turn.

    A linear-minus-bounded skeleton of the index; defined for positive mean
    index only, since it is used to certify eventual growth.
    """
    if mean_index(spec).sign() <= 0:
        raise ValueError("the growth skeleton needs positive mean index")
    p = _profile(spec)
    tot = m * p.lam
    for ang in p.rot_angles:
        if ang.rational:
            tot += 2 * ((m * ang.num) // ang.den)
        else:
            tot += 2 * (ang.value * m).floor()
    return tot


def growth_threshold(spec: GeodesicSpec) -> int:
    """Least m1 with floor form >= i1 + 4*dim(M) + 2k from m1 onward.

    The scan range is capped by the certified linear lower bound
    floor_form(m) >= m*mean_index - 2r.
    """
    ih = mean_index(spec)
    if ih.sign() <= 0:
        raise ValueError("the growth threshold needs positive mean index")
    c = counts(spec.dec)
    thresh = spec.i1 + 4 * spec.manifold_dim + 2 * c.k
    cap = (scalar(thresh + 2 * c.r) / ih).floor() + 1
    m1 = 1
    for m in range(1, cap + 1):
        if index_floor_form(spec, m) < thresh:
            m1 = m + 1
    return m1


def _irrational_sigmas(spec: GeodesicSpec) -> tuple[ExactScalar, ...]:
    return _profile(spec).irr_sigmas


def _min_frac(sigmas, coords, m1) -> ExactScalar | None:
    best = None
    for j in coords:
        for m in range(1, m1 + 1):
            f = frac_exact(sigmas[j] * m)
            if best is None or f < best:
                best = f
    return best


def corner_margins(spec: GeodesicSpec, A: int) -> tuple[ExactScalar, ExactScalar | None]:
    """Exact minima of {m*sigma_j} for the first A irrational turns and for
    the remaining ones, over m up to the growth threshold.

    The second value is None when A equals the number of irrational turns.
    """
    sig = _irrational_sigmas(spec)
    k = len(sig)
    if not 1 <= A <= k:
        raise ValueError(f"A must lie in [1, {k}]")
    m1 = growth_threshold(spec)
    alpha = _min_frac(sig, range(A), m1)
    beta = _min_frac(sig, range(A, k), m1) if A < k else None
    return alpha, beta


@dataclass(frozen=True)
class QuasiMonoCert:
    pattern: tuple[int, ...]
    coords: tuple[int, ...]
    A: int
    T: int
    K1: int
    K2: int
    epsilon: Fraction
    eps_used: Fraction
    m1: int
    alpha: ExactScalar
    beta: ExactScalar | None


def _rational_below(x: ExactScalar, resolution: int = 10**12) -> Fraction:
    """A positive rational strictly below x (x > 0)."""
    if x.is_rational():
        f = x.as_fraction()
        return f - Fraction(1, max(2 * f.denominator, resolution))
    n = (x * resolution).floor()
    if n <= 0:
        return _rational_below(x, resolution * resolution)
    return Fraction(n, resolution)


def _separation_constants(spec: GeodesicSpec, A: int) -> tuple[int, int]:
    c = counts(spec.dec)
    lam = spec.i1 + c.p_minus + c.p_zero - c.r
    q_even = c.q_zero + c.q_plus
    K1 = lam + q_even + 2 * (c.r - c.k) + 2 * (c.r_star - c.k_star) + 2 * A
    K2 = lam - q_even + 2 * c.k - 2 * (c.r_star - c.k_star) - 2 * A
    return K1, K2


def certificate(
    spec: GeodesicSpec,
    epsilon,
    m_max: int = 10**6,
    min_index_at_T: int = 0,
) -> QuasiMonoCert | None:
    """Search for a separating power T among multiples of the period.

    Patterns are tried by decreasing size of the high set, lexicographically
    within one size, down to the guaranteed floor of half the irrational
    turns (rounded up).  The scan margin is the requested epsilon shrunk
    below the exact corner margins, so a found T provably separates.  None
    means the bounded search was exhausted.
    """
    eps = Fraction(epsilon)
    if not Fraction(0) < eps < Fraction(1, 4):
        raise ValueError("epsilon must lie in (0, 1/4)")
    if mean_index(spec).sign() <= 0:
        raise ValueError("certificates need positive mean index")
    sig = _irrational_sigmas(spec)
    k = len(sig)
    if k < 1:
        raise ValueError("certificates need at least one irrational turn")
    _, n = analytical_period(spec)
    m1 = growth_threshold(spec)
    a_floor = (k + 1) // 2
    for A in range(k, a_floor - 1, -1):
        for high in itertools.combinations(range(k), A):
            chi = tuple(int(j in high) for j in range(k))
            alpha = _min_frac(sig, high, m1)
            beta = _min_frac(sig, [j for j in range(k) if j not in high], m1)
            eps_used = min(eps, _rational_below(alpha if beta is None else min(alpha, beta)))
            for T in iter_pattern_hits(sig, chi, eps_used, step=n, m_max=m_max):
                if index(spec, T) < min_index_at_T:
                    continue
                K1, K2 = _separation_constants(spec, A)
                return QuasiMonoCert(
                    pattern=chi,
                    coords=tuple(high),
                    A=A,
                    T=T,
                    K1=K1,
                    K2=K2,
                    epsilon=eps,
                    eps_used=eps_used,
                    m1=m1,
                    alpha=alpha,
                    beta=beta,
                )
    return None


@dataclass(frozen=True)
class VerifyReport:
    T: int
    checked_below: int
    checked_above: int
    violations: tuple[tuple[str, int, int], ...]  # (side, m, gap)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_certificate(spec: GeodesicSpec, cert: QuasiMonoCert, check_to: int) -> VerifyReport:
    """Exact sweep of both separation inequalities.

    Any violation is fatal: the constants are provable consequences of the
    construction, so a failure indicates corrupted inputs, never a near miss.
    """
    T = cert.T
    i_T = index(spec, T)
    violations: list[tuple[str, int, int]] = []
    hi = max(check_to, 0)
    below = 0
    above = 0
    if T > 1:
        idx = index_sweep(spec, T - 1)
        bad = np.flatnonzero(i_T - idx < cert.K2)
        below = T - 1
        violations.extend(("below", int(m) + 1, int(i_T - idx[m])) for m in bad)
    if hi > T:
        idx = index_sweep(spec, hi, m_from=T + 1)
        bad = np.flatnonzero(idx - i_T < cert.K1)
        above = hi - T
        violations.extend(("above", T + 1 + int(m), int(idx[m] - i_T)) for m in bad)
    return VerifyReport(T=T, checked_below=below, checked_above=above, violations=tuple(violations))


def max_jump(spec: GeodesicSpec, cert: QuasiMonoCert) -> int:
    """Index jump across the separating power when every irrational turn is
    in the high set; asserts the closed tally formula for the jump."""
    sig = _irrational_sigmas(spec)
    if cert.A != len(sig):
        raise ValueError("the maximal jump needs the full high set")
    c = counts(spec.dec)
    jump = index(spec, cert.T + 1) - index(spec, cert.T)
    expected = (
        spec.i1
        + c.p_minus
        + c.p_zero
        + c.q_zero
        + c.q_plus
        + c.r
        + 2 * (c.r_star - c.k_star)
    )
    if jump != expected:
        raise ArithmeticError(
            f"jump {jump} at T={cert.T} does not match the tally value {expected}"
        )
    return jump
