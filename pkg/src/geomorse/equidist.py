"""Bounded searches over fractional-part orbits {m*sigma} near corners of the
unit cube.

A corner pattern chi in {0,1}^k is hit at m when every coordinate with
chi_j = 1 has fractional part above 1-eps and every coordinate with
chi_j = 0 has fractional part below eps.  All hit decisions are exact: the
modular kernels certify almost every position and the leftovers are decided
with radical arithmetic.  Searches are exhaustive over multiples of a step,
so a miss only ever means "not within the scanned bound".
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from . import _kernels
from .exactnum import ExactScalar, Turn, compare, frac_exact, scalar, scaled_floor

VertexPattern = tuple[int, ...]

_CHUNK = 1 << 16


def _as_sigma(v) -> ExactScalar:
    x = v.value if isinstance(v, Turn) else scalar(v)
    if x.is_rational():
        raise ValueError("corner scans need irrational coordinates")
    if x.sign() <= 0 or compare(x, 1) >= 0:
        raise ValueError("coordinates must lie in (0,1)")
    return x


def _check_eps(epsilon) -> Fraction:
    eps = Fraction(epsilon)
    if not Fraction(0) < eps < Fraction(1, 4):
        raise ValueError("epsilon must lie in (0, 1/4)")
    return eps


def _classify_exact(sigma: ExactScalar, m: int, eps: Fraction) -> int:
    f = frac_exact(sigma * m)
    if compare(f, eps) < 0:
        return _kernels.LOW
    if compare(f, 1 - eps) > 0:
        return _kernels.HIGH
    return _kernels.MID


def _code_stream(
    sigmas: Sequence[ExactScalar],
    xs: Sequence[int],
    eps: Fraction,
    m_max: int,
    step: int,
) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yields (m values, code matrix) chunkwise; ambiguities already resolved."""
    j_max = m_max // step
    th = _kernels.corner_thresholds(eps, m_max)
    x_steps = [(x * step) & _kernels.MASK64 for x in xs]
    j0 = 1
    while j0 <= j_max:
        cnt = min(_CHUNK, j_max - j0 + 1)
        ms = np.arange(j0, j0 + cnt, dtype=np.int64) * step
        codes = np.empty((len(sigmas), cnt), dtype=np.uint8)
        for i, xp in enumerate(x_steps):
            row = _kernels.corner_chunk(xp, j0, cnt, th)
            if (row == _kernels.AMB).any():
                for pos in np.flatnonzero(row == _kernels.AMB):
                    row[pos] = _classify_exact(sigmas[i], int(ms[pos]), eps)
            codes[i] = row
        yield ms, codes
        j0 += cnt


def _prepare(sigmas, epsilon, step):
    sig = [_as_sigma(s) for s in sigmas]
    if not sig:
        raise ValueError("need at least one coordinate")
    if step < 1:
        raise ValueError("step must be positive")
    return sig, [scaled_floor(s) for s in sig], _check_eps(epsilon)


def vertex_hits(
    sigmas: Sequence, epsilon, m_max: int, step: int = 1
) -> dict[VertexPattern, list[int]]:
    """All corner hits up to m_max on multiples of step, keyed by pattern."""
    sig, xs, eps = _prepare(sigmas, epsilon, step)
    out: dict[VertexPattern, list[int]] = {}
    if m_max < step:
        return out
    for ms, codes in _code_stream(sig, xs, eps, m_max, step):
        interesting = ~(codes == _kernels.MID).any(axis=0)
        for pos in np.flatnonzero(interesting):
            col = codes[:, pos]
            if ((col == _kernels.LOW) | (col == _kernels.HIGH)).all():
                chi = tuple(int(c == _kernels.HIGH) for c in col)
                out.setdefault(chi, []).append(int(ms[pos]))
    return out


def _pattern_hits(sig, xs, eps, m_max, step, chi, m_min=1) -> Iterator[int]:
    want = np.array([_kernels.HIGH if c else _kernels.LOW for c in chi], dtype=np.uint8)
    for ms, codes in _code_stream(sig, xs, eps, m_max, step):
        match = (codes == want[:, None]).all(axis=0)
        for pos in np.flatnonzero(match):
            m = int(ms[pos])
            if m >= m_min:
                yield m


def find_T(
    sigmas: Sequence,
    P: Sequence[int],
    epsilon,
    step: int = 1,
    m_max: int = 10**6,
    m_min: int = 1,
) -> int | None:
    """Least multiple of step, at most m_max, whose orbit point sits in the
    eps-corner with coordinates of P high and the rest low; None if the
    bounded scan finds nothing."""
    sig, xs, eps = _prepare(sigmas, epsilon, step)
    pset = set(P)
    if not pset <= set(range(len(sig))):
        raise ValueError("P must be a subset of coordinate positions")
    chi = tuple(int(i in pset) for i in range(len(sig)))
    for m in _pattern_hits(sig, xs, eps, m_max, step, chi, m_min):
        return m
    return None


def iter_pattern_hits(
    sigmas: Sequence, chi: VertexPattern, epsilon, step: int = 1, m_max: int = 10**6,
    m_min: int = 1,
) -> Iterator[int]:
    """Stream of hits for one pattern, ascending."""
    sig, xs, eps = _prepare(sigmas, epsilon, step)
    if len(chi) != len(sig):
        raise ValueError("pattern length must match coordinate count")
    return _pattern_hits(sig, xs, eps, m_max, step, chi, m_min)


def reachable_vertices(sigmas: Sequence, epsilon, m_max: int, step: int = 1) -> set[VertexPattern]:
    """Patterns with at least one hit within the scanned bound."""
    return {chi for chi, hits in vertex_hits(sigmas, epsilon, m_max, step).items() if hits}


def opposite_vertex_check(
    sigmas: Sequence, epsilon, m_max: int, m_max_opposite: int | None = None, step: int = 1
) -> dict[VertexPattern, str]:
    """Bounded witness check that reachability is symmetric under chi -> 1-chi.

    Returns, for every pattern hit within m_max, either "confirmed" (the
    opposite pattern was also hit, scanning up to m_max_opposite) or
    "unconfirmed within bound"; a miss is never a refutation.
    """
    sig = [_as_sigma(s) for s in sigmas]
    xs = [scaled_floor(s) for s in sig]
    eps = _check_eps(epsilon)
    far = m_max if m_max_opposite is None else m_max_opposite
    out: dict[VertexPattern, str] = {}
    for chi in reachable_vertices(sigmas, epsilon, m_max, step):
        opposite = tuple(1 - c for c in chi)
        got = next(_pattern_hits(sig, xs, eps, far, step, opposite), None)
        out[chi] = "confirmed" if got is not None else "unconfirmed within bound"
    return out


def scan_exact(sigmas: Sequence, epsilon, m_max: int, step: int = 1) -> dict[VertexPattern, list[int]]:
    """Definitional kernel-free scan; reference oracle for the fast path."""
    sig = [_as_sigma(s) for s in sigmas]
    eps = _check_eps(epsilon)
    out: dict[VertexPattern, list[int]] = {}
    for m in range(step, m_max + 1, step):
        codes = [_classify_exact(s, m, eps) for s in sig]
        if any(c == _kernels.MID for c in codes):
            continue
        chi = tuple(int(c == _kernels.HIGH) for c in codes)
        out.setdefault(chi, []).append(m)
    return out
