"""Certified 64-bit modular kernels for fractional-part scans.

For an angle ``sigma`` in (0,1) let ``X = floor(sigma * 2**64)``.  Then for
any m >= 1

    m*sigma*2**64 = m*X + m*delta      with delta = sigma*2**64 - X in [0,1),

so with ``R = (m*X) mod 2**64`` and ``Q = (m*X - R) / 2**64``:

    floor(m*sigma)       = Q,                unless R >= 2**64 - m,
    frac(m*sigma)*2**64  in [R, R + m),      unless R >= 2**64 - m.

Every verdict the kernels emit is a proved integer inequality; positions
that fall inside the width-m uncertainty band are flagged and the caller
resolves them with exact radical arithmetic.  The band has measure
m/2**64, so flags are vanishingly rare at desk scale (m <= 10**7), but
they are always handled, never dropped.

Three interchangeable backends: ``numba`` (default when importable),
``numpy``, and ``python`` (reference).  Select with the environment
variable ``GEOMORSE_KERNEL=numba|numpy|python``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

MASK64 = (1 << 64) - 1
TWO64 = 1 << 64

# corner codes
MID, LOW, HIGH, AMB = 0, 1, 2, 3


def _clamp_u64(v: int) -> int:
    return min(max(v, 0), MASK64)


@dataclass(frozen=True)
class CornerThresholds:
    """Strict-bound uint64 thresholds for classifying frac(m*sigma) against eps.

    R < low_end                 certifies frac < eps
    mid_start <= R < mid_end    certifies eps < frac < 1-eps
    high_start <= R < band_end  certifies frac > 1-eps
    everything else             ambiguous (exact fallback)

    Clamping only ever shrinks the certified regions, never grows them.
    """

    low_end: int
    mid_start: int
    mid_end: int
    high_start: int
    band_end: int


def corner_thresholds(eps: Fraction, slack: int) -> CornerThresholds:
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0,1)")
    e_floor = (eps.numerator << 64) // eps.denominator
    e_ceil = -((-eps.numerator << 64) // eps.denominator)
    c = 1 - eps
    h_floor = (c.numerator << 64) // c.denominator
    h_ceil = -((-c.numerator << 64) // c.denominator)
    band_end = TWO64 - slack  # R >= band_end means the value may wrap past 1
    return CornerThresholds(
        low_end=_clamp_u64(e_floor - slack + 1),
        mid_start=_clamp_u64(e_ceil),
        mid_end=_clamp_u64(h_floor - slack + 1),
        high_start=_clamp_u64(h_ceil),
        band_end=_clamp_u64(band_end),
    )


def _make_numpy_backend():
    def floor_chunk(x, m0, count, slack):
        ms = np.arange(m0, m0 + count, dtype=np.uint64)
        r = ms * np.uint64(x)
        wraps = np.empty(count, dtype=bool)
        r_prev = np.uint64(((m0 - 1) * x) & MASK64)
        wraps[0] = bool(r[0] < r_prev)
        if count > 1:
            np.less(r[1:], r[:-1], out=wraps[1:])
        q_local = np.cumsum(wraps, dtype=np.int64)
        amb = r >= np.uint64(_clamp_u64(TWO64 - slack))
        return q_local, amb

    def corner_chunk(x, j0, count, th):
        js = np.arange(j0, j0 + count, dtype=np.uint64)
        r = js * np.uint64(x)
        codes = np.full(count, AMB, dtype=np.uint8)
        codes[r < np.uint64(th.low_end)] = LOW
        codes[(r >= np.uint64(th.mid_start)) & (r < np.uint64(th.mid_end))] = MID
        codes[(r >= np.uint64(th.high_start)) & (r < np.uint64(th.band_end))] = HIGH
        return codes

    return floor_chunk, corner_chunk


def _make_python_backend():
    def floor_chunk(x, m0, count, slack):
        q_local = np.empty(count, dtype=np.int64)
        amb = np.zeros(count, dtype=bool)
        r = ((m0 - 1) * x) & MASK64
        q = 0
        lim = _clamp_u64(TWO64 - slack)
        for i in range(count):
            r_new = (r + x) & MASK64
            if r_new < r:
                q += 1
            r = r_new
            q_local[i] = q
            if r >= lim:
                amb[i] = True
        return q_local, amb

    def corner_chunk(x, j0, count, th):
        codes = np.empty(count, dtype=np.uint8)
        r = ((j0 - 1) * x) & MASK64
        for i in range(count):
            r = (r + x) & MASK64
            if r < th.low_end:
                codes[i] = LOW
            elif th.mid_start <= r < th.mid_end:
                codes[i] = MID
            elif th.high_start <= r < th.band_end:
                codes[i] = HIGH
            else:
                codes[i] = AMB
        return codes

    return floor_chunk, corner_chunk


def _make_numba_backend():
    from numba import njit

    @njit(cache=True, nogil=True)
    def _floor_chunk(x, r_start, count, lim, q_local, amb):
        r = r_start
        q = np.int64(0)
        for i in range(count):
            r_new = r + x
            if r_new < r:
                q += 1
            r = r_new
            q_local[i] = q
            amb[i] = r >= lim

    @njit(cache=True, nogil=True)
    def _corner_chunk(x, r_start, count, low_end, mid_start, mid_end, high_start, band_end, codes):
        r = r_start
        for i in range(count):
            r = r + x
            if r < low_end:
                codes[i] = LOW
            elif mid_start <= r and r < mid_end:
                codes[i] = MID
            elif high_start <= r and r < band_end:
                codes[i] = HIGH
            else:
                codes[i] = AMB

    def floor_chunk(x, m0, count, slack):
        q_local = np.empty(count, dtype=np.int64)
        amb = np.empty(count, dtype=bool)
        r_start = np.uint64(((m0 - 1) * x) & MASK64)
        _floor_chunk(
            np.uint64(x), r_start, count, np.uint64(_clamp_u64(TWO64 - slack)), q_local, amb
        )
        return q_local, amb

    def corner_chunk(x, j0, count, th):
        codes = np.empty(count, dtype=np.uint8)
        r_start = np.uint64(((j0 - 1) * x) & MASK64)
        _corner_chunk(
            np.uint64(x),
            r_start,
            count,
            np.uint64(th.low_end),
            np.uint64(th.mid_start),
            np.uint64(th.mid_end),
            np.uint64(th.high_start),
            np.uint64(th.band_end),
            codes,
        )
        return codes

    return floor_chunk, corner_chunk


def _select_backend() -> str:
    choice = os.environ.get("GEOMORSE_KERNEL", "auto").lower()
    if choice in ("numba", "numpy", "python"):
        return choice
    try:
        import numba  # noqa: F401

        return "numba"
    except ImportError:
        return "numpy"


_BACKEND = _select_backend()
if _BACKEND == "numba":
    try:
        floor_chunk, corner_chunk = _make_numba_backend()
    except ImportError:
        _BACKEND = "numpy"
if _BACKEND == "numpy":
    floor_chunk, corner_chunk = _make_numpy_backend()
elif _BACKEND == "python":
    floor_chunk, corner_chunk = _make_python_backend()


def backend_name() -> str:
    return _BACKEND


def get_backend(name: str):
    """(floor_chunk, corner_chunk) for an explicit backend, for benchmarks and tests."""
    if name == "numba":
        return _make_numba_backend()
    if name == "numpy":
        return _make_numpy_backend()
    if name == "python":
        return _make_python_backend()
    raise ValueError(f"unknown kernel backend {name!r}")


def floor_base(x: int, m: int) -> int:
    """(m*x) >> 64 with exact big integers; Q offset for chunked sweeps."""
    return (m * x) >> 64
