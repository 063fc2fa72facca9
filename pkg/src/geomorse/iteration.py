"""Exact iteration of Morse index and nullity along powers of a closed geodesic.

The inputs are a normal-form decomposition of the linearized return map, the
dimension of the underlying manifold, and the index of the prime curve.  The
index of the m-th power is an integer-linear expression in m plus twice a sum
of exact ceilings of m times each rotation turn; the nullity is periodic.

Single evaluations use big-integer certified floors.  Range sweeps go through
the modular kernels in :mod:`geomorse._kernels`; any position the kernel
cannot certify is recomputed with exact radical arithmetic, so sweep output
is bit-identical to the one-at-a-time exact path.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd

import numpy as np

from . import _kernels
from .exactnum import ExactScalar, Turn, scalar, scaled_floor
from .normalforms import (
    Decomposition,
    N2Block,
    Rot,
    counts,
    index_parity,
    splitting_invariants,
    validate,
)

_CHUNK = 1 << 18


@dataclass(frozen=True)
class GeodesicSpec:
    """Decomposition plus manifold dimension and initial index."""

    dec: Decomposition
    manifold_dim: int
    i1: int

    def __post_init__(self) -> None:
        if self.manifold_dim < 2:
            raise ValueError("manifold dimension must be at least 2")
        if self.i1 < 0:
            raise ValueError("initial index must be non-negative")
        problems = validate(self.dec, self.manifold_dim)
        if problems:
            raise ValueError("; ".join(problems))
        if self.i1 % 2 != index_parity(self.dec):
            raise ValueError(
                f"initial index {self.i1} has the wrong parity for this decomposition"
            )

    @property
    def lam(self) -> int:
        c = counts(self.dec)
        return self.i1 + c.p_minus + c.p_zero - c.r


@dataclass(frozen=True)
class IndexProfile:
    entries: tuple[tuple[int, int, int], ...]  # (m, index, nullity)


class _Angle:
    """One rotation turn prepared for fast sweeps."""

    __slots__ = ("value", "rational", "num", "den", "x64")

    def __init__(self, turn: Turn):
        self.value = turn.value
        self.rational = turn.is_rational()
        if self.rational:
            f = turn.value.as_fraction()
            self.num, self.den = f.numerator, f.denominator
            self.x64 = None
        else:
            self.num = self.den = None
            self.x64 = scaled_floor(turn.value)


class _Profile:
    """Precomputed tallies and angle tables for one spec."""

    __slots__ = (
        "lam", "const", "q_even", "nu_base", "nu_even", "c",
        "rot_angles", "n2_nt_dens", "n2_tr_dens", "rot_rat_dens",
        "sigma_sum", "irr_sigmas", "drift_bound",
    )

    def __init__(self, spec: GeodesicSpec):
        c = counts(spec.dec)
        self.c = c
        self.lam = spec.i1 + c.p_minus + c.p_zero - c.r
        self.const = -(c.r + c.p_minus + c.p_zero) - 2 * (c.r_star - c.k_star)
        self.q_even = c.q_zero + c.q_plus
        self.nu_base = c.p_minus + c.p_plus + 2 * c.p_zero
        self.nu_even = c.q_minus + 2 * c.q_zero + c.q_plus
        self.rot_angles: list[_Angle] = []
        self.n2_nt_dens: list[int] = []
        self.n2_tr_dens: list[int] = []
        self.rot_rat_dens: list[int] = []
        total = scalar(0)
        for b in spec.dec.blocks:
            if isinstance(b, Rot):
                ang = _Angle(b.turn)
                self.rot_angles.append(ang)
                total = total + b.turn.value
                if ang.rational:
                    self.rot_rat_dens.append(ang.den)
            elif isinstance(b, N2Block) and b.turn.is_rational():
                (self.n2_nt_dens if b.nontrivial else self.n2_tr_dens).append(
                    b.turn.denominator()
                )
        self.sigma_sum = total
        self.irr_sigmas = tuple(a.value for a in self.rot_angles if not a.rational)
        # |index(m) - m*mean_index| never exceeds this
        self.drift_bound = (
            c.r + c.p_minus + c.p_zero + self.q_even + 2 * (c.r_star - c.k_star)
        )


@lru_cache(maxsize=256)
def _profile(spec: GeodesicSpec) -> _Profile:
    return _Profile(spec)


def _rational_varphi_hits(dens: list[int], m: int) -> int:
    return sum(1 for d in dens if m % d == 0)


def _ceil_irrational_fast(ang: _Angle, m: int) -> int:
    """ceil(m*sigma) for irrational sigma via scaled big integers."""
    mx = m * ang.x64
    r = mx & _kernels.MASK64
    if r < _kernels.TWO64 - m:
        return (mx >> 64) + 1
    return -(-(ang.value * m)).floor()


def index(spec: GeodesicSpec, m: int) -> int:
    """Morse index of the m-th power, exactly."""
    if m < 1:
        raise ValueError("power must be at least 1")
    p = _profile(spec)
    tot = m * p.lam + p.const
    if m % 2 == 0:
        tot -= p.q_even
    for ang in p.rot_angles:
        if ang.rational:
            tot += 2 * (-((-m * ang.num) // ang.den))
        else:
            tot += 2 * _ceil_irrational_fast(ang, m)
    tot += 2 * sum(1 for d in p.n2_nt_dens if m % d != 0)
    return tot


def nullity(spec: GeodesicSpec, m: int) -> int:
    """Nullity of the m-th power: base kernel plus periodic contributions."""
    if m < 1:
        raise ValueError("power must be at least 1")
    p = _profile(spec)
    hits = (
        _rational_varphi_hits(p.rot_rat_dens, m)
        + _rational_varphi_hits(p.n2_nt_dens, m)
        + _rational_varphi_hits(p.n2_tr_dens, m)
    )
    return p.nu_base + (p.nu_even if m % 2 == 0 else 0) + 2 * hits


def mean_index(spec: GeodesicSpec) -> ExactScalar:
    p = _profile(spec)
    return scalar(p.lam) + 2 * p.sigma_sum


def index_sweep(spec: GeodesicSpec, m_to: int, m_from: int = 1) -> np.ndarray:
    """Indices for m = m_from..m_to as an int64 array, exact."""
    if m_from < 1 or m_to < m_from:
        raise ValueError("bad sweep range")
    p = _profile(spec)
    n = m_to - m_from + 1
    ms = np.arange(m_from, m_to + 1, dtype=np.int64)
    tot = ms * p.lam + p.const
    if p.q_even:
        tot -= np.where(ms % 2 == 0, p.q_even, 0)
    for ang in p.rot_angles:
        if ang.rational:
            if m_to * ang.num >= (1 << 62):
                ceils = np.array(
                    [-((-m * ang.num) // ang.den) for m in range(m_from, m_to + 1)],
                    dtype=np.int64,
                )
            else:
                ceils = -((-ms * ang.num) // ang.den)
            tot += 2 * ceils
        else:
            tot += 2 * (_floor_sweep(ang, m_from, m_to) + 1)
    for d in p.n2_nt_dens:
        tot += 2 * (ms % d != 0)
    return tot


def _floor_sweep(ang: _Angle, m_from: int, m_to: int) -> np.ndarray:
    out = np.empty(m_to - m_from + 1, dtype=np.int64)
    pos = 0
    m0 = m_from
    while m0 <= m_to:
        cnt = min(_CHUNK, m_to - m0 + 1)
        q_local, amb = _kernels.floor_chunk(ang.x64, m0, cnt, m_to)
        q_local += _kernels.floor_base(ang.x64, m0 - 1)
        if amb.any():
            for i in np.flatnonzero(amb):
                q_local[i] = (ang.value * (m0 + int(i))).floor()
        out[pos : pos + cnt] = q_local
        pos += cnt
        m0 += cnt
    return out


def floor_sweep_scalar(sigma: ExactScalar, m_to: int) -> np.ndarray:
    """floor(m*sigma) for m = 1..m_to, exact; sigma must lie in (0,1)."""
    sigma = scalar(sigma)
    if sigma.sign() <= 0 or (sigma - 1).sign() >= 0:
        raise ValueError("sweeps need sigma in (0,1)")
    if sigma.is_rational():
        f = sigma.as_fraction()
        ms = np.arange(1, m_to + 1, dtype=np.int64)
        if m_to * f.numerator >= (1 << 62):
            return np.array([(m * f.numerator) // f.denominator for m in range(1, m_to + 1)],
                            dtype=np.int64)
        return (ms * f.numerator) // f.denominator
    ang = _Angle(Turn.unchecked(sigma))
    return _floor_sweep(ang, 1, m_to)


def nullity_sweep(spec: GeodesicSpec, m_to: int, m_from: int = 1) -> np.ndarray:
    p = _profile(spec)
    ms = np.arange(m_from, m_to + 1, dtype=np.int64)
    tot = np.full(ms.shape, p.nu_base, dtype=np.int64)
    if p.nu_even:
        tot += np.where(ms % 2 == 0, p.nu_even, 0)
    for d in p.rot_rat_dens + p.n2_nt_dens + p.n2_tr_dens:
        tot += 2 * (ms % d == 0)
    return tot


def index_table(spec: GeodesicSpec, m_max: int) -> IndexProfile:
    if m_max < 1:
        raise ValueError("m_max must be at least 1")
    idx = index_sweep(spec, m_max)
    nul = nullity_sweep(spec, m_max)
    return IndexProfile(
        tuple((m, int(idx[m - 1]), int(nul[m - 1])) for m in range(1, m_max + 1))
    )


def _lcm(values) -> int:
    out = 1
    for v in values:
        out = out * v // gcd(out, v)
    return out


def analytical_period(spec: GeodesicSpec) -> tuple[int, int]:
    """(n0, n): first power with maximal nullity, and the least period after
    which nullities repeat and index increments are even."""
    p = _profile(spec)
    dens = p.rot_rat_dens + p.n2_nt_dens + p.n2_tr_dens
    L = _lcm([2] + dens)
    nul = nullity_sweep(spec, L)
    n0 = int(np.argmax(nul)) + 1
    if n0 % 2 == 0:
        n = n0
    else:
        c = p.c
        even_increment = (spec.i1 + c.p_minus + c.p_zero + c.r + c.q_zero + c.q_plus) % 2 == 0
        n = n0 if even_increment else 2 * n0
    # structural sanity: period doubling can only come from one orientation-
    # reversing hyperbolic block, with no eigenvalue-minus-one Jordan block
    if n == 2 * n0:
        c = p.c
        assert c.q_minus == 0 and c.h_minus == 1 and n0 % 2 == 1
    return n0, n


def sigma_parity_check(spec: GeodesicSpec, T: int) -> bool:
    """Parity relation between the index at an even multiple of the period,
    the nullity at the period, and the sigma splitting invariant."""
    _, n = analytical_period(spec)
    if T <= 0 or T % n != 0 or T % 2 != 0:
        raise ValueError(f"T={T} is not a positive even multiple of the period n={n}")
    sig, _, _ = splitting_invariants(spec.dec)
    return (index(spec, T) + nullity(spec, n) - sig) % 2 == 0


def is_monotone_guaranteed(spec: GeodesicSpec) -> bool:
    """Sufficient tally condition for the index to be nondecreasing in m."""
    c = counts(spec.dec)
    return spec.i1 + c.p_zero + c.p_minus >= c.q_zero + c.q_plus + c.r + 2 * (
        c.r_star - c.k_star
    )


def initial_index_sufficient(spec: GeodesicSpec) -> bool:
    """Coarser sufficient condition: initial index at least dim(M) - 2."""
    return spec.i1 >= spec.manifold_dim - 2


def drift_bound(spec: GeodesicSpec) -> int:
    """Exact bound on |index(m) - m * mean_index| over all m."""
    return _profile(spec).drift_bound


def power_cap_for_degree(spec: GeodesicSpec, q_max: int) -> int:
    """Least certified cap: every power above it has index above q_max.

    Uses index(m) >= m*mean_index - drift, which holds term by term.
    """
    ih = mean_index(spec)
    if ih.sign() <= 0:
        raise ValueError("mean index must be positive to cap contributing powers")
    bound = scalar(q_max + drift_bound(spec)) / ih
    cap = max(1, bound.floor())
    while not (scalar(cap + 1) * ih - drift_bound(spec)) > scalar(q_max):
        cap += 1
    return cap
