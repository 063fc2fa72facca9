"""Critical-module bookkeeping, Morse-type numbers, and the mean index identity.

Each power of a geodesic carries a short vector of local homology ranks
("k-vector") indexed by 0..nullity.  The admissible vectors are tightly
constrained: end entries sum to at most one, a sign flip of the index parity
kills the bottom entry, a nondegenerate power is forced outright, and powers
related by divisibility with equal nullity and equal parity share their
vector.  Morse-type numbers aggregate these vectors along all powers, with a
certified cap on how far powers can contribute to a bounded degree range.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exactnum import ExactScalar, scalar
from .homology import B_constant
from .iteration import (
    GeodesicSpec,
    analytical_period,
    drift_bound,
    index,
    index_sweep,
    mean_index,
    nullity,
    power_cap_for_degree,
)


def _parity_data(spec: GeodesicSpec, n: int) -> tuple[list[int], list[int], list[int]]:
    """(index parity, epsilon sign, nullity) for m = 1..n."""
    idx = [index(spec, m) for m in range(1, n + 1)]
    eps = [1 if (i - spec.i1) % 2 == 0 else -1 for i in idx]
    nus = [nullity(spec, m) for m in range(1, n + 1)]
    return [i % 2 for i in idx], eps, nus


def _vector_options(nu: int, eps: int, cap: int) -> list[tuple[int, ...]]:
    if nu == 0:
        return [(1,) if eps == 1 else (0,)]
    out: list[tuple[int, ...]] = []
    zeros_inner = (0,) * max(nu - 1, 0)
    ends = [(0, 0), (0, 1)] + ([(1, 0)] if eps == 1 else [])
    for lo, hi in ends:
        if lo + hi == 1:
            out.append((lo, *zeros_inner, hi))
    if nu >= 2:
        for inner in itertools.product(range(cap + 1), repeat=nu - 1):
            out.append((0, *inner, 0))
    else:
        out.append((0, 0))
    return out


@dataclass(frozen=True)
class KAssignment:
    """One admissible choice of k-vectors over a full analytical period."""

    period: int
    epsilons: tuple[int, ...]
    kvecs: tuple[tuple[int, ...], ...]

    def kvec(self, m: int) -> tuple[int, ...]:
        return self.kvecs[(m - 1) % self.period]


@dataclass(frozen=True)
class GeodesicModel:
    spec: GeodesicSpec
    kassign: KAssignment


def kassignment_violations(spec: GeodesicSpec, ka: KAssignment) -> list[str]:
    """Re-assert every structural constraint on an assignment."""
    out: list[str] = []
    _, n = analytical_period(spec)
    if ka.period != n:
        out.append(f"period {ka.period} is not the analytical period {n}")
        return out
    _, eps, nus = _parity_data(spec, n)
    for m in range(1, n + 1):
        v = ka.kvecs[m - 1]
        nu = nus[m - 1]
        if ka.epsilons[m - 1] != eps[m - 1]:
            out.append(f"m={m}: epsilon mismatch")
        if len(v) != nu + 1:
            out.append(f"m={m}: k-vector length {len(v)} != nullity+1 = {nu + 1}")
            continue
        if any(x < 0 for x in v):
            out.append(f"m={m}: negative entry")
        if nu == 0:
            if v != ((1,) if eps[m - 1] == 1 else (0,)):
                out.append(f"m={m}: nondegenerate power has forced k-vector")
            continue
        if v[0] + v[-1] > 1:
            out.append(f"m={m}: end entries sum above one")
        if v[0] + v[-1] == 1 and any(v[j] for j in range(1, nu)):
            out.append(f"m={m}: interior entries must vanish when an end is set")
        if eps[m - 1] == -1 and v[0] != 0:
            out.append(f"m={m}: bottom entry must vanish at negative parity sign")
    for m2 in range(2, n + 1):
        for m1 in range(1, m2):
            if m2 % m1 == 0 and nus[m1 - 1] == nus[m2 - 1] and eps[m1 - 1] == eps[m2 - 1]:
                if ka.kvecs[m1 - 1] != ka.kvecs[m2 - 1]:
                    out.append(f"powers {m1}|{m2} with equal nullity must share k-vectors")
    return out


def admissible_kassignments(spec: GeodesicSpec, cap: int = 1) -> list[KAssignment]:
    """All admissible assignments over one period, deterministic order.

    ``cap`` bounds the interior entries; end entries are 0/1 regardless.
    Powers within the period linked by divisibility with equal nullity and
    equal parity sign are merged into one choice.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    _, n = analytical_period(spec)
    _, eps, nus = _parity_data(spec, n)
    # union-find over 1..n for the shared-vector constraint
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for m2 in range(2, n + 1):
        for m1 in range(1, m2):
            if m2 % m1 == 0 and nus[m1 - 1] == nus[m2 - 1] and eps[m1 - 1] == eps[m2 - 1]:
                parent[find(m2 - 1)] = find(m1 - 1)
    classes: dict[int, list[int]] = {}
    for i in range(n):
        classes.setdefault(find(i), []).append(i)
    roots = sorted(classes)
    per_class: list[list[tuple[int, ...]]] = []
    for root in roots:
        members = classes[root]
        nu = nus[root]
        opts: list[tuple[int, ...]] | None = None
        for i in members:
            # members share nullity by construction of the merge
            cand = _vector_options(nu, eps[i], cap)
            opts = cand if opts is None else [v for v in opts if v in cand]
        per_class.append(opts or [])
    out: list[KAssignment] = []
    for combo in itertools.product(*per_class):
        kvecs: list[tuple[int, ...]] = [()] * n
        for root, vec in zip(roots, combo):
            for i in classes[root]:
                kvecs[i] = vec
        out.append(KAssignment(period=n, epsilons=tuple(eps), kvecs=tuple(kvecs)))
    return out


@dataclass(frozen=True)
class MorseNumbers:
    values: tuple[int, ...]
    q_max: int
    power_caps: tuple[int, ...]

    def __getitem__(self, q: int) -> int:
        return self.values[q]


def morse_numbers(
    models: list[GeodesicModel],
    q_max: int,
    reversible: bool = False,
    m_cap: int | None = None,
) -> MorseNumbers:
    """Degreewise totals of k-vector entries over all powers of all models.

    Complete through q_max: every power beyond the per-model cap provably
    has index above q_max (linear lower bound on the index), so the listed
    degrees receive no further contributions.  Reversibility doubles every
    total, since inverse curves duplicate each critical orbit.
    """
    M = np.zeros(q_max + 1, dtype=np.int64)
    caps: list[int] = []
    for model in models:
        spec = model.spec
        if mean_index(spec).sign() <= 0:
            raise ValueError("all models must have positive mean index")
        cap = power_cap_for_degree(spec, q_max) if m_cap is None else m_cap
        if (scalar(cap + 1) * mean_index(spec) - drift_bound(spec)) <= scalar(q_max):
            raise ValueError(f"power cap {cap} cannot be certified for degrees <= {q_max}")
        caps.append(cap)
        idx = index_sweep(spec, cap)
        n = model.kassign.period
        residues = (np.arange(1, cap + 1) - 1) % n
        for res in range(n):
            vec = model.kassign.kvecs[res]
            sel = idx[residues == res]
            for offset, weight in enumerate(vec):
                if weight == 0:
                    continue
                degrees = sel + offset
                good = degrees[(degrees >= 0) & (degrees <= q_max)]
                if good.size:
                    M += weight * np.bincount(good, minlength=q_max + 1)
    if reversible:
        M *= 2
    return MorseNumbers(values=tuple(int(x) for x in M), q_max=q_max, power_caps=tuple(caps))


@dataclass(frozen=True)
class MorseCheckReport:
    weak_ok: bool
    strong_ok: bool
    lacunary_applicable: bool
    lacunary_ok: bool
    first_violation: tuple[str, int, int, int] | None  # (kind, q, M_q or sum, b_q or sum)

    @property
    def ok(self) -> bool:
        return self.weak_ok and self.strong_ok and (not self.lacunary_applicable or self.lacunary_ok)


def morse_check(M, b, q_max: int) -> MorseCheckReport:
    """Weak and alternating-sum inequalities, plus the lacunary equality rule
    when one parity of the M sequence vanishes entirely."""
    found: list[tuple[int, str, int, int]] = []
    weak_ok = strong_ok = lacunary_ok = True
    Ms = [M[q] for q in range(q_max + 1)]
    bs = [b[q] for q in range(q_max + 1)]
    for q in range(q_max + 1):
        if Ms[q] < bs[q]:
            weak_ok = False
            found.append((q, "weak", Ms[q], bs[q]))
            break
    acc = 0  # alternating partial sum, updated by S_q = (M_q - b_q) - S_{q-1}
    for q in range(q_max + 1):
        acc = (Ms[q] - bs[q]) - acc
        if acc < 0:
            strong_ok = False
            found.append((q, "strong", acc, 0))
            break
    even_zero = all(Ms[q] == 0 for q in range(0, q_max + 1, 2))
    odd_zero = all(Ms[q] == 0 for q in range(1, q_max + 1, 2))
    lacunary_applicable = even_zero or odd_zero
    if lacunary_applicable:
        live = 1 if even_zero else 0
        for q in range(q_max + 1):
            want = bs[q] if q % 2 == live else 0
            if Ms[q] != want:
                lacunary_ok = False
                found.append((q, "lacunary", Ms[q], want))
                break
    first: tuple[str, int, int, int] | None = None
    if found:
        q, kind, lhs, rhs = min(found)
        first = (kind, q, lhs, rhs)
    return MorseCheckReport(
        weak_ok=weak_ok,
        strong_ok=strong_ok,
        lacunary_applicable=lacunary_applicable,
        lacunary_ok=lacunary_ok,
        first_violation=first,
    )


def chi_hat(model: GeodesicModel) -> Fraction:
    """Average alternating weight of the k-vectors over one period."""
    n = model.kassign.period
    total = 0
    for m in range(1, n + 1):
        i_m = index(model.spec, m)
        vec = model.kassign.kvecs[m - 1]
        for ell, weight in enumerate(vec):
            if weight:
                total += (-1) ** ((i_m + ell) % 2) * weight
    return Fraction(total, n)


def identity_residual(
    models: list[GeodesicModel], d: int, h: int, reversible: bool = False
) -> ExactScalar:
    """factor * sum of chi_hat/mean_index over models, minus the constant the
    identity demands; zero exactly when the identity holds."""
    total = scalar(0)
    for model in models:
        ih = mean_index(model.spec)
        if ih.sign() <= 0:
            raise ValueError("the identity only ranges over positive mean indices")
        total = total + scalar(chi_hat(model)) / ih
    factor = 2 if reversible else 1
    return factor * total - scalar(B_constant(d, h))


@dataclass(frozen=True)
class KappaResult:
    kappa: Fraction
    valid: bool
    reason: str | None


def kappa_certificate(d: int, h: int, i_cn: int, p_c: int, mu: int) -> KappaResult:
    """Solve for the trailing rank in the alternating Betti-sum identity of a
    single rational geodesic; flags a violation when the solution is not a
    non-negative integer (the single-geodesic hypothesis then fails).
    """
    if mu < -1:
        raise ValueError("mu must be at least -1")
    if p_c < 0:
        raise ValueError("p must be non-negative")
    if (i_cn - p_c) % 2 != 0:
        raise ValueError("index at the period and p must have equal parity")
    if (mu + 1 - p_c) % 2 != 0:
        raise ValueError("mu + 1 - p must be even")
    from .homology import betti_closed

    rhs = sum(
        (-1) ** (j % 2) * betti_closed(d, h, j) for j in range(mu - p_c + 1, i_cn + mu + 1)
    )
    kappa = (-1) ** ((i_cn + mu) % 2) * (rhs - B_constant(d, h) * (i_cn + p_c))
    if kappa.denominator != 1:
        return KappaResult(kappa, False, "kappa is not an integer")
    if kappa < 0:
        return KappaResult(kappa, False, "kappa is negative")
    return KappaResult(kappa, True, None)
