from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest

from conftest import random_spec
from geomorse.exactnum import (
    Turn,
    ceil_exact,
    compare,
    floor_exact,
    frac_exact,
    scalar,
    sqrt_scalar,
    varphi_exact,
)
from geomorse.iteration import (
    GeodesicSpec,
    analytical_period,
    drift_bound,
    floor_sweep_scalar,
    index,
    index_sweep,
    index_table,
    initial_index_sufficient,
    is_monotone_guaranteed,
    mean_index,
    nullity,
    nullity_sweep,
    power_cap_for_degree,
    sigma_parity_check,
)
from geomorse.normalforms import Decomposition, Hyp, N1Minus, N1Plus, Rot, counts

S2 = sqrt_scalar(2, Fraction(1, 2))
S3 = sqrt_scalar(3) - 1


def oracle_index(spec: GeodesicSpec, m: int) -> int:
    """Definitional evaluation with per-term exact ceilings/remainders."""
    c = counts(spec.dec)
    total = m * (spec.i1 + c.p_minus + c.p_zero - c.r)
    total -= c.r + c.p_minus + c.p_zero
    if m % 2 == 0:
        total -= c.q_zero + c.q_plus
    from geomorse.normalforms import N2Block, Rot as _Rot

    for b in spec.dec.blocks:
        if isinstance(b, _Rot):
            total += 2 * ceil_exact(b.turn.value * m)
        elif isinstance(b, N2Block) and b.nontrivial and b.turn.is_rational():
            total += 2 * varphi_exact(b.turn.value * m) - 2
    return total


def oracle_nullity(spec: GeodesicSpec, m: int) -> int:
    c = counts(spec.dec)
    total = c.p_minus + c.p_plus + 2 * c.p_zero
    if m % 2 == 0:
        total += c.q_minus + 2 * c.q_zero + c.q_plus
    from geomorse.normalforms import N2Block, Rot as _Rot

    for b in spec.dec.blocks:
        if isinstance(b, (_Rot, N2Block)) and b.turn.is_rational():
            total += 2 * (1 - varphi_exact(b.turn.value * m))
    return total


class TestIndex:
    def test_canonical_third_power(self, canonical_spec):
        assert index(canonical_spec, 3) == 2

    def test_power_one_returns_initial(self, rng):
        for _ in range(100):
            spec = random_spec(rng)
            assert index(spec, 1) == spec.i1

    def test_single_rotation_doubling(self):
        spec = GeodesicSpec(Decomposition([Rot(Turn(S2))]), 2, 1)
        assert index(spec, 2) == 2 * ceil_exact(sqrt_scalar(2)) - 1 == 3

    def test_matches_definitional_oracle(self, rng):
        for _ in range(50):
            spec = random_spec(rng)
            for m in (1, 2, 3, 5, 8, 13):
                assert index(spec, m) == oracle_index(spec, m)
                assert nullity(spec, m) == oracle_nullity(spec, m)

    def test_rejects_nonpositive_power(self, canonical_spec):
        with pytest.raises(ValueError):
            index(canonical_spec, 0)


class TestNullity:
    def test_negative_jordan_alternation(self):
        dec = Decomposition([N1Minus(1), Rot(Turn(S2)), Rot(Turn(S3))])
        spec = GeodesicSpec(dec, 4, 1)
        for m in range(1, 13):
            assert nullity(spec, m) == (0 if m % 2 else 1)

    def test_fully_irrational_always_zero(self):
        spec = GeodesicSpec(Decomposition([Rot(Turn(S2)), Rot(Turn(S3))]), 3, 2)
        assert all(nullity(spec, m) == 0 for m in range(1, 30))

    def test_rational_rotation_spikes(self):
        dec = Decomposition([Rot(Turn(scalar(Fraction(1, 3)))), N1Plus(1)])
        spec = GeodesicSpec(dec, 3, 2)
        for m in range(1, 19):
            assert nullity(spec, m) == (3 if m % 3 == 0 else 1)


class TestMeanIndex:
    def test_canonical_rational_mean(self, canonical_spec):
        assert mean_index(canonical_spec) == scalar(Fraction(2, 3))

    def test_no_rotations(self):
        spec = GeodesicSpec(Decomposition([Hyp(1)]), 2, 2)
        assert mean_index(spec) == scalar(2)

    def test_single_rotation(self):
        spec = GeodesicSpec(Decomposition([Rot(Turn(S2))]), 2, 1)
        assert mean_index(spec) == sqrt_scalar(2)

    def test_drift_bound_holds(self, rng):
        for _ in range(25):
            spec = random_spec(rng)
            ih = mean_index(spec)
            bound = drift_bound(spec)
            for m in (1, 2, 7, 20, 61):
                gap = scalar(index(spec, m)) - ih * m
                assert compare(gap, bound) <= 0 and compare(gap, -bound) >= 0


class TestSweeps:
    def test_sweep_matches_single_calls(self, rng):
        for _ in range(20):
            spec = random_spec(rng)
            sw = index_sweep(spec, 300)
            nw = nullity_sweep(spec, 300)
            for m in rng.sample(range(1, 301), 25):
                assert int(sw[m - 1]) == index(spec, m)
                assert int(nw[m - 1]) == nullity(spec, m)

    def test_floor_sweep_scalar(self, rng):
        for sigma in (S2, S3, scalar(Fraction(2, 7))):
            fs = floor_sweep_scalar(sigma, 500)
            for m in rng.sample(range(1, 501), 30):
                assert int(fs[m - 1]) == floor_exact(sigma * m)

    def test_offset_sweep(self, canonical_spec):
        full = index_sweep(canonical_spec, 200)
        part = index_sweep(canonical_spec, 200, m_from=150)
        assert np.array_equal(full[149:], part)


class TestAnalyticalPeriod:
    def test_canonical_period_one(self, canonical_spec):
        assert analytical_period(canonical_spec) == (1, 1)

    def test_negative_jordan_period_two(self):
        dec = Decomposition([N1Minus(1), Rot(Turn(S2)), Rot(Turn(S3))])
        assert analytical_period(GeodesicSpec(dec, 4, 1)) == (2, 2)

    def test_rational_rotation_period_three(self):
        dec = Decomposition([Rot(Turn(scalar(Fraction(1, 3)))), N1Plus(1)])
        assert analytical_period(GeodesicSpec(dec, 3, 2)) == (3, 3)

    def test_doubling_needs_reversing_hyperbolic(self, rng):
        # the only way n = 2*n0: odd n0, no negative-one Jordan blocks, one H(-1)
        for _ in range(120):
            spec = random_spec(rng)
            n0, n = analytical_period(spec)
            assert n in (n0, 2 * n0)
            if n == 2 * n0:
                c = counts(spec.dec)
                assert c.q_minus == 0 and c.h_minus == 1 and n0 % 2 == 1

    def test_doubling_example(self):
        spec = GeodesicSpec(Decomposition([Rot(Turn(S2)), Hyp(-1)]), 3, 2)
        n0, n = analytical_period(spec)
        assert (n0, n) == (1, 2)

    def test_periodicity_properties(self, rng):
        for _ in range(30):
            spec = random_spec(rng)
            _, n = analytical_period(spec)
            m_max = 120
            idx = index_sweep(spec, m_max + n)
            nul = nullity_sweep(spec, m_max + n)
            for m in range(1, m_max + 1):
                assert (int(idx[m + n - 1]) - int(idx[m - 1])) % 2 == 0
                assert int(nul[m + n - 1]) == int(nul[m - 1])

    def test_max_nullity_on_period(self, rng):
        for _ in range(30):
            spec = random_spec(rng)
            n0, n = analytical_period(spec)
            nul = nullity_sweep(spec, 6 * max(n, n0))
            assert int(nul[n0 - 1]) == int(nul.max())
            assert all(int(v) < int(nul[n0 - 1]) for v in nul[: n0 - 1])


class TestDivisorNullityProperty:
    def test_intermediate_nullity_levels_divide_period(self, rng):
        # any power inside the period realizing a strictly intermediate
        # nullity level first must divide the period
        for _ in range(200):
            spec = random_spec(rng)
            _, n = analytical_period(spec)
            if n < 3:
                continue
            nu = [nullity(spec, m) for m in range(1, n + 1)]
            for m in range(2, n):
                if not nu[0] < nu[m - 1] < nu[n - 1]:
                    continue
                if any(
                    m % k == 0 and n % k == 0 and nu[k - 1] == nu[m - 1]
                    for k in range(1, m)
                ):
                    continue
                assert n % m == 0


class TestBott:
    def test_index_never_below_initial(self, rng):
        for _ in range(60):
            spec = random_spec(rng)
            assert int(index_sweep(spec, 200).min()) >= spec.i1


class TestAmbiguityFallback:
    # a turn inside the top 2^-64 sliver of (0,1): every kernel position sits
    # in the uncertainty band, so the sweep must resolve everything exactly
    NEAR_ONE = scalar(1) - sqrt_scalar(2, Fraction(1, 1 << 65))

    def test_floor_sweep_falls_back_exactly(self):
        fs = floor_sweep_scalar(self.NEAR_ONE, 200)
        assert [int(v) for v in fs] == [m - 1 for m in range(1, 201)]

    def test_single_index_falls_back_exactly(self):
        spec = GeodesicSpec(Decomposition([Rot(Turn(self.NEAR_ONE))]), 2, 1)
        for m in (1, 2, 3, 17, 100):
            assert index(spec, m) == 2 * m - 1
        assert [int(v) for v in index_sweep(spec, 50)] == [2 * m - 1 for m in range(1, 51)]

    def test_tiny_turn_certified_zero_floors(self):
        tiny = sqrt_scalar(2, Fraction(1, 1 << 66))
        fs = floor_sweep_scalar(tiny, 1000)
        assert not fs.any()


class TestTwistedBlocks:
    def test_nontrivial_rational_dip(self):
        from geomorse.normalforms import N2Block

        dec = Decomposition([N2Block(Turn(scalar(Fraction(1, 5))), nontrivial=True)])
        spec = GeodesicSpec(dec, 3, 2)
        assert [index(spec, m) for m in range(1, 7)] == [2, 4, 6, 8, 8, 12]
        assert [nullity(spec, m) for m in range(1, 7)] == [0, 0, 0, 0, 2, 0]
        assert analytical_period(spec) == (5, 5)

    def test_trivial_block_no_index_effect(self):
        from geomorse.normalforms import N2Block

        dec = Decomposition([N2Block(Turn(scalar(Fraction(1, 5))), nontrivial=False)])
        spec = GeodesicSpec(dec, 3, 2)
        assert [index(spec, m) for m in range(1, 7)] == [2, 4, 6, 8, 10, 12]
        assert nullity(spec, 5) == 2 and nullity(spec, 4) == 0

    def test_irrational_nontrivial_no_corrections(self):
        from geomorse.normalforms import N2Block

        dec = Decomposition([N2Block(Turn(S2), nontrivial=True)])
        spec = GeodesicSpec(dec, 3, 0)
        assert [index(spec, m) for m in range(1, 6)] == [0, 0, 0, 0, 0]
        assert all(nullity(spec, m) == 0 for m in range(1, 12))


class TestParityRelation:
    def test_canonical(self, canonical_spec):
        assert sigma_parity_check(canonical_spec, 2)

    def test_hyperbolic(self):
        spec = GeodesicSpec(Decomposition([Hyp(1)]), 2, 2)
        assert sigma_parity_check(spec, 2)

    def test_negative_jordan(self):
        dec = Decomposition([N1Minus(1), Rot(Turn(S2)), Rot(Turn(S3))])
        assert sigma_parity_check(GeodesicSpec(dec, 4, 1), 4)

    def test_randomized(self, rng):
        for _ in range(60):
            spec = random_spec(rng)
            _, n = analytical_period(spec)
            T = 2 * n * rng.randrange(1, 4)
            assert sigma_parity_check(spec, T)

    def test_precondition(self, canonical_spec):
        with pytest.raises(ValueError):
            sigma_parity_check(canonical_spec, 3)


class TestMonotonicity:
    def test_tally_condition(self):
        dec = Decomposition([Rot(Turn(S2)), Rot(Turn(S3)), N1Plus(-1)])
        assert is_monotone_guaranteed(GeodesicSpec(dec, 4, 2))
        assert not is_monotone_guaranteed(GeodesicSpec(dec, 4, 0))
        assert is_monotone_guaranteed(GeodesicSpec(Decomposition([Hyp(1)]), 2, 0))

    def test_initial_index_sufficient_implies_tally(self, rng):
        for _ in range(200):
            spec = random_spec(rng)
            if initial_index_sufficient(spec):
                assert is_monotone_guaranteed(spec)

    def test_guaranteed_specs_are_nondecreasing(self, rng):
        checked = 0
        while checked < 40:
            spec = random_spec(rng)
            if not is_monotone_guaranteed(spec):
                continue
            checked += 1
            sw = index_sweep(spec, 400)
            assert (np.diff(sw) >= 0).all()


class TestIndexTable:
    def test_canonical_entries(self, canonical_spec):
        table = index_table(canonical_spec, 4)
        assert table.entries[1:] == ((2, 2, 1), (3, 2, 1), (4, 2, 1))

    def test_m_max_one(self, canonical_spec):
        table = index_table(canonical_spec, 1)
        assert table.entries == ((1, 0, 1),)

    def test_rational_with_jordan(self):
        dec = Decomposition([Rot(Turn(scalar(Fraction(1, 3)))), N1Plus(1)])
        table = index_table(GeodesicSpec(dec, 3, 2), 3)
        assert table.entries[2] == (3, 6, 3)


class TestPowerCap:
    def test_cap_is_certified(self, rng):
        for _ in range(30):
            spec = random_spec(rng)
            if mean_index(spec).sign() <= 0:
                continue
            cap = power_cap_for_degree(spec, 15)
            sw = index_sweep(spec, cap + 50, m_from=cap + 1)
            assert int(sw.min()) > 15

    def test_rejects_nonpositive_mean(self):
        spec = GeodesicSpec(Decomposition([Hyp(1)]), 2, 0)
        with pytest.raises(ValueError):
            power_cap_for_degree(spec, 5)
