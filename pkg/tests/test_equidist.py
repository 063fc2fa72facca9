from __future__ import annotations

import random
from fractions import Fraction

import pytest

from conftest import IRRATIONAL_POOL
from geomorse.equidist import (
    find_T,
    iter_pattern_hits,
    opposite_vertex_check,
    reachable_vertices,
    scan_exact,
    vertex_hits,
)
from geomorse.exactnum import frac_exact, compare, scalar, sqrt_scalar

S2H = sqrt_scalar(2, Fraction(1, 2))
S3M = sqrt_scalar(3) - 1
COUPLED = scalar(Fraction(4, 3)) - S2H  # pairs with S2H to the rational 4/3


class TestVertexHits:
    def test_matches_exact_scan(self, rng: random.Random):
        for _ in range(6):
            k = rng.randrange(1, 3)
            sigmas = rng.sample(IRRATIONAL_POOL, k)
            eps = Fraction(1, rng.choice([5, 8, 10]))
            fast = vertex_hits(sigmas, eps, 1500)
            assert fast == scan_exact(sigmas, eps, 1500)

    def test_independent_pair_reaches_all_corners(self):
        hits = vertex_hits([sqrt_scalar(2) - 1, S3M], Fraction(1, 10), 200_000)
        assert {(0, 0), (0, 1), (1, 0), (1, 1)} <= set(hits)

    def test_pair_summing_to_one_avoids_diagonal_corners(self):
        sig2 = scalar(1) - S2H
        hits = vertex_hits([S2H, sig2], Fraction(1, 10), 200_000)
        assert set(hits) == {(0, 1), (1, 0)}

    def test_equal_pair_stays_on_diagonal(self):
        hits = vertex_hits([S2H, S2H], Fraction(1, 10), 200_000)
        assert set(hits) == {(0, 0), (1, 1)}

    def test_empty_range(self):
        assert vertex_hits([S2H], Fraction(1, 10), 0) == {}

    def test_step_restriction(self):
        hits = vertex_hits([S2H, COUPLED], Fraction(1, 8), 5000, step=3)
        assert hits and all(m % 3 == 0 for ms in hits.values() for m in ms)

    def test_hit_membership_is_exact(self):
        eps = Fraction(1, 8)
        hits = vertex_hits([S2H, COUPLED], eps, 4000)
        for chi, ms in hits.items():
            for m in ms[:5]:
                for j, s in enumerate((S2H, COUPLED)):
                    f = frac_exact(s * m)
                    if chi[j]:
                        assert compare(f, 1 - eps) > 0
                    else:
                        assert compare(f, eps) < 0

    def test_monotone_refinement(self):
        broad = vertex_hits([S2H, COUPLED], Fraction(1, 8), 30_000)
        narrow = vertex_hits([S2H, COUPLED], Fraction(1, 16), 30_000)
        for chi, ms in narrow.items():
            assert set(ms) <= set(broad.get(chi, []))

    def test_near_wrap_coordinate_resolved_exactly(self):
        # inside the top 2^-64 sliver every kernel verdict is ambiguous and
        # the exact fallback must classify all of them as high
        near_one = scalar(1) - sqrt_scalar(2, Fraction(1, 1 << 65))
        hits = vertex_hits([near_one], Fraction(1, 8), 50)
        assert hits == {(1,): list(range(1, 51))}

    def test_rejects_rational_coordinates(self):
        with pytest.raises(ValueError):
            vertex_hits([scalar(Fraction(1, 3))], Fraction(1, 8), 100)

    def test_rejects_large_epsilon(self):
        with pytest.raises(ValueError):
            vertex_hits([S2H], Fraction(1, 3), 100)


class TestFindT:
    def test_coupled_pair_witness(self):
        T = find_T([COUPLED, S2H], [0], Fraction(1, 8), step=1, m_max=10**5)
        assert T == 3  # frac(3*sigma1) = 2 - 3*sqrt2/2 + ... > 7/8, frac(3*sigma2) < 1/8
        assert compare(frac_exact(COUPLED * 3), Fraction(7, 8)) > 0
        assert compare(frac_exact(S2H * 3), Fraction(1, 8)) < 0

    def test_full_high_set_for_independent(self):
        for eps in (Fraction(1, 8), Fraction(1, 12)):
            T = find_T([sqrt_scalar(2) - 1, S3M], [0, 1], eps, m_max=10**6)
            assert T is not None

    def test_not_found_below_first_hit(self):
        assert find_T([COUPLED, S2H], [0], Fraction(1, 8), m_max=2) is None

    def test_least_witness(self):
        T = find_T([S2H], [0], Fraction(1, 10), m_max=10**4)
        stream = iter_pattern_hits([S2H], (1,), Fraction(1, 10), m_max=10**4)
        assert T == next(stream)

    def test_minimum_start(self):
        first = find_T([S2H], [0], Fraction(1, 10), m_max=10**4)
        later = find_T([S2H], [0], Fraction(1, 10), m_max=10**4, m_min=first + 1)
        assert later is not None and later > first


class TestReachability:
    def test_single_coordinate_reaches_both_ends(self):
        assert reachable_vertices([S2H], Fraction(1, 10), 10**4) == {(0,), (1,)}

    def test_opposite_closure_for_coupled_pair(self):
        got = reachable_vertices([COUPLED, S2H], Fraction(1, 8), 50_000)
        assert got == {tuple(1 - c for c in chi) for chi in got}

    def test_opposite_vertex_check_confirms(self):
        out = opposite_vertex_check([COUPLED, S2H], Fraction(1, 8), 30_000)
        assert out and all(v == "confirmed" for v in out.values())

    def test_unconfirmed_is_reported_not_refuted(self):
        out = opposite_vertex_check([S2H], Fraction(1, 10), 10**4, m_max_opposite=1)
        assert set(out.values()) <= {"confirmed", "unconfirmed within bound"}
        assert "unconfirmed within bound" in out.values()
