from __future__ import annotations

import random
from fractions import Fraction

import pytest

from geomorse.exactnum import Turn, scalar, sqrt_scalar
from geomorse.normalforms import (
    IRRATIONAL,
    RATIONAL,
    Decomposition,
    Hyp,
    N1Minus,
    N1Plus,
    N2Block,
    Rot,
    block_from_json,
    block_to_json,
    classify,
    counts,
    decomposition_from_json,
    decomposition_to_json,
    index_parity,
    nu_one,
    splitting_invariants,
    validate,
)

S2 = sqrt_scalar(2, Fraction(1, 2))
CANON = Decomposition([Rot(Turn(scalar(Fraction(4, 3)) - S2)), Rot(Turn(S2)), N1Plus(-1)])


class TestCounts:
    def test_canonical_sample(self):
        c = counts(CANON)
        assert (c.p_plus, c.r, c.k) == (1, 2, 2)
        assert c.dim == 3
        assert c.p_minus == c.p_zero == c.q_minus == c.q_zero == c.q_plus == 0
        assert c.r_star == c.r_zero == c.h_plus == c.h_minus == 0

    def test_empty(self):
        c = counts(Decomposition([]))
        assert c.dim == 0

    def test_twisted_block_and_hyperbolic(self):
        dec = Decomposition([N2Block(Turn(scalar(Fraction(1, 5))), nontrivial=True), Hyp(1)])
        c = counts(dec)
        assert (c.r_star, c.k_star, c.h_plus, c.dim) == (1, 0, 1, 3)

    def test_reorder_invariance(self, rng: random.Random):
        from conftest import random_spec

        for _ in range(40):
            spec = random_spec(rng)
            blocks = list(spec.dec.blocks)
            rng.shuffle(blocks)
            assert counts(Decomposition(blocks)) == counts(spec.dec)

    def test_n1_parameter_split(self):
        c = counts(Decomposition([N1Plus(1), N1Plus(0), N1Plus(-1), N1Minus(1), N1Minus(0), N1Minus(-1)]))
        assert (c.p_minus, c.p_zero, c.p_plus) == (1, 1, 1)
        assert (c.q_minus, c.q_zero, c.q_plus) == (1, 1, 1)


class TestValidate:
    def test_two_orientation_reversing_hyperbolics(self):
        out = validate(Decomposition([Hyp(-1), Hyp(-1)]))
        assert any("h_minus" in v for v in out)

    def test_half_turn_reported(self):
        dec = Decomposition([Rot(Turn.unchecked(Fraction(1, 2)))])
        out = validate(dec)
        assert out and "1/2" in out[0]

    def test_canonical_ok_in_dim_four(self):
        assert validate(CANON, manifold_dim=4) == []

    def test_dimension_mismatch(self):
        assert any("dimension" in v for v in validate(CANON, manifold_dim=5))


class TestParity:
    def test_canonical_even(self):
        assert index_parity(CANON) == 0

    def test_single_positive_hyperbolic_even(self):
        assert index_parity(Decomposition([Hyp(1)])) == 0

    def test_rotation_plus_jordan(self):
        dec = Decomposition([Rot(Turn(scalar(Fraction(1, 3)))), N1Plus(1)])
        assert index_parity(dec) == 0  # 1 + 1 mod 2

    def test_odd_blocks(self):
        assert index_parity(Decomposition([Rot(Turn(S2))])) == 1
        assert index_parity(Decomposition([Hyp(-1)])) == 1
        assert index_parity(Decomposition([N1Minus(0)])) == 1


class TestClassify:
    def test_canonical_irrational(self):
        assert classify(CANON) == IRRATIONAL

    def test_rational_rotation_only(self):
        dec = Decomposition([Rot(Turn(scalar(Fraction(1, 3)))), Hyp(1)])
        assert classify(dec) == RATIONAL

    def test_twisted_irrational_angle_does_not_count(self):
        dec = Decomposition([N2Block(Turn(S2), nontrivial=True)])
        assert classify(dec) == RATIONAL


class TestInvariants:
    def test_canonical_triple(self):
        # direct substitution into the tallies: sigma = r + p_plus = 3
        assert splitting_invariants(CANON) == (3, 2, 2)

    def test_empty_triple(self):
        assert splitting_invariants(Decomposition([])) == (0, 0, 0)

    def test_rotation_plus_negative_jordan(self):
        dec = Decomposition([Rot(Turn(scalar(Fraction(1, 3)))), N1Minus(-1)])
        assert splitting_invariants(dec) == (1, 2, 2)

    def test_nu_one(self):
        assert nu_one(Decomposition([N1Plus(-1), Rot(Turn(S2)), Rot(Turn(sqrt_scalar(3) - 1))])) == 1
        assert nu_one(Decomposition([Rot(Turn(S2)), Rot(Turn(sqrt_scalar(3) - 1))])) == 0
        assert nu_one(Decomposition([N1Plus(0)])) == 2


class TestTwistedClassification:
    def test_from_matrix_entries(self):
        low = Turn(scalar(Fraction(1, 3)))  # sin positive
        high = Turn(scalar(Fraction(2, 3)))  # sin negative
        assert N2Block.from_matrix_entries(low, b2=0, b3=1).nontrivial  # (b2-b3) < 0
        assert not N2Block.from_matrix_entries(low, b2=1, b3=0).nontrivial
        assert N2Block.from_matrix_entries(high, b2=1, b3=0).nontrivial
        assert not N2Block.from_matrix_entries(high, b2=0, b3=1).nontrivial
        with pytest.raises(ValueError):
            N2Block.from_matrix_entries(low, b2=1, b3=1)


class TestJson:
    def test_documented_encodings(self):
        assert block_to_json(N1Plus(-1)) == {"type": "N1", "eig": 1, "a": -1}
        assert block_to_json(Hyp(1)) == {"type": "H", "sign": 1}
        r = block_to_json(Rot(Turn(S2)))
        assert r["type"] == "R" and "r{2}" in r["turn"]

    def test_roundtrip(self, rng: random.Random):
        from conftest import random_spec

        for _ in range(40):
            dec = random_spec(rng).dec
            again = decomposition_from_json(decomposition_to_json(dec))
            assert again == dec

    def test_bad_blocks_rejected(self):
        for bad in (
            {"type": "N1", "eig": 2, "a": 0},
            {"type": "R", "turn": "1/2"},
            {"type": "Z"},
            {"type": "N1"},
        ):
            with pytest.raises(ValueError):
                block_from_json(bad)
