"""Basic normal form blocks of a linearized return map and their tallies.

A decomposition is an unordered diamond-sum of 2x2 blocks (eigenvalue-one
Jordan blocks, eigenvalue-minus-one Jordan blocks, rotations, hyperbolic
blocks) and 4x4 twisted rotation blocks.  All index-theoretic quantities
downstream depend only on the tallies extracted here.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactnum import Turn, format_scalar, parse_scalar, scalar

RATIONAL = "rational"
IRRATIONAL = "irrational"


@dataclass(frozen=True)
class N1Plus:
    """Jordan block with eigenvalue +1; a=+1, 0, -1 splits the kernel type."""

    a: int

    def __post_init__(self) -> None:
        if self.a not in (-1, 0, 1):
            raise ValueError("N1Plus parameter must be -1, 0 or +1")


@dataclass(frozen=True)
class N1Minus:
    """Jordan block with eigenvalue -1; b=+1, 0, -1 splits the kernel type."""

    b: int

    def __post_init__(self) -> None:
        if self.b not in (-1, 0, 1):
            raise ValueError("N1Minus parameter must be -1, 0 or +1")


@dataclass(frozen=True)
class Rot:
    """Plane rotation by ``turn`` of a full circle."""

    turn: Turn


@dataclass(frozen=True)
class N2Block:
    """4x4 block: rotation pair coupled by a nonzero off-diagonal part.

    ``nontrivial`` records the coupling class, which changes how iterated
    indices jump at rational turns.
    """

    turn: Turn
    nontrivial: bool

    @classmethod
    def from_matrix_entries(cls, turn: Turn, b2, b3) -> "N2Block":
        """Classify from the off-diagonal entries: nontrivial iff (b2-b3)*sin > 0 fails.

        sin of the angle is positive exactly when the turn is below one half.
        """
        diff = Fraction(b2) - Fraction(b3)
        if diff == 0:
            raise ValueError("off-diagonal entries must differ")
        sin_positive = scalar(Fraction(1, 2)) > turn.value
        return cls(turn, nontrivial=(diff < 0) == sin_positive)


@dataclass(frozen=True)
class Hyp:
    """Hyperbolic block with real eigenvalue pair of the given sign."""

    sign: int

    def __post_init__(self) -> None:
        if self.sign not in (-1, 1):
            raise ValueError("Hyp sign must be -1 or +1")


Block = N1Plus | N1Minus | Rot | N2Block | Hyp


@dataclass(frozen=True)
class Counts:
    p_minus: int = 0
    p_zero: int = 0
    p_plus: int = 0
    q_minus: int = 0
    q_zero: int = 0
    q_plus: int = 0
    r: int = 0
    k: int = 0
    r_star: int = 0
    k_star: int = 0
    r_zero: int = 0
    k_zero: int = 0
    h_plus: int = 0
    h_minus: int = 0

    @property
    def dim(self) -> int:
        """Half-dimension accounted for: one per 2x2 block, two per 4x4."""
        return (
            self.p_minus
            + self.p_zero
            + self.p_plus
            + self.q_minus
            + self.q_zero
            + self.q_plus
            + self.r
            + 2 * self.r_star
            + 2 * self.r_zero
            + self.h_minus
            + self.h_plus
        )


@dataclass(frozen=True)
class Decomposition:
    blocks: tuple[Block, ...]

    def __init__(self, blocks) -> None:
        object.__setattr__(self, "blocks", tuple(blocks))

    @property
    def counts(self) -> Counts:
        return counts(self)


def counts(dec: Decomposition) -> Counts:
    c = dict(
        p_minus=0, p_zero=0, p_plus=0, q_minus=0, q_zero=0, q_plus=0,
        r=0, k=0, r_star=0, k_star=0, r_zero=0, k_zero=0, h_plus=0, h_minus=0,
    )
    for b in dec.blocks:
        if isinstance(b, N1Plus):
            c["p_minus" if b.a == 1 else "p_zero" if b.a == 0 else "p_plus"] += 1
        elif isinstance(b, N1Minus):
            c["q_minus" if b.b == 1 else "q_zero" if b.b == 0 else "q_plus"] += 1
        elif isinstance(b, Rot):
            c["r"] += 1
            if not b.turn.is_rational():
                c["k"] += 1
        elif isinstance(b, N2Block):
            if b.nontrivial:
                c["r_star"] += 1
                if not b.turn.is_rational():
                    c["k_star"] += 1
            else:
                c["r_zero"] += 1
                if not b.turn.is_rational():
                    c["k_zero"] += 1
        elif isinstance(b, Hyp):
            c["h_plus" if b.sign == 1 else "h_minus"] += 1
        else:
            raise TypeError(f"unknown block {b!r}")
    return Counts(**c)


def validate(dec: Decomposition, manifold_dim: int | None = None) -> list[str]:
    """Structural violations as messages; empty list means the data is sound."""
    out: list[str] = []
    for i, b in enumerate(dec.blocks):
        turn = getattr(b, "turn", None)
        if turn is not None and not Turn._valid(turn.value):
            out.append(
                f"block {i}: turn {format_scalar(turn.value)} outside (0,1)\\{{1/2}}"
            )
    c = counts(dec)
    if c.h_minus > 1:
        out.append(f"h_minus <= 1 violated: h_minus = {c.h_minus}")
    if manifold_dim is not None and c.dim != manifold_dim - 1:
        out.append(
            f"dimension mismatch: blocks account for {c.dim}, manifold needs {manifold_dim - 1}"
        )
    return out


def index_parity(dec: Decomposition) -> int:
    """Parity of the initial index forced by the block content."""
    c = counts(dec)
    return (c.p_minus + c.p_zero + c.q_minus + c.q_zero + c.q_plus + c.r + c.h_minus) % 2


def classify(dec: Decomposition) -> str:
    """IRRATIONAL iff some plane rotation has an irrational turn."""
    return IRRATIONAL if counts(dec).k >= 1 else RATIONAL


def splitting_invariants(dec: Decomposition) -> tuple[int, int, int]:
    """The (sigma, s, p) tallies used by parity and counting arguments."""
    c = counts(dec)
    sigma = c.r + c.p_plus + c.p_zero + c.q_minus + c.q_zero
    s = c.r + c.p_minus + c.p_zero + c.q_plus + c.q_zero + 2 * (c.r_star - c.k_star)
    p = c.p_zero + c.p_minus + c.q_zero + c.q_plus + c.r + 2 * c.r_star
    return sigma, s, p


def nu_one(dec: Decomposition) -> int:
    """Kernel dimension of (P - I): each eigenvalue-one Jordan block adds
    one, a genuine identity plane adds two."""
    c = counts(dec)
    return c.p_minus + c.p_plus + 2 * c.p_zero


# -- JSON encoding -------------------------------------------------------------


def block_to_json(b: Block) -> dict:
    if isinstance(b, N1Plus):
        return {"type": "N1", "eig": 1, "a": b.a}
    if isinstance(b, N1Minus):
        return {"type": "N1", "eig": -1, "a": b.b}
    if isinstance(b, Rot):
        return {"type": "R", "turn": format_scalar(b.turn.value)}
    if isinstance(b, N2Block):
        return {"type": "N2", "turn": format_scalar(b.turn.value), "nontrivial": b.nontrivial}
    if isinstance(b, Hyp):
        return {"type": "H", "sign": b.sign}
    raise TypeError(f"unknown block {b!r}")


def block_from_json(obj: dict) -> Block:
    try:
        kind = obj["type"]
        if kind == "N1":
            eig = int(obj["eig"])
            a = int(obj["a"])
            if eig == 1:
                return N1Plus(a)
            if eig == -1:
                return N1Minus(a)
            raise ValueError(f"N1 eigenvalue must be +-1, got {eig}")
        if kind == "R":
            return Rot(Turn(parse_scalar(obj["turn"])))
        if kind == "N2":
            return N2Block(Turn(parse_scalar(obj["turn"])), bool(obj["nontrivial"]))
        if kind == "H":
            return Hyp(int(obj["sign"]))
    except KeyError as exc:
        raise ValueError(f"block object missing field {exc}") from exc
    raise ValueError(f"unknown block type {obj.get('type')!r}")


def decomposition_from_json(blocks: list[dict]) -> Decomposition:
    return Decomposition(block_from_json(b) for b in blocks)


def decomposition_to_json(dec: Decomposition) -> list[dict]:
    return [block_to_json(b) for b in dec.blocks]
