"""Four-coin joint statistics and the referee's payoff recipe.

The sixteen probabilities are stored as four blocks, one per strategy pair,
each ordered (HH, HT, TH, TT) with Alice's coin first::

    (S1, S1') -> p1..p4      (S1, S2') -> p5..p8
    (S2, S1') -> p9..p12     (S2, S2') -> p13..p16

Indices in reports and error messages are 1-based to match p1..p16.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .game_model import BiMatrixGame, Player, Profile, ProfileLike, _as_profile, ne_margins

__all__ = [
    "CONSTRUCTION_TOL",
    "INPUT_TOL",
    "ConstraintViolation",
    "FourCoinStats",
    "LinearConstraint",
    "NotDerivedError",
    "Pair",
    "StatsRegime",
    "StrategyMarginals",
    "ValidationReport",
    "extract_marginals",
    "factorization_residual",
    "ne_support_constraints",
    "recipe_payoff",
    "validate",
]

CONSTRUCTION_TOL = 1e-12
INPUT_TOL = 1e-9
NEGATIVE_TOL = 1e-12

OUTCOMES = ("HH", "HT", "TH", "TT")


class Pair(str, enum.Enum):
    """Strategy pair (Alice's coin, Bob's coin); value is the block label."""

    S1_S1 = "S1,S1'"
    S1_S2 = "S1,S2'"
    S2_S1 = "S2,S1'"
    S2_S2 = "S2,S2'"

    @property
    def block(self) -> int:
        return _PAIR_ORDER.index(self)

    @property
    def span(self) -> slice:
        return slice(4 * self.block, 4 * self.block + 4)


_PAIR_ORDER = [Pair.S1_S1, Pair.S1_S2, Pair.S2_S1, Pair.S2_S2]
PAIRS = tuple(_PAIR_ORDER)


class StatsRegime(str, enum.Enum):
    PHYSICAL = "physical"
    SIGNED = "signed"


class ConstraintViolation(ValueError):
    """Statistics fail normalization or consistency beyond tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class NotDerivedError(ValueError):
    """Requested equilibrium pattern has no support constraints on record."""


@dataclass(frozen=True, eq=False)
class FourCoinStats:
    """Sixteen joint head/tail probabilities.

    Normalization is *not* enforced on construction so that malformed input
    can still be inspected with :func:`validate`.
    """

    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float).reshape(-1)
        if p.shape != (16,):
            raise ValueError(f"expected 16 probabilities, got {p.size}")
        if not np.all(np.isfinite(p)):
            raise ValueError("probabilities must be finite")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @classmethod
    def from_marginals(cls, r: float, s: float, r_prime: float, s_prime: float) -> "FourCoinStats":
        """Independent coins: every block is an outer product of head probabilities."""
        blocks = [(r, r_prime), (r, s_prime), (s, r_prime), (s, s_prime)]
        p = []
        for a, b in blocks:
            p += [a * b, a * (1 - b), b * (1 - a), (1 - a) * (1 - b)]
        return cls(np.array(p))

    @classmethod
    def uniform(cls) -> "FourCoinStats":
        return cls(np.full(16, 0.25))

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence[float]]) -> "FourCoinStats":
        return cls(np.concatenate([np.asarray(b, dtype=float) for b in blocks]))

    def block(self, pair: Pair | str) -> np.ndarray:
        return self.p[Pair(pair).span]

    @property
    def blocks(self) -> np.ndarray:
        return self.p.reshape(4, 4)

    @property
    def regime(self) -> StatsRegime:
        return StatsRegime.SIGNED if np.any(self.p < -NEGATIVE_TOL) else StatsRegime.PHYSICAL

    def __getitem__(self, index: int) -> float:
        """1-based access, ``stats[13]`` is p13."""
        if not 1 <= index <= 16:
            raise IndexError(index)
        return float(self.p[index - 1])

    def __eq__(self, other):
        return isinstance(other, FourCoinStats) and np.array_equal(self.p, other.p)

    def __hash__(self):
        return hash(self.p.tobytes())

    def as_list(self) -> list[float]:
        return [float(x) for x in self.p]


@dataclass(frozen=True)
class StrategyMarginals:
    """Head probabilities of coins S1, S2 (Alice) and S1', S2' (Bob)."""

    r: float
    s: float
    r_prime: float
    s_prime: float

    def weights(self, pair: Pair | str) -> tuple[float, float]:
        """(Alice's weight, Bob's weight) for the coins used in ``pair``."""
        pair = Pair(pair)
        alice = self.r if pair in (Pair.S1_S1, Pair.S1_S2) else self.s
        bob = self.r_prime if pair in (Pair.S1_S1, Pair.S2_S1) else self.s_prime
        return alice, bob

    @property
    def is_classical(self) -> bool:
        return all(0.0 <= v <= 1.0 for v in self.as_tuple())

    def as_tuple(self) -> tuple[float, float, float, float]:
        return self.r, self.s, self.r_prime, self.s_prime


# each consistency residual is lhs - rhs over 1-based indices
CONSISTENCY_EQUATIONS = (
    ((1, 2), (5, 6)),
    ((1, 3), (9, 11)),
    ((9, 10), (13, 14)),
    ((5, 7), (13, 15)),
)


@dataclass(frozen=True)
class ValidationReport:
    normalization: tuple[float, float, float, float]
    consistency: tuple[float, float, float, float]
    negative_entries: tuple[int, ...] = field(default_factory=tuple)

    def max_normalization(self) -> float:
        return max(abs(x) for x in self.normalization)

    def max_consistency(self) -> float:
        return max(abs(x) for x in self.consistency)

    def ok(self, tol: float = INPUT_TOL) -> bool:
        return self.max_normalization() <= tol and self.max_consistency() <= tol

    @property
    def physical(self) -> bool:
        return not self.negative_entries

    def as_dict(self) -> dict:
        return {
            "normalization_residuals": list(self.normalization),
            "consistency_residuals": list(self.consistency),
            "negative_entries": list(self.negative_entries),
        }


def validate(stats: FourCoinStats) -> ValidationReport:
    """Normalization residuals, consistency residuals and negative entries."""
    p = stats.p
    norm = tuple(float(b.sum() - 1.0) for b in stats.blocks)
    cons = tuple(
        float(sum(p[i - 1] for i in lhs) - sum(p[i - 1] for i in rhs))
        for lhs, rhs in CONSISTENCY_EQUATIONS
    )
    neg = tuple(int(i) + 1 for i in np.nonzero(p < -NEGATIVE_TOL)[0])
    return ValidationReport(norm, cons, neg)


def extract_marginals(stats: FourCoinStats, tol: float = INPUT_TOL) -> StrategyMarginals:
    report = validate(stats)
    for k, res in enumerate(report.normalization):
        if abs(res) > tol:
            raise ConstraintViolation(
                f"block {PAIRS[k].value} sums to {1.0 + res!r} (residual {res:.3g})", res
            )
    for (lhs, rhs), res in zip(CONSISTENCY_EQUATIONS, report.consistency):
        if abs(res) > tol:
            names = " + ".join(f"p{i}" for i in lhs), " + ".join(f"p{i}" for i in rhs)
            raise ConstraintViolation(
                f"consistency {names[0]} = {names[1]} violated (residual {res:.3g})", res
            )
    p = stats.p
    return StrategyMarginals(
        r=float(p[0] + p[1]),
        s=float(p[8] + p[9]),
        r_prime=float(p[0] + p[2]),
        s_prime=float(p[4] + p[6]),
    )


def recipe_payoff(
    stats: FourCoinStats,
    game: BiMatrixGame,
    pair: Pair | str,
    player: Player | str = Player.ALICE,
) -> float:
    """Referee's reward: K, L, M, N weighted by the HH, HT, TH, TT frequencies."""
    g = game.for_player(player)
    hh, ht, th, tt = stats.block(pair)
    return float(g.K * hh + g.L * ht + g.M * th + g.N * tt)


def factorization_residual(stats: FourCoinStats, tol: float = INPUT_TOL) -> float:
    """Largest deviation of any p_i from the product form of the marginals.

    Zero means the recipe is exactly a mixed-strategy version of the game.
    """
    m = extract_marginals(stats, tol)
    product = FourCoinStats.from_marginals(m.r, m.s, m.r_prime, m.s_prime)
    return float(np.max(np.abs(stats.p - product.p)))


@dataclass(frozen=True)
class LinearConstraint:
    """``sum(coeff * p_index) == value`` with 1-based indices."""

    coefficients: tuple[tuple[int, float], ...]
    value: float

    def evaluate(self, stats: FourCoinStats) -> float:
        return float(sum(c * stats[i] for i, c in self.coefficients))

    def residual(self, stats: FourCoinStats) -> float:
        return self.evaluate(stats) - self.value

    def __str__(self):
        lhs = " + ".join(f"p{i}" if c == 1 else f"{c:g}*p{i}" for i, c in self.coefficients)
        return f"{lhs} = {self.value:g}"


_SUPPORT = {
    # (s, s') = (0, 0): s = p9 + p10, s' = p5 + p7
    Pair.S2_S2: ((9, 10), (5, 7)),
    # (r, s') = (0, 0): r = p1 + p2, s' = p5 + p7
    Pair.S1_S2: ((1, 2), (5, 7)),
}


def ne_support_constraints(
    game: BiMatrixGame,
    pair: Pair | str,
    ne: ProfileLike = (0.0, 0.0),
) -> list[LinearConstraint]:
    """Extra linear constraints the statistics must meet for the corner
    equilibrium ``ne`` of ``pair`` to be reproduced by coins.

    Only the corner (0, 0) at pairs (S2, S2') and (S1, S2') is supported.
    """
    pair = Pair(pair)
    ne = _as_profile(ne)
    if pair not in _SUPPORT or ne.values != (0.0, 0.0):
        raise NotDerivedError(
            f"support constraints not derived for equilibrium {ne.values} at pair {pair.value}"
        )
    for dev in ((0.0, 1.0), (1.0, 0.0), (1.0, 1.0)):
        if min(ne_margins(game, ne, dev)) < -1e-12:
            raise NotDerivedError(f"(0, 0) is not a Nash equilibrium of {game}")
    return [
        LinearConstraint(tuple((i, 1.0) for i in idx), 0.0) for idx in _SUPPORT[pair]
    ]
