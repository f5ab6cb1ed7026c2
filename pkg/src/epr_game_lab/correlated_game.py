"""Games played with perfectly correlated particle pairs.

With classes 5..12 empty and p1 = 1 both players' S1 coins always show
heads (r = r' = 1), and the remaining head probabilities are

    s  = m1 + m2 + m13 + m14
    s' = m1 + m3 + m13 + m15

Each payoff splits into a part built from m1..m3 only and a part built
from m13..m16, which vanishes whenever the measure is non-negative.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

from .coin_statistics import Pair
from .game_model import PD1, PD2, NE_TOL, BiMatrixGame, Player, ne_margins
from .lhv_engine import MeasureError, SignedMeasure, is_perfect_correlation

__all__ = [
    "DOMAIN",
    "EquilibriumPayoffs",
    "NEVerdict",
    "Representation",
    "ResidualWeights",
    "SplitPayoff",
    "SummedCondition",
    "correlated_payoff",
    "equilibrium_payoffs_quantum",
    "residual_ne_check_pd1",
    "residual_weights",
    "split_payoff",
    "summed_ne_condition",
]

# s2, s2' outside this interval are evaluated but flagged
DOMAIN = (-1.0, 1.0)


def _require_reduced(m: SignedMeasure) -> None:
    if not is_perfect_correlation(m) or abs(float(m.m[:4].sum()) - 1.0) > 1e-12:
        raise MeasureError(
            "correlated payoffs need a perfect-correlation measure with p1 = 1 "
            "(m5..m12 = 0, m1 + m2 + m3 + m4 = 1)"
        )


@dataclass(frozen=True)
class SplitPayoff:
    classical_part: float
    quantum_part: float

    @property
    def total(self) -> float:
        return self.classical_part + self.quantum_part

    def as_dict(self) -> dict:
        return {
            "classical_part": self.classical_part,
            "quantum_part": self.quantum_part,
            "total": self.total,
        }


def split_payoff(
    game: BiMatrixGame,
    m: SignedMeasure,
    pair: Pair | str,
    player: Player | str = Player.ALICE,
) -> SplitPayoff:
    _require_reduced(m)
    g = game.for_player(player)
    K, L, M, N = g.K, g.L, g.M, g.N
    pair = Pair(pair)
    # Bob's observable enters Alice's formulas through m1 + m3 (+ m13 + m15)
    # and Alice's own through m1 + m2 (+ m13 + m14); L <-> M covers Bob.
    a_cls, a_qnt = m[1] + m[2], m[13] + m[14]
    b_cls, b_qnt = m[1] + m[3], m[13] + m[15]

    if pair is Pair.S1_S1:
        return SplitPayoff(K, 0.0)
    if pair is Pair.S1_S2:
        return SplitPayoff(L + (K - L) * b_cls, (K - L) * b_qnt)
    if pair is Pair.S2_S1:
        return SplitPayoff(M + (K - M) * a_cls, (K - M) * a_qnt)
    c = K - L - M + N
    classical = c * a_cls * b_cls + (L - N) * a_cls + (M - N) * b_cls + N
    quantum = (
        c * (a_cls * b_qnt + b_cls * a_qnt + a_qnt * b_qnt)
        + (L - N) * a_qnt
        + (M - N) * b_qnt
    )
    return SplitPayoff(classical, quantum)


def correlated_payoff(
    game: BiMatrixGame,
    m: SignedMeasure,
    pair: Pair | str,
    player: Player | str = Player.ALICE,
) -> float:
    """Payoff of ``player`` at ``pair`` for a perfectly correlated measure.

    Evaluated from the unsplit expressions; :func:`split_payoff` is the
    independent route and the two are required to agree.
    """
    _require_reduced(m)
    g = game.for_player(player)
    K, L, M, N = g.K, g.L, g.M, g.N
    pair = Pair(pair)
    s = m[1] + m[2] + m[13] + m[14]
    sp = m[1] + m[3] + m[13] + m[15]
    if pair is Pair.S1_S1:
        return K
    if pair is Pair.S1_S2:
        return L + (K - L) * sp
    if pair is Pair.S2_S1:
        return M + (K - M) * s
    return (K - L - M + N) * s * sp + (L - N) * s + (M - N) * sp + N


@dataclass(frozen=True)
class ResidualWeights:
    s1: float
    s1_prime: float
    s2: float
    s2_prime: float


def residual_weights(m: SignedMeasure) -> ResidualWeights:
    """Split s and s' into the m1..m3 part and the m13..m15 part."""
    _require_reduced(m)
    return ResidualWeights(
        s1=m[1] + m[2],
        s1_prime=m[1] + m[3],
        s2=m[13] + m[14],
        s2_prime=m[13] + m[15],
    )


@dataclass(frozen=True)
class NEVerdict:
    is_ne: bool
    displaced: bool
    condition_a: float
    condition_b: float


def residual_ne_check_pd1(s2: float, s2_prime: float) -> NEVerdict:
    """Nash check for the first PD representation with m1 = m2 = m3 = 0.

    Holds iff (s2 - 1)(1 + s2') <= 0 and (s2' - 1)(1 + s2) <= 0.
    """
    s2, s2_prime = float(s2), float(s2_prime)
    if not (math.isfinite(s2) and math.isfinite(s2_prime)):
        raise ValueError("s2 and s2' must be finite")
    cond_a = (s2 - 1.0) * (1.0 + s2_prime)
    cond_b = (s2_prime - 1.0) * (1.0 + s2)
    return NEVerdict(
        is_ne=cond_a <= NE_TOL and cond_b <= NE_TOL,
        displaced=s2 < 0 or s2_prime < 0,
        condition_a=cond_a,
        condition_b=cond_b,
    )


@dataclass(frozen=True)
class SummedCondition:
    margin_sum: float
    holds: bool

    @property
    def violated(self) -> bool:
        return not self.holds


def summed_ne_condition(game: BiMatrixGame, s: float, s_prime: float) -> SummedCondition:
    """Sum of both Nash margins against the deviation r = r' = 1.

    A negative sum means at least one player gains by deviating, so
    ``(s, s')`` is not an equilibrium. For PD2 the sum equals
    3.6 * ((4 (s + s') + 1) / 9 - s s').
    """
    s, s_prime = float(s), float(s_prime)
    if not (math.isfinite(s) and math.isfinite(s_prime)):
        raise ValueError("s and s' must be finite")
    ma, mb = ne_margins(game, (s, s_prime), (1.0, 1.0))
    total = ma + mb
    return SummedCondition(total, total >= -NE_TOL)


class Representation(str, enum.Enum):
    PD1 = "pd1"
    PD2 = "pd2"
    GENERAL = "general"


@dataclass(frozen=True)
class EquilibriumPayoffs:
    alice: float
    bob: float
    in_domain: bool = True

    def as_tuple(self) -> tuple[float, float]:
        return self.alice, self.bob


_REPRESENTATION_GAMES = {Representation.PD1: PD1, Representation.PD2: PD2}


def equilibrium_payoffs_quantum(
    game: BiMatrixGame,
    s2: float,
    s2_prime: float,
    representation: Representation | str = Representation.GENERAL,
    *,
    warn: bool = True,
) -> EquilibriumPayoffs:
    """Payoffs at (S2, S2') when m1 = m2 = m3 = 0.

    The classical part is N for both players; the rest comes from the
    tail weights. ``pd1`` and ``pd2`` use the reduced polynomials and
    require ``game`` to carry those constants.
    """
    rep = Representation(representation)
    s2, s2_prime = float(s2), float(s2_prime)
    if not (math.isfinite(s2) and math.isfinite(s2_prime)):
        raise ValueError("s2 and s2' must be finite")
    if rep in _REPRESENTATION_GAMES and game != _REPRESENTATION_GAMES[rep]:
        raise ValueError(f"{rep.value} requires {_REPRESENTATION_GAMES[rep]}, got {game}")

    in_domain = all(DOMAIN[0] <= v <= DOMAIN[1] for v in (s2, s2_prime))
    if warn and not in_domain:
        warnings.warn(
            f"s2={s2!r}, s2'={s2_prime!r} outside {DOMAIN}; evaluating formulas anyway",
            stacklevel=2,
        )

    if rep is Representation.PD1:
        a = s2_prime * (4 - s2) - s2 + 1
        b = s2 * (4 - s2_prime) - s2_prime + 1
    elif rep is Representation.PD2:
        a = s2_prime * (4.8 - 1.8 * s2) + 0.2 * (1 - s2)
        b = s2 * (4.8 - 1.8 * s2_prime) + 0.2 * (1 - s2_prime)
    else:
        K, L, M, N = game.K, game.L, game.M, game.N
        c = K - L - M + N
        a = N + c * s2 * s2_prime + (L - N) * s2 + (M - N) * s2_prime
        b = N + c * s2 * s2_prime + (M - N) * s2 + (L - N) * s2_prime
    return EquilibriumPayoffs(a, b, in_domain)
