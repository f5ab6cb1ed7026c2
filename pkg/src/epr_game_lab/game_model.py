"""Symmetric 2x2 bi-matrix games and their mixed-strategy payoffs.

The game is fixed by four constants::

                 Bob X1'     Bob X2'
    Alice X1    (K, K)      (L, M)
    Alice X2    (M, L)      (N, N)

A strategy weight is the probability of heads of the coin a player hands
to the referee. In the signed regime weights may leave [0, 1]; the payoff
and margin formulas are evaluated without clamping.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

__all__ = [
    "NE_TOL",
    "PD1",
    "PD2",
    "BiMatrixGame",
    "Player",
    "Profile",
    "Regime",
    "StrategyWeight",
    "bilinear_payoff",
    "classical_ne_search",
    "ne_margins",
]

NE_TOL = 1e-12


class Player(str, enum.Enum):
    ALICE = "alice"
    BOB = "bob"


class Regime(str, enum.Enum):
    CLASSICAL = "classical"
    SIGNED = "signed"


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class BiMatrixGame:
    K: float
    L: float
    M: float
    N: float

    def __post_init__(self):
        for name in "KLMN":
            object.__setattr__(self, name, _finite(name, getattr(self, name)))

    @property
    def is_prisoners_dilemma(self) -> bool:
        return self.M > self.K > self.N > self.L

    @property
    def interaction(self) -> float:
        """Coefficient K - M - L + N of the cross term."""
        return self.K - self.M - self.L + self.N

    def for_player(self, player: Player | str) -> "BiMatrixGame":
        """Game as seen by ``player``: Bob's payoffs follow from L <-> M."""
        if Player(player) is Player.BOB:
            return BiMatrixGame(self.K, self.M, self.L, self.N)
        return self

    def as_dict(self) -> dict:
        return {"K": self.K, "L": self.L, "M": self.M, "N": self.N}


PD1 = BiMatrixGame(3.0, 0.0, 5.0, 1.0)
PD2 = BiMatrixGame(3.0, 0.0, 5.0, 0.2)


@dataclass(frozen=True)
class StrategyWeight:
    value: float
    regime: Regime = Regime.CLASSICAL

    def __post_init__(self):
        object.__setattr__(self, "value", _finite("strategy weight", self.value))
        object.__setattr__(self, "regime", Regime(self.regime))
        if self.regime is Regime.CLASSICAL and not 0.0 <= self.value <= 1.0:
            raise ValueError(
                f"classical strategy weight must lie in [0, 1], got {self.value!r}"
            )

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class Profile:
    alice: StrategyWeight
    bob: StrategyWeight

    def __post_init__(self):
        if self.alice.regime is not self.bob.regime:
            raise ValueError(
                f"profile mixes regimes: {self.alice.regime.value} vs {self.bob.regime.value}"
            )

    @classmethod
    def of(cls, alice: float, bob: float, regime: Regime | str = Regime.CLASSICAL) -> "Profile":
        regime = Regime(regime)
        return cls(StrategyWeight(alice, regime), StrategyWeight(bob, regime))

    @property
    def regime(self) -> Regime:
        return self.alice.regime

    @property
    def values(self) -> tuple[float, float]:
        return self.alice.value, self.bob.value


ProfileLike = Union[Profile, "tuple[float, float]"]


def _as_profile(profile: ProfileLike) -> Profile:
    if isinstance(profile, Profile):
        return profile
    a, b = profile
    a, b = float(a), float(b)
    regime = Regime.CLASSICAL if 0 <= a <= 1 and 0 <= b <= 1 else Regime.SIGNED
    return Profile.of(a, b, regime)


def bilinear_payoff(game: BiMatrixGame, profile: ProfileLike, player: Player | str = Player.ALICE) -> float:
    """Mixed-strategy payoff of ``player`` when Alice's coin shows heads with
    probability ``a`` and Bob's with probability ``b``.

    ``profile`` may be a :class:`Profile` or a plain ``(a, b)`` tuple.
    """
    a, b = _as_profile(profile).values
    g = game.for_player(player)
    return g.K * a * b + g.L * a * (1 - b) + g.M * b * (1 - a) + g.N * (1 - a) * (1 - b)


def ne_margins(game: BiMatrixGame, candidate: ProfileLike, deviation: ProfileLike) -> tuple[float, float]:
    """Payoff gains of sticking with ``candidate`` rather than deviating.

    With candidate ``(s, s')`` and deviation ``(r, r')``::

        margin_A = (s - r)  * ((K - M - L + N) * s' + (L - N))
        margin_B = (s' - r') * ((K - M - L + N) * s + (L - N))

    The candidate is a Nash equilibrium against the deviation iff both
    margins are non-negative.
    """
    # plain tuples are tagged by inspection and may mix; explicit profiles may not
    if (
        isinstance(candidate, Profile)
        and isinstance(deviation, Profile)
        and candidate.regime is not deviation.regime
    ):
        raise ValueError("candidate and deviation regimes differ")
    candidate, deviation = _as_profile(candidate), _as_profile(deviation)
    s, sp = candidate.values
    r, rp = deviation.values
    c, d = game.interaction, game.L - game.N
    return (s - r) * (c * sp + d), (sp - rp) * (c * s + d)


def _grid(step: float) -> np.ndarray:
    step = float(step)
    if not 0 < step <= 0.5:
        raise ValueError(f"grid_step must lie in (0, 0.5], got {step!r}")
    n = int(math.floor(1.0 / step + 1e-9))
    points = np.arange(n + 1) * step
    if abs(points[-1] - 1.0) > 1e-9:
        points = np.append(points, 1.0)
    else:
        points[-1] = 1.0
    return points


def classical_ne_search(game: BiMatrixGame, grid_step: float) -> list[Profile]:
    """All grid profiles that survive every unilateral deviation.

    Margins are affine in the deviating coordinate, so checking the pure
    deviations 0 and 1 covers the whole grid (and all of [0, 1]).
    """
    grid = _grid(grid_step)
    s, sp = np.meshgrid(grid, grid, indexing="ij")
    c, d = game.interaction, game.L - game.N
    ok = np.ones_like(s, dtype=bool)
    for r in (0.0, 1.0):
        ok &= (s - r) * (c * sp + d) >= -NE_TOL
        ok &= (sp - r) * (c * s + d) >= -NE_TOL
    return [Profile.of(s[i, j], sp[i, j]) for i, j in zip(*np.nonzero(ok))]


def profiles_as_tuples(profiles: Iterable[Profile]) -> list[tuple[float, float]]:
    return [p.values for p in profiles]
