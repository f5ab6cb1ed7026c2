"""Repeated rounds of the four-coin protocol.

Each round the referee picks a strategy pair and records the outcome of
tossing the two chosen coins. Only non-negative blocks can be sampled;
signed statistics stay analytic.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .coin_statistics import OUTCOMES, PAIRS, FourCoinStats, Pair
from .game_model import BiMatrixGame, Player

__all__ = [
    "GENERATOR",
    "EmpiricalStats",
    "SamplingError",
    "TossTranscript",
    "empirical_payoff",
    "estimate_stats",
    "read_transcript",
    "sample_rounds",
]

GENERATOR = "numpy.random.PCG64"
NEGATIVE_TOL = 1e-12


class SamplingError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TossTranscript:
    """Pair and outcome codes per round (0..3, in block and HH..TT order)."""

    pairs: np.ndarray
    outcomes: np.ndarray
    seed: int
    generator: str = GENERATOR

    def __post_init__(self):
        pairs = np.asarray(self.pairs, dtype=np.int8)
        outcomes = np.asarray(self.outcomes, dtype=np.int8)
        if pairs.shape != outcomes.shape or pairs.ndim != 1:
            raise ValueError("pairs and outcomes must be 1-d and of equal length")
        if pairs.size and (pairs.min() < 0 or pairs.max() > 3):
            raise ValueError("pair codes must lie in 0..3")
        if outcomes.size and (outcomes.min() < 0 or outcomes.max() > 3):
            raise ValueError("outcome codes must lie in 0..3 (HH, HT, TH, TT)")
        pairs.setflags(write=False)
        outcomes.setflags(write=False)
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "outcomes", outcomes)

    def __len__(self):
        return int(self.pairs.size)

    def __eq__(self, other):
        return (
            isinstance(other, TossTranscript)
            and self.seed == other.seed
            and self.generator == other.generator
            and np.array_equal(self.pairs, other.pairs)
            and np.array_equal(self.outcomes, other.outcomes)
        )

    def counts(self) -> np.ndarray:
        """4x4 table of outcome counts, one row per pair."""
        table = np.zeros((4, 4), dtype=np.int64)
        np.add.at(table, (self.pairs, self.outcomes), 1)
        return table

    def to_text(self) -> str:
        buf = io.StringIO()
        buf.write(f"# seed={self.seed} generator={self.generator}\n")
        buf.write("round_index,pair,outcome\n")
        labels = [p.value for p in PAIRS]
        for i, (p, o) in enumerate(zip(self.pairs.tolist(), self.outcomes.tolist())):
            buf.write(f'{i},"{labels[p]}",{OUTCOMES[o]}\n')
        return buf.getvalue()

    def to_bytes(self) -> bytes:
        return self.to_text().encode("utf-8")

    def write(self, path: str | Path) -> None:
        Path(path).write_bytes(self.to_bytes())


def read_transcript(path: str | Path) -> TossTranscript:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ValueError(f"{path}: missing '# seed=... generator=...' header")
    meta = dict(tok.split("=", 1) for tok in lines[0][1:].split())
    if lines[1:2] != ["round_index,pair,outcome"]:
        raise ValueError(f"{path}:2: expected column header 'round_index,pair,outcome'")
    pair_code = {p.value: k for k, p in enumerate(PAIRS)}
    outcome_code = {o: k for k, o in enumerate(OUTCOMES)}
    pairs, outcomes = [], []
    for lineno, line in enumerate(lines[2:], start=3):
        idx, rest = line.split(",", 1)
        pair, outcome = rest.rsplit(",", 1)
        pair = pair.strip('"')
        if int(idx) != len(pairs) or pair not in pair_code or outcome not in outcome_code:
            raise ValueError(f"{path}:{lineno}: malformed record {line!r}")
        pairs.append(pair_code[pair])
        outcomes.append(outcome_code[outcome])
    return TossTranscript(
        np.array(pairs), np.array(outcomes), int(meta["seed"]), meta.get("generator", GENERATOR)
    )


def _policy(pair_policy: Sequence[float] | dict | None) -> np.ndarray:
    if pair_policy is None:
        return np.full(4, 0.25)
    if isinstance(pair_policy, dict):
        weights = np.zeros(4)
        for pair, w in pair_policy.items():
            weights[Pair(pair).block] = w
    else:
        weights = np.asarray(pair_policy, dtype=float)
    if weights.shape != (4,) or np.any(weights < 0) or not np.isclose(weights.sum(), 1.0):
        raise SamplingError(f"pair_policy must be 4 non-negative weights summing to 1, got {weights}")
    return weights / weights.sum()


def sample_rounds(
    stats: FourCoinStats,
    n: int,
    seed: int,
    pair_policy: Sequence[float] | dict | None = None,
) -> TossTranscript:
    """Draw ``n`` rounds: a pair from ``pair_policy`` (uniform by default),
    then an outcome by inverse CDF over (HH, HT, TH, TT)."""
    if n < 0:
        raise SamplingError("n must be non-negative")
    policy = _policy(pair_policy)
    blocks = stats.blocks
    for k in np.nonzero(policy > 0)[0]:
        bad = np.nonzero(blocks[k] < -NEGATIVE_TOL)[0]
        if bad.size:
            i = 4 * k + bad[0] + 1
            raise SamplingError(
                f"p{i} = {stats[i]!r} is negative; signed statistics cannot be sampled"
            )
        if abs(blocks[k].sum() - 1.0) > 1e-9:
            raise SamplingError(f"block {PAIRS[k].value} is not normalized")
    cdf = np.cumsum(np.clip(blocks, 0.0, None), axis=1)
    cdf /= cdf[:, -1:]

    rng = np.random.Generator(np.random.PCG64(seed))
    pairs = rng.choice(4, size=n, p=policy)
    u = rng.random(n)
    outcomes = (u[:, None] >= cdf[pairs, :3]).sum(axis=1)
    return TossTranscript(pairs, outcomes, int(seed))


@dataclass(frozen=True)
class EmpiricalStats:
    stats: FourCoinStats
    stderr: np.ndarray
    counts: np.ndarray


def estimate_stats(t: TossTranscript) -> EmpiricalStats:
    counts = t.counts()
    per_pair = counts.sum(axis=1)
    missing = [PAIRS[k].value for k in np.nonzero(per_pair == 0)[0]]
    if missing:
        raise SamplingError(f"no rounds recorded for pair(s): {', '.join(missing)}")
    freq = counts / per_pair[:, None]
    stderr = np.sqrt(freq * (1 - freq) / per_pair[:, None])
    return EmpiricalStats(FourCoinStats(freq.reshape(-1)), stderr.reshape(-1), counts)


def empirical_payoff(
    t: TossTranscript,
    game: BiMatrixGame,
    pair: Pair | str,
    player: Player | str = Player.ALICE,
) -> tuple[float, float]:
    """Recipe payoff on the observed frequencies of ``pair``, with its
    standard error from the multinomial covariance of that block."""
    pair = Pair(pair)
    counts = t.counts()[pair.block]
    n = int(counts.sum())
    if n == 0:
        raise SamplingError(f"no rounds recorded for pair {pair.value}")
    g = game.for_player(player)
    c = np.array([g.K, g.L, g.M, g.N])
    # offsets from K keep a constant game exactly constant
    value = g.K + float(np.dot(c[1:] - g.K, counts[1:])) / n
    freq = counts / n
    var = float(np.dot(freq, (c - value) ** 2)) / n
    return value, float(np.sqrt(var))
