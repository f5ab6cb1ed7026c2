"""Deterministic local hidden variable model over sixteen outcome classes.

Each class fixes the +1/-1 outcome of all four observables (S1, S1', S2, S2')
and carries a weight m_i. The weights sum to one but may be negative, which
is what a violation of the Bell-CHSH inequality requires.

Joint probabilities are not transcribed by hand: they are summed from the
outcome table, so the row order below is the single source of truth.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .coin_statistics import PAIRS, FourCoinStats, Pair, StrategyMarginals

__all__ = [
    "OBSERVABLES",
    "OUTCOME_TABLE",
    "CHSHResult",
    "JointProbabilities",
    "MeasureError",
    "NegativityReport",
    "SignedMeasure",
    "chsh_value",
    "correlator",
    "incidence_matrix",
    "is_perfect_correlation",
    "negativity_report",
    "perfect_correlation_measure",
    "probabilities_from_measure",
    "strategy_probs_from_measure",
]

SUM_TOL = 1e-12
NEGATIVE_TOL = 1e-12

OBSERVABLES = ("S1", "S1'", "S2", "S2'")
# row i (0-based) is the outcome class Lambda_{i+1}; ++++ first, ---- last
OUTCOME_TABLE = np.array(list(itertools.product((1, -1), repeat=4)), dtype=int)
OUTCOME_TABLE.setflags(write=False)

# observable columns (Alice, Bob) behind each statistics block
_PAIR_COLUMNS = {
    Pair.S1_S1: (0, 1),
    Pair.S1_S2: (0, 3),
    Pair.S2_S1: (2, 1),
    Pair.S2_S2: (2, 3),
}
_SIGNS = ((1, 1), (1, -1), (-1, 1), (-1, -1))  # HH, HT, TH, TT

JointProbabilities = FourCoinStats


class MeasureError(ValueError):
    pass


def incidence_matrix() -> np.ndarray:
    """16x16 0/1 matrix A with p = A @ m."""
    rows = []
    for pair in PAIRS:
        a, b = _PAIR_COLUMNS[pair]
        for sa, sb in _SIGNS:
            rows.append((OUTCOME_TABLE[:, a] == sa) & (OUTCOME_TABLE[:, b] == sb))
    return np.array(rows, dtype=float)


_INCIDENCE = incidence_matrix()
_INCIDENCE.setflags(write=False)


@dataclass(frozen=True, eq=False)
class SignedMeasure:
    m: np.ndarray

    def __post_init__(self):
        m = np.array(self.m, dtype=float).reshape(-1)
        if m.shape != (16,):
            raise MeasureError(f"expected 16 measure values, got {m.size}")
        if not np.all(np.isfinite(m)):
            raise MeasureError("measure values must be finite")
        total = float(m.sum())
        if abs(total - 1.0) > SUM_TOL:
            raise MeasureError(f"measure sums to {total!r}, residual {total - 1.0:.3g}")
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    @classmethod
    def uniform(cls) -> "SignedMeasure":
        return cls(np.full(16, 1 / 16))

    @classmethod
    def from_entries(cls, entries: dict[int, float]) -> "SignedMeasure":
        """Build from ``{index: value}`` with 1-based indices, rest zero."""
        m = np.zeros(16)
        for i, v in entries.items():
            m[i - 1] = v
        return cls(m)

    @property
    def is_signed(self) -> bool:
        return bool(np.any(self.m < -NEGATIVE_TOL))

    def __getitem__(self, index: int) -> float:
        if not 1 <= index <= 16:
            raise IndexError(index)
        return float(self.m[index - 1])

    def __eq__(self, other):
        return isinstance(other, SignedMeasure) and np.array_equal(self.m, other.m)

    def __hash__(self):
        return hash(self.m.tobytes())

    def as_list(self) -> list[float]:
        return [float(x) for x in self.m]


def probabilities_from_measure(m: SignedMeasure) -> JointProbabilities:
    return FourCoinStats(_INCIDENCE @ m.m)


def correlator(m: SignedMeasure, pair: Pair | str) -> float:
    """Expectation of the product of the two outcomes measured in ``pair``."""
    a, b = _PAIR_COLUMNS[Pair(pair)]
    return float(np.sum(m.m * OUTCOME_TABLE[:, a] * OUTCOME_TABLE[:, b]))


class CHSHResult(NamedTuple):
    value: float
    violates: bool


def chsh_value(m: SignedMeasure) -> CHSHResult:
    """E(S1,S1') + E(S1,S2') + E(S2,S1') - E(S2,S2')."""
    e = [correlator(m, pair) for pair in PAIRS]
    value = e[0] + e[1] + e[2] - e[3]
    return CHSHResult(value, abs(value) > 2 + SUM_TOL)


def chsh_variants(m: SignedMeasure) -> tuple[float, float, float, float]:
    """All four CHSH combinations, the minus sign on each correlator in turn."""
    e = np.array([correlator(m, pair) for pair in PAIRS])
    return tuple(float(e.sum() - 2 * e[k]) for k in (3, 2, 1, 0))


def is_perfect_correlation(m: SignedMeasure, tol: float = SUM_TOL) -> bool:
    """True when classes 5..12 carry no weight and p1 is 0 or 1."""
    head = float(m.m[:4].sum())
    return bool(
        np.all(np.abs(m.m[4:12]) <= tol)
        and (abs(head - 1.0) <= tol or abs(head) <= tol)
    )


def perfect_correlation_measure(
    head: Sequence[float],
    tail: Sequence[float],
    *,
    p1: int = 1,
) -> SignedMeasure:
    """Measure for perfectly correlated pairs (p2 = p3 = 0).

    ``head`` is (m1, m2, m3, m4) and ``tail`` is (m13, m14, m15, m16);
    m5..m12 are zero. With the default ``p1=1`` the head weights sum to one
    and the tail weights to zero. ``p1=0`` is the alternative reduction
    (p4 = 1) where the roles of the two sums are exchanged.
    """
    if p1 not in (0, 1):
        raise MeasureError(f"p1 must be 0 or 1, got {p1!r}")
    head = np.asarray(head, dtype=float)
    tail = np.asarray(tail, dtype=float)
    if head.shape != (4,) or tail.shape != (4,):
        raise MeasureError("head and tail must each hold four values")
    head_res = float(head.sum()) - p1
    tail_res = float(tail.sum()) - (1 - p1)
    if abs(head_res) > SUM_TOL:
        raise MeasureError(f"m1 + m2 + m3 + m4 must equal {p1}, residual {head_res:.3g}")
    if abs(tail_res) > SUM_TOL:
        raise MeasureError(
            f"m13 + m14 + m15 + m16 must equal {1 - p1}, residual {tail_res:.3g}"
        )
    return SignedMeasure(np.concatenate([head, np.zeros(8), tail]))


def strategy_probs_from_measure(m: SignedMeasure) -> StrategyMarginals:
    """Head probabilities for a perfectly correlated measure.

    r = r' = p1 and the remaining two follow from p9 + p10 and p5 + p7 with
    classes 5..12 empty.
    """
    if not is_perfect_correlation(m):
        raise MeasureError(
            "measure is not perfect-correlation reduced; build it with perfect_correlation_measure"
        )
    r = float(m.m[:4].sum())
    r = 1.0 if abs(r - 1.0) <= SUM_TOL else 0.0
    return StrategyMarginals(
        r=r,
        s=m[1] + m[2] + m[13] + m[14],
        r_prime=r,
        s_prime=m[1] + m[3] + m[13] + m[15],
    )


@dataclass(frozen=True)
class NegativityReport:
    measure_indices: tuple[int, ...]
    probability_indices: tuple[int, ...]

    def __bool__(self):
        return bool(self.measure_indices or self.probability_indices)

    def as_dict(self) -> dict:
        return {
            "negative_m": list(self.measure_indices),
            "negative_p": list(self.probability_indices),
        }


def negativity_report(m: SignedMeasure) -> NegativityReport:
    p = probabilities_from_measure(m).p
    return NegativityReport(
        tuple(int(i) + 1 for i in np.nonzero(m.m < -NEGATIVE_TOL)[0]),
        tuple(int(i) + 1 for i in np.nonzero(p < -NEGATIVE_TOL)[0]),
    )
