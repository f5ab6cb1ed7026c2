"""Randomized search for a signed LHV measure whose joint probabilities are
all in [0, 1] but whose CHSH combination exceeds 2.

Deliberately standalone (no package imports) so the stored fixture is an
independent regression target for ``epr_game_lab.lhv_engine``.

    python3 scripts/search_chsh_fixture.py tests/fixtures/signed_chsh_measure.json
"""
import itertools
import json
import sys

import numpy as np

# rows over (S1, S1', S2, S2'), ++++ first, ---- last
ROWS = np.array(list(itertools.product([1, -1], repeat=4)))
BLOCK_COLUMNS = [(0, 1), (0, 3), (2, 1), (2, 3)]


def joint_probabilities(m):
    p = []
    for a, b in BLOCK_COLUMNS:
        for sa, sb in [(1, 1), (1, -1), (-1, 1), (-1, -1)]:
            mask = (ROWS[:, a] == sa) & (ROWS[:, b] == sb)
            p.append(m[mask].sum())
    return np.array(p)


def chsh(m):
    e = [np.sum(m * ROWS[:, a] * ROWS[:, b]) for a, b in BLOCK_COLUMNS]
    return e[0] + e[1] + e[2] - e[3]


def search(seed=20050820, target=2.5, max_iter=200_000):
    rng = np.random.default_rng(seed)
    m = np.full(16, 1 / 16)
    best = chsh(m)
    step = 0.05
    for _ in range(max_iter):
        d = rng.normal(scale=step, size=16)
        d -= d.mean()
        cand = m + d
        p = joint_probabilities(cand)
        if p.min() < 0 or p.max() > 1:
            continue
        value = chsh(cand)
        if value > best:
            m, best = cand, value
            if best > target:
                break
    return m, best


if __name__ == "__main__":
    m, value = search()
    m[0] += 1.0 - m.sum()
    p = joint_probabilities(m)
    assert value > 2 and p.min() >= 0 and p.max() <= 1
    out = {
        "measure": {"m": [float(x) for x in m]},
    }
    print(f"chsh={value!r} min_m={m.min():.4f} min_p={p.min():.4f}", file=sys.stderr)
    with open(sys.argv[1], "w") as fh:
        json.dump(out, fh, indent=2)
        fh.write("\n")
