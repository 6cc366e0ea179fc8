"""Independent brute-force reference implementations used by the tests.

Written with plain Python loops on purpose: none of these share code with
the package paths they check.
"""

from __future__ import annotations

import itertools
import math


def dominates(a, b) -> bool:
    ge = all(x >= y for x, y in zip(a, b))
    gt = any(x > y for x, y in zip(a, b))
    return ge and gt


def frontier(points, subset=None) -> list[int]:
    idx = list(range(len(points))) if subset is None else list(subset)
    return [i for i in idx if not any(dominates(points[j], points[i]) for j in idx if j != i)]


def strata(points) -> list[list[int]]:
    """Repeatedly strip the frontier of what is left."""
    left = list(range(len(points)))
    out = []
    while left:
        front = frontier(points, left)
        out.append(sorted(front))
        left = [i for i in left if i not in set(front)]
    return out


def phi(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def p_dominated_inclusion_exclusion(train, mu, sd) -> float:
    """P[Y <= y componentwise for some y in train], Y ~ N(mu, diag sd^2)."""
    total = 0.0
    n = len(train)
    for r in range(1, n + 1):
        for subset in itertools.combinations(range(n), r):
            corner = [min(train[i][d] for i in subset) for d in range(len(mu))]
            prob = 1.0
            for d in range(len(mu)):
                prob *= phi((corner[d] - mu[d]) / sd[d])
            total += (-1) ** (r + 1) * prob
    return total


def r_squared(y, yhat) -> float:
    n = len(y)
    ybar = sum(y) / n
    ss_res = sum((a - b) ** 2 for a, b in zip(y, yhat))
    ss_tot = sum((a - ybar) ** 2 for a in y)
    return 1.0 - ss_res / ss_tot


def strata_numpy(Y):
    """Repeated frontier stripping with a full pairwise comparison per layer."""
    import numpy as np

    Y = np.asarray(Y, dtype=float)
    left = np.arange(Y.shape[0])
    out = []
    while left.size:
        P = Y[left]
        ge = np.all(P[:, None, :] >= P[None, :, :], axis=2)
        gt = np.any(P[:, None, :] > P[None, :, :], axis=2)
        dominated = np.any(ge & gt, axis=0)
        out.append(sorted(left[~dominated].tolist()))
        left = left[dominated]
    return out


def hypergeometric_mean_sd(draws: int, successes: int, population: int) -> tuple[float, float]:
    p = successes / population
    var = draws * p * (1 - p) * (population - draws) / (population - 1)
    return draws * p, math.sqrt(var)
