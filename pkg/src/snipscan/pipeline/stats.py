"""Spearman rank correlation with a t-based p-value.

rho is the Pearson coefficient of the average-ranked samples. The
two-sided p-value uses the Student-t approximation
t = rho * sqrt((n-2) / (1-rho^2)) with n-2 degrees of freedom, which is
the standard choice at the sample sizes a study produces; an optional
seeded permutation test covers small samples.
"""

import math
import random
import statistics

from scipy.stats import t as _student_t

from .records import CorrelationResult

VIEWS_VS_CONTRACTS = "views v vs. unique containing contracts nr"


class DegenerateSample(ValueError):
    """All x or all y values are tied; ranks carry no information."""


def average_ranks(values):
    """1-based ranks, ties sharing the mean of their positions."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        shared = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = shared
        i = j + 1
    return ranks


def _p_from_t(rho, n):
    if abs(rho) >= 1.0:
        return 0.0
    t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    return 2.0 * float(_student_t.sf(abs(t), n - 2))


def spearman(pairs, permutations=0, seed=0,
             variable_pair=VIEWS_VS_CONTRACTS):
    """CorrelationResult for (x, y) pairs.

    permutations > 0 adds a permutation p-value from that many seeded
    shuffles of y, reported alongside the t-approximation, never
    replacing it.
    """
    if len(pairs) < 3:
        raise ValueError("need at least 3 pairs, got %d" % len(pairs))
    xs = [float(x) for x, _ in pairs]
    ys = [float(y) for _, y in pairs]
    if len(set(xs)) < 2 or len(set(ys)) < 2:
        raise DegenerateSample("a tied sample has no rank ordering")
    rx = average_ranks(xs)
    ry = average_ranks(ys)
    rho = statistics.correlation(rx, ry)
    n = len(pairs)
    perm_p = None
    if permutations > 0:
        rng = random.Random(seed)
        shuffled = list(ry)
        observed = abs(rho) - 1e-12
        hits = 0
        for _ in range(permutations):
            rng.shuffle(shuffled)
            if abs(statistics.correlation(rx, shuffled)) >= observed:
                hits += 1
        perm_p = (hits + 1) / (permutations + 1)
    return CorrelationResult(n, rho, _p_from_t(rho, n), variable_pair, perm_p)
