"""Exact binomial tail and binomial-convolution tail sums.

Coefficients come from ``math.comb`` (exact integers), terms are accumulated
smallest-first (descending count index) so the tiny tail masses that drive
dark-count suppression keep full double precision.  All formulas use the
``0**0 == 1`` convention and short-circuit the degenerate success
probabilities 0 and 1, so callers never trip over ``nan`` corner cases.
"""

from __future__ import annotations

import math

__all__ = ["pmf", "tail", "conv_tail"]


def pmf(n: int, x: float, j: int) -> float:
    """P[Binomial(n, x) == j]."""
    if j < 0 or j > n:
        return 0.0
    if x <= 0.0:
        return 1.0 if j == 0 else 0.0
    if x >= 1.0:
        return 1.0 if j == n else 0.0
    return math.comb(n, j) * x**j * (1.0 - x) ** (n - j)


def tail(n: int, x: float, m: int) -> float:
    """P[Binomial(n, x) >= m].

    ``m <= 0`` returns exactly 1 and ``m > n`` exactly 0, which lets callers
    pass shifted vote thresholds without special-casing.
    """
    if m <= 0:
        return 1.0
    if m > n:
        return 0.0
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    acc = 0.0
    for j in range(n, m - 1, -1):
        acc += math.comb(n, j) * x**j * (1.0 - x) ** (n - j)
    return min(acc, 1.0)


def conv_tail(n1: int, x: float, n2: int, y: float, m: int) -> float:
    """P[Binomial(n1, x) + Binomial(n2, y) >= m].

    Exact convolution tail over the two independent counts: for every first
    count j1 the remaining mass is the second binomial's tail at ``m - j1``.
    O(n1 * n2) in the worst case via the inner tail sums.
    """
    if m <= 0:
        return 1.0
    if m > n1 + n2:
        return 0.0
    acc = 0.0
    for j1 in range(n1, -1, -1):
        p1 = pmf(n1, x, j1)
        if p1 == 0.0:
            continue
        acc += p1 * tail(n2, y, m - j1)
    return min(acc, 1.0)
