"""Independent brute-force oracles shared by the test modules.

Everything here works directly on position sets with naive enumeration,
deliberately bypassing the library's lag-polynomial machinery.
"""

from __future__ import annotations

import random
from collections import Counter

from ulafit import SparseArray, SubUla


def brute_weights(positions) -> Counter:
    """Pair counts per lag from direct enumeration of ordered pairs."""
    pos = list(positions)
    counts = Counter()
    for p in pos:
        for q in pos:
            counts[p - q] += 1
    return counts


def brute_lags(positions) -> set:
    return set(brute_weights(positions))


def brute_j(positions) -> int:
    """Largest J with all lags 0..J present."""
    lags = brute_lags(positions)
    j = 0
    while j + 1 in lags:
        j += 1
    return j


def brute_udof(positions) -> int:
    return 2 * brute_j(positions) + 1


def random_array(rng: random.Random, max_subs: int = 5) -> SparseArray:
    """Random multi-sub-ULA geometry with gaps >= 1."""
    n_subs = rng.randint(1, max_subs)
    subs = []
    start = 0
    for i in range(n_subs):
        if i > 0:
            start += rng.randint(1, 6)
        interspace = rng.randint(1, 5)
        count = rng.randint(1, 5)
        subs.append(SubUla(start, interspace, count))
        start = subs[-1].last
    return SparseArray(tuple(subs))


def random_sub_ula_pair(rng: random.Random):
    """Two valid sub-ULAs with the second strictly after the first."""
    a = SubUla(rng.randint(0, 10), rng.randint(1, 8), rng.randint(1, 6))
    gap = rng.randint(1, 12)
    b = SubUla(a.last + gap, rng.randint(1, 12), rng.randint(1, 6))
    return a, b, gap
