"""Shared test fixtures and an independent reference oracle.

The reference implementations here deliberately avoid the library's
enumeration and regression code paths: profiles and pairs are generated by
filtering the full cross product, and product terms are computed by nested
loops.  Tests use them to cross-check the package from the outside.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import pytest


def reference_profiles(k: int, s: int) -> list[tuple[int, ...]]:
    """Every level tuple with exactly s non-zero entries, by brute filtering."""
    return [
        levels
        for levels in itertools.product((-1, 0, 1), repeat=k)
        if sum(1 for v in levels if v != 0) == s
    ]


def reference_pairs(k: int, s: int, depth: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Every ordered pair of same-support profiles differing in exactly `depth` spots."""
    profiles = reference_profiles(k, s)
    pairs = []
    for i in profiles:
        for j in profiles:
            if any((a == 0) != (b == 0) for a, b in zip(i, j)):
                continue
            if sum(1 for a, b in zip(i, j) if a != b) == depth:
                pairs.append((i, j))
    return pairs


def reference_regression(levels: tuple[int, ...]) -> list[int]:
    """Model row by nested loops: levels, then all higher-order products."""
    k = len(levels)
    row = list(levels)
    for a in range(k):
        for b in range(a + 1, k):
            row.append(levels[a] * levels[b])
    for a in range(k):
        for b in range(a + 1, k):
            for c in range(b + 1, k):
                row.append(levels[a] * levels[b] * levels[c])
    for a in range(k):
        for b in range(a + 1, k):
            for c in range(b + 1, k):
                for e in range(c + 1, k):
                    row.append(levels[a] * levels[b] * levels[c] * levels[e])
    return row


def reference_uniform_info(
    k: int, s: int, depth: int
) -> list[list[Fraction]]:
    """Information matrix of the uniform depth design, exact, by accumulation."""
    pairs = reference_pairs(k, s, depth)
    p = len(reference_regression((1,) * k))
    total = [[0] * p for _ in range(p)]
    for i, j in pairs:
        fi = reference_regression(i)
        fj = reference_regression(j)
        diff = [a - b for a, b in zip(fi, fj)]
        nonzero = [(idx, v) for idx, v in enumerate(diff) if v != 0]
        for a, va in nonzero:
            row = total[a]
            for b, vb in nonzero:
                row[b] += va * vb
    n = len(pairs)
    return [[Fraction(v, n) for v in row] for row in total]


@pytest.fixture(scope="session")
def spec44():
    from pairdesign import ModelSpec

    return ModelSpec(4, 4)


@pytest.fixture(scope="session")
def spec54():
    from pairdesign import ModelSpec

    return ModelSpec(5, 4)


@pytest.fixture(scope="session")
def spec55():
    from pairdesign import ModelSpec

    return ModelSpec(5, 5)
