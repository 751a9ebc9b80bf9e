"""Shared enumeration oracle for the test suite.

Everything here recomputes statistics and measure weights from first
principles, independently of the package internals: permutations are
plain tuples out of itertools, the statistics are counted with explicit
loops, and the weights come straight from the two binomial formulas.
Expected values frozen into the tests were produced by these helpers.
"""

from fractions import Fraction
from functools import lru_cache
from itertools import permutations as iter_permutations
from math import comb


def oracle_descents(word) -> int:
    return sum(1 for i in range(len(word) - 1) if word[i] > word[i + 1])


def oracle_cyclic_descents(word) -> int:
    return oracle_descents(word) + (1 if word[-1] > word[0] else 0)


@lru_cache(maxsize=None)
def stat_pairs(n: int) -> tuple[tuple[int, int], ...]:
    """(descents, cyclic descents) for every word of S_n."""
    return tuple(
        (oracle_descents(w), oracle_cyclic_descents(w))
        for w in iter_permutations(range(1, n + 1))
    )


def oracle_shuffle_weight(k: int, n: int, d: int) -> Fraction:
    return Fraction(comb(n + k - d - 1, n), k**n)


def oracle_cut_weight(k: int, n: int, c: int) -> Fraction:
    return Fraction(comb(n + k - c - 1, n - 1), n * k ** (n - 1))


def oracle_pmf(family: str, k: int, n: int, statistic: str) -> dict[int, Fraction]:
    """Exact law of d or c under the (family, k, n) measure, by enumeration."""
    masses: dict[int, Fraction] = {}
    for d, c in stat_pairs(n):
        if family == "R":
            weight = oracle_shuffle_weight(k, n, d)
        else:
            weight = oracle_cut_weight(k, n, c)
        value = d if statistic == "d" else c
        masses[value] = masses.get(value, Fraction(0)) + weight
    return {v: m for v, m in sorted(masses.items()) if m}


def oracle_moment(family, k, n, statistic, power) -> Fraction:
    pmf = oracle_pmf(family, k, n, statistic)
    return sum((m * v**power for v, m in pmf.items()), Fraction(0))


def pmf_as_dict(pmf) -> dict:
    """Plain dict view of an ExactPmf, for comparison against oracles."""
    return dict(pmf.items())
