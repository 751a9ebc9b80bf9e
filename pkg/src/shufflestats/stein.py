"""Poisson approximation: Stein solver, exact TV, certified bounds.

Three statistics are covered, each approaching a Poisson law:

    code "Cd": k - d(pi) under C(k, n), lambda = k/n
    code "Cc": k - c(pi) under C(k, n), lambda = k/n
    code "R":  k - 1 - d(pi) under R(k, n), lambda = k/(n+1)

The certified upper bounds are

    Cd: (k/n)^2 + k(n+1)(1-1/k)^n
    Cc: (k/n)^2 + 2k/n + k(n+1)(1-1/k)^n
    R:  (k/(n+1))^2 + 2k/(n+1) + k(n+2)(1-1/k)^(n+1)

and every report checks tv_exact <= bound, raising CertificationError
when the certificate fails (which would mean a bug, not a near miss).

Numerics policy. The Stein equation is solved by the forward recurrence
g(j+1) = (1{j in A} - P(A) + j g(j)) / lambda exactly as constructed,
but in mpmath working precision sized to the instance: the recurrence's
homogeneous mode grows like j!/lambda^j, so double precision loses the
bounded solution entirely well before j = 20 at lambda = 1. Extending
the mantissa by log10(j_max!/lambda^j_max) digits keeps the returned
floats correct to ~1e-15. Total variation against Poisson is computed
at 40-digit precision with the Poisson tail beyond the pmf support
summed upward and the truncation remainder folded into a reported
sandwich, whose width stays far below 1e-13.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, exp, lgamma, log
from typing import Iterable, Union

import mpmath as mp

from .errors import CertificationError, UserInputError
from .measures import ExactPmf, c_pmf_C, d_pmf_C, d_pmf_R

Rational = Union[Fraction, float]

STATISTIC_CODES = ("Cd", "Cc", "R")

_TV_DPS = 40
_SANDWICH_LIMIT = 1e-13


def poisson_pmf(lam: float, j: int) -> float:
    """P(Poisson(lam) = j), evaluated in log space for stability."""
    if lam <= 0:
        raise UserInputError("lambda must be positive")
    if j < 0:
        raise UserInputError("j must be >= 0")
    return exp(-lam + j * log(lam) - lgamma(j + 1))


def poisson_tail(lam: float, j: int) -> float:
    """P(Poisson(lam) > j) by upward summation of pmf terms.

    Terms are added from j+1 upward and the sum is truncated once the
    running term falls below 1e-18 of the accumulated tail past the
    mode, so the relative truncation error is far below 1e-15.
    """
    if lam <= 0:
        raise UserInputError("lambda must be positive")
    if j < 0:
        raise UserInputError("j must be >= 0")
    i = j + 1
    term = poisson_pmf(lam, i)
    total = 0.0
    while True:
        total += term
        i += 1
        term = term * lam / i
        if i > lam and (total == 0.0 or term < 1e-18 * total):
            return total + term


def _mpf_of(x: Rational) -> mp.mpf:
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


@dataclass(frozen=True)
class SteinSolution:
    """Solution g of lambda*g(j+1) - j*g(j) = 1{j in A} - P_lambda(A).

    g is tabulated on 0..j_max with g(0) = 0. The classical bounds
    sup|g| <= 1 and sup|g(j+1) - g(j)| <= 1 hold for every instance.
    """

    lam: Rational
    target_set: frozenset[int]
    g: tuple[float, ...]

    @property
    def j_max(self) -> int:
        return len(self.g) - 1

    def sup_g(self) -> float:
        return max(abs(v) for v in self.g)

    def sup_delta_g(self) -> float:
        return max(
            abs(b - a) for a, b in zip(self.g, self.g[1:])
        )

    def max_residual(self) -> float:
        """Worst |lambda*g(j+1) - j*g(j) - rhs(j)| in double arithmetic."""
        lam = float(self.lam)
        p_a = sum(poisson_pmf(lam, a) for a in sorted(self.target_set))
        worst = 0.0
        for j in range(self.j_max):
            rhs = (1.0 if j in self.target_set else 0.0) - p_a
            worst = max(worst, abs(lam * self.g[j + 1] - j * self.g[j] - rhs))
        return worst


def solve_stein(lam: Rational, A: Iterable[int], j_max: int) -> SteinSolution:
    """Forward-recurrence solution of the Stein equation on 0..j_max.

    Working precision is 30 digits plus the decimal size of
    j_max!/lambda^j_max, which is exactly the factor by which the
    recurrence amplifies rounding noise.
    """
    target = frozenset(A)
    if any(a < 0 for a in target):
        raise UserInputError("target set must contain nonnegative integers")
    if j_max < 1:
        raise UserInputError("j_max must be >= 1")
    if any(a > j_max for a in target):
        raise UserInputError("target set reaches beyond j_max")
    lam_f = float(lam)
    if lam_f <= 0:
        raise UserInputError("lambda must be positive")
    amplification = lgamma(j_max + 1) - j_max * log(lam_f)
    dps = 30 + max(0, ceil(amplification / log(10.0)))
    with mp.workdps(dps):
        lam_mp = _mpf_of(lam)
        p_a = mp.mpf(0)
        for a in sorted(target):
            p_a += mp.e ** (-lam_mp) * lam_mp**a / mp.factorial(a)
        g = [mp.mpf(0)]
        for j in range(j_max):
            ind = 1 if j in target else 0
            g.append((ind - p_a + j * g[j]) / lam_mp)
        sol = SteinSolution(lam, target, tuple(float(v) for v in g))
    if sol.max_residual() >= 1e-12:
        raise CertificationError(
            f"Stein residual {sol.max_residual():.3e} at lambda={lam_f}, "
            f"j_max={j_max}"
        )
    if sol.sup_g() > 1.0 or sol.sup_delta_g() > 1.0:
        raise CertificationError(
            f"Stein solution bound violated: sup|g|={sol.sup_g():.6f}, "
            f"sup|dg|={sol.sup_delta_g():.6f}"
        )
    return sol


def tv_sandwich(pmf: ExactPmf, lam: Rational) -> tuple[float, float]:
    """Lower and upper enclosure of TV(pmf, Poisson(lambda)).

    TV is half the L1 distance. The pmf side is exact; the Poisson side
    is iterated at 40-digit precision and its tail beyond the pmf
    support is summed upward until negligible, with the geometric
    remainder pushed into the upper end of the sandwich.
    """
    lam_f = float(lam)
    if lam_f <= 0:
        raise UserInputError("lambda must be positive")
    with mp.workdps(_TV_DPS):
        lam_mp = _mpf_of(lam)
        top = pmf.support[-1]
        q = mp.e ** (-lam_mp)
        acc = mp.mpf(0)
        for j in range(top + 1):
            p = pmf.prob(j)
            p_mp = mp.mpf(p.numerator) / p.denominator if p else mp.mpf(0)
            acc += abs(p_mp - q)
            q = q * lam_mp / (j + 1)
        # q now holds the Poisson mass at top+1; everything beyond the
        # pmf support contributes its full Poisson mass to the L1 sum.
        j = top + 1
        floor = mp.mpf(10) ** (-(_TV_DPS + 5))
        while q > floor or j <= lam_f:
            acc += q
            j += 1
            q = q * lam_mp / j
        rho = lam_mp / (j + 1)
        remainder = q / (1 - rho)
        slop = mp.mpf(10) ** (-(_TV_DPS - 12))
        lo = acc / 2
        hi = lo + remainder / 2 + slop
        return float(lo), float(hi)


def tv_exact_vs_poisson(pmf: ExactPmf, lam: Rational) -> float:
    """TV distance to Poisson(lambda), certified to sandwich width 1e-13."""
    lo, hi = tv_sandwich(pmf, lam)
    if hi - lo >= _SANDWICH_LIMIT:
        raise CertificationError(
            f"TV sandwich too wide: [{lo!r}, {hi!r}] at lambda={float(lam)}"
        )
    return (lo + hi) / 2


# ---------------------------------------------------------------------------
# Certified bounds


def _one_minus_inv_k_pow(k: int, e: int) -> Fraction:
    return Fraction(k - 1, k) ** e


def bound_C_kd_exact(k: int, n: int) -> Fraction:
    if k < 1 or n < 1:
        raise UserInputError("need k >= 1 and n >= 1")
    return Fraction(k, n) ** 2 + k * (n + 1) * _one_minus_inv_k_pow(k, n)


def bound_C_kc_exact(k: int, n: int) -> Fraction:
    if k < 1 or n < 1:
        raise UserInputError("need k >= 1 and n >= 1")
    return (
        Fraction(k, n) ** 2
        + Fraction(2 * k, n)
        + k * (n + 1) * _one_minus_inv_k_pow(k, n)
    )


def bound_R_exact(k: int, n: int) -> Fraction:
    if k < 1 or n < 1:
        raise UserInputError("need k >= 1 and n >= 1")
    return (
        Fraction(k, n + 1) ** 2
        + Fraction(2 * k, n + 1)
        + k * (n + 2) * _one_minus_inv_k_pow(k, n + 1)
    )


def bound_C_kd(k: int, n: int) -> float:
    """Certified bound for k-d under C(k, n); exact rational, then rounded."""
    return float(bound_C_kd_exact(k, n))


def bound_C_kc(k: int, n: int) -> float:
    """Certified bound for k-c under C(k, n)."""
    return float(bound_C_kc_exact(k, n))


def bound_R(k: int, n: int) -> float:
    """Certified bound for k-1-d under R(k, n)."""
    return float(bound_R_exact(k, n))


# ---------------------------------------------------------------------------
# Reports


@dataclass(frozen=True)
class TvReport:
    """One certified comparison of an exact law against its Poisson limit."""

    k: int
    n: int
    statistic: str
    lam: float
    tv_exact: float
    bound: float
    slack: float

    CSV_HEADER = ("k", "n", "statistic", "lambda", "tv_exact", "bound", "slack")

    def csv_row(self) -> tuple:
        return (
            self.k,
            self.n,
            self.statistic,
            self.lam,
            self.tv_exact,
            self.bound,
            self.slack,
        )


def statistic_pushforward(k: int, n: int, statistic: str) -> tuple[ExactPmf, Fraction]:
    """Exact law of the coded statistic and its Poisson rate."""
    if statistic == "Cd":
        return d_pmf_C(k, n).pushforward(lambda d: k - d), Fraction(k, n)
    if statistic == "Cc":
        return c_pmf_C(k, n).pushforward(lambda c: k - c), Fraction(k, n)
    if statistic == "R":
        return d_pmf_R(k, n).pushforward(lambda d: k - 1 - d), Fraction(k, n + 1)
    raise UserInputError(
        f"unknown statistic {statistic!r}, expected one of {STATISTIC_CODES}"
    )


def _bound_for(k: int, n: int, statistic: str) -> Fraction:
    if statistic == "Cd":
        return bound_C_kd_exact(k, n)
    if statistic == "Cc":
        return bound_C_kc_exact(k, n)
    return bound_R_exact(k, n)


def tv_report(k: int, n: int, statistic: str) -> TvReport:
    """Exact TV against the Poisson limit plus the certified bound.

    Raises CertificationError if the bound fails: the bound holds for
    every k and n, so a violation can only be an implementation fault.
    """
    pmf, lam = statistic_pushforward(k, n, statistic)
    tv = tv_exact_vs_poisson(pmf, lam)
    bound = _bound_for(k, n, statistic)
    slack = float(bound) - tv
    if slack < 0:
        raise CertificationError(
            f"certified bound failed: statistic {statistic} k={k} n={n} "
            f"tv={tv!r} bound={float(bound)!r}"
        )
    return TvReport(
        k=k,
        n=n,
        statistic=statistic,
        lam=float(lam),
        tv_exact=tv,
        bound=float(bound),
        slack=slack,
    )


def sweep_k_values(n: int, points: int = 20) -> list[int]:
    """Up to ``points`` integers evenly spread over 1..floor(n/4)."""
    if n < 4:
        raise UserInputError("sweep needs n >= 4 so that floor(n/4) >= 1")
    k_top = n // 4
    raw = {1 + round(i * (k_top - 1) / max(1, points - 1)) for i in range(points)}
    return sorted(min(v, k_top) for v in raw)


def certification_sweep(
    n_list: Iterable[int] = (20, 50, 100, 200, 400),
    k_points: int = 20,
    statistics: Iterable[str] = STATISTIC_CODES,
) -> list[TvReport]:
    """tv_report over the full certification grid; raises on any failure."""
    reports = []
    for n in n_list:
        for k in sweep_k_values(n, k_points):
            for stat in statistics:
                reports.append(tv_report(k, n, stat))
    return reports
