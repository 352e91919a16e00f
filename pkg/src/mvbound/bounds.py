"""Closed-form upper bounds on MV(m, n) and the MV-code rate comparison."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import DomainError
from .reduction import DISTINCT_PRIME, GENERAL, ReductionTrace

GENERAL_EXPONENT = 8.47
SQUAREFREE_EXPONENT = 4.0
RATE_EXPONENT = 19 / 18


@dataclass
class BoundReport:
    m: int
    n: int
    variant: str
    log10_bound: float  # log10 of the headline bound
    exponent: float  # exponent of m in the headline bound
    log10_audited: Optional[float] = None  # squarefree finite-m form given a trace
    oracle_value: Optional[int] = None

    @property
    def bound(self) -> float:
        return 10.0**self.log10_bound

    def admits(self, value: int) -> bool:
        return value <= 0 or math.log10(value) <= self.log10_bound


def bound_eval(m: int, n: int, variant: str = GENERAL, trace: Optional[ReductionTrace] = None,
               oracle_value: Optional[int] = None) -> BoundReport:
    """log10 of 100 m^(n/2 + 8.47), or of 100 m^(n/2 + 4) for squarefree m.

    For the squarefree variant a trace adds the audited finite-m form
    100 m^(n/2+4) prod_i 3 ln^2 s_i.
    """
    if m < 2 or n < 1:
        raise DomainError("need m >= 2 and n >= 1")
    if variant == GENERAL:
        e = n / 2 + GENERAL_EXPONENT
    elif variant == DISTINCT_PRIME:
        e = n / 2 + SQUAREFREE_EXPONENT
    else:
        raise DomainError(f"unknown variant {variant!r}")
    lm = math.log10(m)
    audited = None
    if variant == DISTINCT_PRIME and trace is not None:
        audited = 2 + e * lm + sum(math.log10(3 * math.log(r.s) ** 2) for r in trace.rounds)
    return BoundReport(m, n, variant, 2 + e * lm, e, audited, oracle_value)


@dataclass
class RateReport:
    K: int
    m: int
    n: int
    log_N: float  # natural log of N = m^n
    log_K: float
    ratio: float  # log N / log K (inf when K = 1)
    exceeds: bool  # N > K^(19/18)
    branch: str
    bound_exponent_ratio: float  # (n/2 + 8.47) / n: K <= m^(ratio n) under the general bound
    bound_implies: bool  # whether the general bound alone forces N > K^(19/18)


def rate_check(t: int, m: int, n: int) -> RateReport:
    """Compare codeword length N = m^n against K^(19/18) for K = t in log space."""
    if t < 1:
        raise DomainError("family size must be >= 1")
    if m < 2 or n < 1:
        raise DomainError("need m >= 2 and n >= 1")
    log_N = n * math.log(m)
    log_K = math.log(t)
    ratio = math.inf if log_K == 0 else log_N / log_K
    exceeds = log_N > RATE_EXPONENT * log_K
    branch = "n>=19" if n >= 19 else "n<=18"
    er = (n / 2 + GENERAL_EXPONENT) / n
    return RateReport(t, m, n, log_N, log_K, ratio, exceeds, branch, er, er < 1 / RATE_EXPONENT)
