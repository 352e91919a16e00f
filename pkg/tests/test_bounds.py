import math

import pytest

from mvbound.bounds import bound_eval, rate_check
from mvbound.errors import DomainError
from mvbound.family import unit_family
from mvbound.fourier import FBudget
from mvbound.reduction import DISTINCT_PRIME, drive


def test_bound_examples():
    r = bound_eval(2, 2)
    assert r.log10_bound == pytest.approx(2 + 9.47 * math.log10(2), rel=1e-12)
    assert r.log10_bound == pytest.approx(4.8507, abs=1e-4)
    assert r.bound == pytest.approx(7.09e4, rel=1e-3)
    assert bound_eval(10, 2).log10_bound == pytest.approx(11.47, rel=1e-12)


def test_squarefree_bound_and_audited_form():
    T = drive(unit_family(6, 600), FBudget.loglaw(), variant=DISTINCT_PRIME)
    r = bound_eval(6, 600, DISTINCT_PRIME, trace=T)
    assert r.exponent == 304
    extra = sum(math.log10(3 * math.log(rd.s) ** 2) for rd in T.rounds)
    assert r.log10_audited == pytest.approx(r.log10_bound + extra)
    assert bound_eval(6, 600, DISTINCT_PRIME).log10_audited is None


def test_bound_admits():
    r = bound_eval(3, 2)
    assert r.admits(4) and r.admits(1)
    assert not r.admits(10**9)


def test_bound_domain():
    with pytest.raises(DomainError):
        bound_eval(1, 2)
    with pytest.raises(DomainError):
        bound_eval(4, 2, "other")


def test_rate_edge_cases():
    r = rate_check(9, 3, 2)
    assert r.ratio == pytest.approx(1.0) and not r.exceeds
    one = rate_check(1, 5, 3)
    assert one.exceeds and one.ratio == math.inf
    with pytest.raises(DomainError):
        rate_check(0, 2, 2)


def test_rate_oracle_triple():
    r = rate_check(4, 3, 2)  # MV(3,2) = 4
    assert r.log_N == pytest.approx(math.log(9), rel=1e-12)
    assert r.exceeds == (9 > 4 ** (19 / 18))


@pytest.mark.parametrize("n", [1, 5, 18, 19, 40, 1000])
def test_rate_branch(n):
    r = rate_check(2, 7, n)
    assert r.branch == ("n>=19" if n >= 19 else "n<=18")
    assert r.bound_implies == (n >= 19)
    # consistency: with K at the general bound (ignoring the constant 100) the rate claim holds iff n >= 19
    assert ((n / 2 + 8.47) * 19 / 18 < n) == r.bound_implies
