import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mvbound.errors import (
    AccumulatorOverflowError,
    DimensionError,
    DomainError,
    InvalidPartitionError,
    InvalidRadixError,
    NegativeEntryError,
)
from mvbound.modular import (
    Partition,
    all_partitions,
    character_order,
    gram,
    inner_product,
    is_squarefree,
    validate_partition,
    vdiv,
    vmod,
)

nonneg = st.integers(min_value=0, max_value=10**12)
radix = st.integers(min_value=1, max_value=10**6)


def test_vmod_vdiv_examples():
    assert vmod(7, 3) == 1
    assert vdiv(7, 3) == 2
    assert vmod(12345, 1) == 0
    assert vdiv(12345, 1) == 12345
    assert tuple(vmod((4, 5), 2)) == (0, 1)
    assert tuple(vdiv((4, 5), 2)) == (2, 2)


@pytest.mark.parametrize("fn", [vmod, vdiv])
def test_zero_radix_rejected(fn):
    with pytest.raises(InvalidRadixError):
        fn(5, 0)
    with pytest.raises(InvalidRadixError):
        fn((1, 2), -3)


def test_negative_entries_rejected():
    with pytest.raises(NegativeEntryError):
        vmod(-1, 3)
    with pytest.raises(NegativeEntryError):
        vdiv((1, -2), 3)


@given(nonneg, radix)
def test_reconstruction(a, r):
    assert r * vdiv(a, r) + vmod(a, r) == a
    assert 0 <= vmod(a, r) < r


@given(st.lists(nonneg, min_size=1, max_size=8), radix)
def test_reconstruction_componentwise(v, r):
    q, rem = vdiv(v, r), vmod(v, r)
    assert [r * a + b for a, b in zip(q, rem)] == v


def test_inner_product_examples():
    assert inner_product((1, 2), (3, 4)) == 11
    assert inner_product((2, 1), (1, 3)) == 5
    assert inner_product((0, 0, 0), (7, 8, 9)) == 0


def test_inner_product_errors():
    with pytest.raises(DimensionError):
        inner_product((1, 2), (1, 2, 3))
    with pytest.raises(AccumulatorOverflowError):
        inner_product((2**62,), (1,))


vec_pair = st.integers(min_value=1, max_value=6).flatmap(
    lambda n: st.tuples(*(st.lists(st.integers(0, 1000), min_size=n, max_size=n) for _ in range(3)))
)


@given(vec_pair, st.integers(0, 50), st.integers(0, 50))
def test_inner_product_bilinear_symmetric(vs, a, b):
    u, v, w = vs
    assert inner_product(u, v) == inner_product(v, u)
    lin = [a * x + b * y for x, y in zip(u, w)]
    assert inner_product(lin, v) == a * inner_product(u, v) + b * inner_product(w, v)


def test_gram_matches_pairwise():
    rng = np.random.default_rng(3)
    U = rng.integers(0, 9, size=(7, 4))
    V = rng.integers(0, 9, size=(7, 4))
    G = gram(U, V)
    for i in range(7):
        for j in range(7):
            assert G[i, j] == inner_product(U[i], V[j])


def test_gram_wide_entries_exact():
    big = 3 * 10**9
    U = np.array([[big, big]], dtype=object)
    V = np.array([[big, 1]], dtype=object)
    assert int(gram(U, V)[0, 0]) == big * big + big


def test_validate_partition():
    assert validate_partition(1, 1, 7, 7) == Partition(1, 1, 7)
    assert validate_partition(2, 3, 5, 30).m == 30
    with pytest.raises(InvalidPartitionError):
        validate_partition(2, 2, 2, 6)


def test_all_partitions_count():
    # ordered factorisations of 12 into three parts: d(12)-weighted count
    parts = all_partitions(12)
    assert all(p.m == 12 for p in parts)
    assert len(parts) == len(set(parts)) == sum(len([d for d in range(1, 12 // a + 1) if (12 // a) % d == 0]) for a in range(1, 13) if 12 % a == 0)


def test_character_order_examples():
    assert character_order(4, 6) == 3
    assert character_order(1, 17) == 17
    assert character_order(3, 6) == 2


@pytest.mark.parametrize("j,r", [(0, 6), (6, 6), (-1, 6), (1, 1)])
def test_character_order_domain(j, r):
    with pytest.raises(DomainError):
        character_order(j, r)


@given(st.integers(2, 500).flatmap(lambda r: st.tuples(st.integers(1, r - 1), st.just(r))))
def test_character_order_properties(jr):
    j, r = jr
    s = character_order(j, r)
    assert s >= 2 and r % s == 0
    assert (j * s) % r == 0
    assert all((j * k) % r for k in range(1, s))
    assert s == r // math.gcd(j, r)


def test_is_squarefree():
    assert [m for m in range(2, 20) if is_squarefree(m)] == [2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19]
