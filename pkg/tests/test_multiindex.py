import itertools
import math

import pytest
from hypothesis import given, strategies as st

from holorep import multiindex as mi


@pytest.mark.parametrize("m, k, l", [
    ((2, 4), (1, 2), 2),
    ((3, 5), (3, 5), 1),
    ((0, 6), (0, 1), 6),
    ((7,), (1,), 7),
    ((0, 0, 9), (0, 0, 1), 9),
])
def test_primitive_factor_examples(m, k, l):
    assert mi.primitive_factor(m) == (k, l)


def test_primitive_factor_rejects_zero():
    with pytest.raises(ValueError, match="no primitive factorization of 0"):
        mi.primitive_factor((0, 0))


@given(st.lists(st.integers(0, 12), min_size=1, max_size=4).filter(any))
def test_primitive_factor_reconstructs(m):
    k, l = mi.primitive_factor(m)
    assert tuple(l * e for e in k) == tuple(m)
    assert math.gcd(*k) == 1


def test_as_index_validation():
    with pytest.raises(ValueError):
        mi.as_index((1, -1))
    with pytest.raises(ValueError):
        mi.as_index(())


def test_enumerate_primitives_examples():
    assert mi.enumerate_primitives(2, 2) == ((0, 1), (1, 0), (1, 1))
    assert mi.enumerate_primitives(2, 3) == ((0, 1), (1, 0), (1, 1), (1, 2), (2, 1))
    assert mi.enumerate_primitives(1, 5) == ((1,),)


def test_enumerate_primitives_matches_brute_force():
    for n in (1, 2, 3):
        for N in (1, 4, 7):
            brute = [m for m in itertools.product(range(N + 1), repeat=n)
                     if 0 < sum(m) <= N and math.gcd(*m) == 1]
            assert sorted(brute, key=mi.grlex_key) == list(mi.enumerate_primitives(n, N))


def test_grading_bijection():
    # every 1 <= |m| <= N maps to exactly one (k, l) with k enumerated
    n, N = 3, 7
    prim = set(mi.enumerate_primitives(n, N))
    for m in mi.indices_up_to(n, N)[1:]:
        k, l = mi.primitive_factor(m)
        assert k in prim and sum(k) * l == sum(m)


@pytest.mark.parametrize("n, m, want", [(2, 3, 4), (3, 0, 1), (3, 4, 15)])
def test_count_degree_examples(n, m, want):
    assert mi.count_degree(n, m) == want


def test_count_degree_sums_to_enumeration():
    for n in (1, 2, 3, 4):
        for D in range(7):
            assert sum(mi.count_degree(n, m) for m in range(D + 1)) == len(mi.indices_up_to(n, D))


def test_graded_lex_order():
    assert mi.indices_up_to(2, 2) == ((0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0))


def test_is_multiple_of():
    assert mi.is_multiple_of((2, 4), (1, 2))
    assert not mi.is_multiple_of((2, 3), (1, 2))
    assert not mi.is_multiple_of((0, 0), (1, 2))
    assert mi.is_multiple_of((0, 5), (0, 1))
