import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from ordlab.errors import CycleError, OverflowCap
from ordlab.poset import (all_posets, build_poset, common_extension, compatible, find_reduct,
                          is_antichain, is_maximal_in, is_regular_suborder, is_suborder,
                          maximal_antichains, poset_from_json, poset_to_json, random_poset,
                          regular_closure, support_product)

V = build_poset(3, [(0, 1), (0, 2)])  # r=0 below p=1 and q=2
PAIR = build_poset(2)                 # two incompatible elements


def _subsets(n):
    for k in range(n + 1):
        yield from itertools.combinations(range(n), k)


def _brute_compatible(P, p, q):
    return any(P.leq(r, p) and P.leq(r, q) for r in range(P.n))


def _brute_reduct(Q, A, q, p):
    return all(_brute_compatible(Q, x, q) for x in A if Q.leq(x, p))


@st.composite
def posets(draw, max_n=8):
    n = draw(st.integers(1, max_n))
    return random_poset(n, random.Random(draw(st.integers(0, 2**32))))


def test_build_examples():
    c = build_poset(2, [(0, 1)])
    assert c.lt(0, 1) and not c.leq(1, 0)
    c3 = build_poset(3, [(0, 1), (1, 2)])
    assert c3.lt(0, 2)
    with pytest.raises(CycleError):
        build_poset(2, [(0, 1), (1, 0)])


def test_compatible_examples():
    assert compatible(V, 1, 1) and common_extension(V, 1, 1) == 1
    assert not compatible(PAIR, 0, 1)
    assert compatible(V, 1, 2) and common_extension(V, 1, 2) == 0


def test_antichain_examples():
    assert maximal_antichains(build_poset(2, [(0, 1)])) == [(0,), (1,)]
    assert maximal_antichains(PAIR) == [(0, 1)]
    assert maximal_antichains(build_poset(1)) == [(0,)]
    with pytest.raises(OverflowCap):
        maximal_antichains(build_poset(16))


def test_suborder_examples():
    assert is_suborder(V, range(3))
    assert not is_suborder(V, [1, 2])
    assert all(is_suborder(V, [x]) for x in range(3))


def test_regular_examples():
    assert is_regular_suborder(V, range(3))
    assert is_regular_suborder(V, [1])
    assert not is_regular_suborder(PAIR, [0])


def test_reduct_examples():
    for q in range(3):
        assert _brute_reduct(V, range(3), q, q)
    assert find_reduct(PAIR, [0], 1) is None
    assert find_reduct(PAIR, [0], 0) == 0


def test_counts():
    assert [len(all_posets(n)) for n in range(5)] == [1, 1, 3, 19, 219]


def test_equivalence_small_exhaustive():
    for n in range(4):
        for Q in all_posets(n):
            for A in _subsets(n):
                lhs = is_regular_suborder(Q, A)
                rhs = is_suborder(Q, A) and all(find_reduct(Q, A, q) is not None for q in range(n))
                assert lhs == rhs


@settings(max_examples=150, deadline=None)
@given(posets(), st.data())
def test_reduct_matches_brute_force(Q, data):
    A = data.draw(st.sets(st.integers(0, Q.n - 1)))
    q = data.draw(st.integers(0, Q.n - 1))
    got = find_reduct(Q, A, q)
    good = [p for p in sorted(A) if _brute_reduct(Q, A, q, p)]
    assert got == (good[0] if good else None)


@settings(max_examples=150, deadline=None)
@given(posets(max_n=9))
def test_maximal_antichains_are_maximal(P):
    found = maximal_antichains(P)
    assert found == sorted(found)
    for X in found:
        assert is_antichain(P, X) and is_maximal_in(P, X)
        for y in range(P.n):
            if y not in X:
                assert not is_antichain(P, sorted(X + (y,)))
    # every antichain extends to one of them
    for k in range(min(P.n, 4) + 1):
        for Y in itertools.combinations(range(P.n), k):
            if is_antichain(P, Y):
                assert any(set(Y) <= set(X) for X in found)


def test_closure_examples():
    chain = build_poset(3, [(0, 1), (1, 2)])
    assert regular_closure(chain, range(3)) == (0, 1, 2)
    out = regular_closure(chain, [])
    assert out and is_regular_suborder(chain, out)
    assert regular_closure(PAIR, [0]) == (0, 1)


@settings(max_examples=150, deadline=None)
@given(posets(max_n=10), st.data())
def test_closure_properties(Q, data):
    seed = data.draw(st.sets(st.integers(0, Q.n - 1)))
    out = regular_closure(Q, seed)
    assert set(seed) <= set(out) and is_regular_suborder(Q, out)


def test_product_examples():
    c2 = build_poset(2, [(0, 1)], top=1)
    P0 = support_product([c2, c2, c2], 0)
    assert P0.n == 1 and P0.top == 0
    P2 = support_product([c2, c2], 2)
    assert P2.n == 4
    assert P2.leq(P2.element((0, 0)), P2.element((1, 0)))


def test_product_adds_top_when_missing():
    P = support_product([PAIR], 1)
    assert P.n == 3 and P.coords(P.top) == (2,)


@settings(max_examples=60, deadline=None)
@given(st.lists(posets(max_n=3), min_size=1, max_size=3), st.integers(0, 3))
def test_product_support_bound_and_compat(factors, nu):
    P = support_product(factors, nu)
    assert all(len(P.support(i)) <= nu for i in range(P.n))
    for i in range(P.n):
        for j in range(P.n):
            ci, cj = P.coords(i), P.coords(j)
            coordwise = all(_brute_compatible(F, x, y) for F, x, y in zip(P.factors, ci, cj))
            if nu >= len(P.support(i) | P.support(j)):
                assert compatible(P, i, j) == coordwise
            elif compatible(P, i, j):
                assert coordwise


def test_json_roundtrip():
    P = build_poset(4, [(0, 1), (1, 3), (2, 3)], top=3)
    Q = poset_from_json(poset_to_json(P))
    assert (Q.n, Q.down, Q.up, Q.top) == (P.n, P.down, P.up, P.top)
