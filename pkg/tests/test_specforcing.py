import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from ordlab.poset import compatible
from ordlab.errors import InvalidCondition, NoSeparator, OverflowCap, PreconditionFailed
from ordlab.specforcing import (ExtensionOracle, FiniteTree, LinkedCondition, LinkedFragment, SpecCondition,
                                build_linked_poset, linked_incompatible_syntactic, linked_leq,
                                linked_reduct_refuter, pt_compatible, pt_enumerate, pt_leq,
                                pt_union, pt_validate, random_tree, rooted_trees,
                                separating_length, splitting_pairs, tree_from_json,
                                tree_reduct_refuter)
from ordlab.suites import random_linked_instance, random_refuter_instance, union_is_condition

CHAIN2 = FiniteTree((None, 0))
#      0
#     / \
#    1   2
#    |
#    3
FORK = FiniteTree((None, 0, 0, 1))
EMPTY = SpecCondition(())


def cond(T, **kw):
    return pt_validate(T, {int(k[1:]): v for k, v in kw.items()})


def test_tree_basics():
    assert FORK.level == (0, 1, 1, 2)
    assert FORK.lt(0, 3) and FORK.lt(1, 3) and not FORK.comparable(2, 3)
    assert FORK.pred_at(3, 1) == 1
    with pytest.raises(PreconditionFailed):
        FiniteTree((None, None))
    with pytest.raises(PreconditionFailed):
        FiniteTree((None, 2, 1))


def test_tree_json_roundtrip():
    T = FiniteTree((None, 0, 0, 1, 1), frozenset({2}))
    U = tree_from_json(T.to_json())
    assert U.parent == T.parent and U.limit_levels == T.limit_levels
    assert splitting_pairs(T) == [(3, 4)]


def test_rooted_tree_counts():
    # rooted unlabeled trees: 1, 1, 2, 4, 9, 20
    assert len(rooted_trees(6)) == 1 + 1 + 2 + 4 + 9 + 20


def test_random_tree_does_not_split():
    rng = random.Random(3)
    for _ in range(30):
        T = random_tree(rng, max_nodes=40, max_height=8)
        assert T.n <= 40 and T.height <= 8 and T.limit_levels
        assert not splitting_pairs(T)


def test_validate_examples():
    assert pt_validate(CHAIN2, {}) == EMPTY
    with pytest.raises(InvalidCondition) as e:
        pt_validate(CHAIN2, {0: 0, 1: 0})
    assert e.value.pair == (0, 1)
    assert pt_validate(FORK, {1: 0, 2: 0}).dom == (1, 2)


def test_compatible_examples():
    s = cond(FORK, n1=0)
    big = cond(FORK, n1=0, n2=1)
    assert pt_compatible(FORK, s, big) and pt_leq(big, s)
    a, b = cond(CHAIN2, n0=0), cond(CHAIN2, n1=0)
    assert not pt_compatible(CHAIN2, a, b)
    assert not ExtensionOracle(CHAIN2, 2, 3).compatible(a, b)
    assert pt_compatible(FORK, cond(FORK, n2=0), cond(FORK, n3=0))
    assert pt_union(FORK, cond(FORK, n2=0), cond(FORK, n3=0)).dom == (2, 3)


def test_enumerate_examples():
    assert len(pt_enumerate(CHAIN2, 2, 2)) == 7
    assert pt_enumerate(FORK, 3, 0) == [EMPTY]
    assert len(pt_enumerate(FiniteTree((None,)), 1, 3)) == 4
    with pytest.raises(OverflowCap):
        pt_enumerate(FiniteTree((None,) + (0,) * 9), 5, 4, cap=100)


def test_enumeration_order():
    got = pt_enumerate(FORK, 2, 2)
    keys = [(len(s.dom), s.dom, tuple(c for _, c in s.items)) for s in got]
    assert keys == sorted(keys)


@pytest.mark.parametrize("bound", [2, 3, 4])
def test_union_criterion_vs_extensions(bound):
    # small trees only; the acceptance suite covers all shapes up to 6 nodes at bound 3
    for T in rooted_trees(4):
        oracle = ExtensionOracle(T, min(T.n, 6), bound)
        frag = [s for s in oracle.fragment if len(s.dom) <= 2]
        for s0, s1 in itertools.product(frag, repeat=2):
            assert pt_compatible(T, s0, s1) == oracle.compatible(s0, s1)
            assert pt_compatible(T, s0, s1) == union_is_condition(T, s0.as_dict(), s1.as_dict())


def test_tree_refuter_examples():
    T = FiniteTree((None, 0, 1, 2))  # chain of four
    r = tree_reduct_refuter(T, EMPTY, 3, 1)
    assert r == cond(T, n1=0)
    assert not pt_compatible(T, r, cond(T, n3=0))
    q = cond(T, n0=0)
    with pytest.raises(PreconditionFailed):
        tree_reduct_refuter(T, q, 3, 1)
    with pytest.raises(PreconditionFailed):
        tree_reduct_refuter(T, cond(T, n2=1), 3, 1)  # dom(q) not below beta
    with pytest.raises(PreconditionFailed):
        tree_reduct_refuter(T, EMPTY, 1, 1)  # t at level beta


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_tree_refuter_properties(seed):
    T, q, t, beta = random_refuter_instance(random.Random(seed))
    r = tree_reduct_refuter(T, q, t, beta)
    assert pt_leq(r, q)
    with pytest.raises(InvalidCondition):
        pt_validate(T, r.as_dict() | {t: 0})


def test_linked_order_examples():
    p = LinkedCondition(("1",), frozenset())
    q = LinkedCondition((), frozenset({"111"}))
    assert linked_leq(p, p) and linked_leq(q, q)
    assert not linked_leq(LinkedCondition(("1",), frozenset({"111"})), q)
    assert linked_leq(LinkedCondition(("0",), frozenset({"111"})), q)


def test_linked_same_stem_compatible():
    # a_cap = |X| so that unions of second components stay in the fragment
    frag, P = build_linked_poset(2, ["00", "01", "11"], n_cap=1, a_cap=3)
    elems = P.labels
    for i, j in itertools.combinations(range(P.n), 2):
        if elems[i].s == elems[j].s:
            assert compatible(P, i, j)
            z = LinkedCondition(elems[i].s, elems[i].a | elems[j].a)
            assert frag.contains(z)
            k = P.index(z)
            assert P.leq(k, i) and P.leq(k, j)


def test_linked_refuter_examples():
    frag, _ = build_linked_poset(3, ["000", "111"], n_cap=1, a_cap=1)
    q = LinkedCondition((), frozenset({"000"}))
    r = linked_reduct_refuter(frag, q, "111")
    assert r.s == ("1",) and linked_leq(r, q)
    p = LinkedCondition((), frozenset({"111"}))
    assert linked_incompatible_syntactic(r, "111")
    assert frag.common_extension(r, p) is None
    with pytest.raises(NoSeparator):
        linked_reduct_refuter(frag, LinkedCondition((), frozenset()), "111")
    with pytest.raises(PreconditionFailed):
        linked_reduct_refuter(frag, LinkedCondition((), frozenset({"111"})), "111")


def test_separating_length():
    assert separating_length("111", ["000"]) == 1
    assert separating_length("110", ["111", "100"]) == 3
    assert separating_length("110", []) == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_linked_refuter_properties(seed):
    frag, q, x, r = random_linked_instance(random.Random(seed))
    assert r == linked_reduct_refuter(frag, q, x)
    p = LinkedCondition((), frozenset({x}))
    small = LinkedFragment(frag.lam, frag.X, len(r.s) + 1, len(r.a) + 1)
    assert linked_leq(r, q)
    assert linked_incompatible_syntactic(r, x)
    assert small.common_extension(r, p) is None


def test_syntactic_clash_matches_brute_force():
    frag = LinkedFragment(2, ("00", "01", "10"), 1, 2)
    small = LinkedFragment(2, frag.X, 2, 3)
    for z in frag.elements():
        for x in frag.X:
            p = LinkedCondition((), frozenset({x}))
            assert linked_incompatible_syntactic(z, x) == (small.common_extension(z, p) is None)
