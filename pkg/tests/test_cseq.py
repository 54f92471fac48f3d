import pytest
from hypothesis import given, settings, strategies as st

from ordlab.cseq import (AvoidSet, PatchedCSequence, build_avoiding, min_above,
                         min_above_gallop, min_above_linear, standard_csequence,
                         verify_csequence)
from ordlab.errors import PreconditionFailed
from ordlab.ordinal import OMEGA, nat, omega_power, parse

from strategies import limits_above_w, limits_below_w3, limits_w3, ordinals_below_w3

STD = standard_csequence()
W = OMEGA


def test_entry_examples():
    assert STD.entry(W, 3) == 3
    assert STD.entry(parse("w+1"), 0) == W
    # entry i of C_{w*2} is w+i
    assert STD.entry(parse("w*2"), 2) == parse("w+2")
    assert STD.entry(parse("w^2"), 3) == parse("w*3")
    assert STD.entry(parse("w^w"), 2) == parse("w^2")


def test_min_above_examples():
    assert min_above(STD, W, nat(5)) == (nat(5), 5)
    b = parse("w^2+7")
    assert min_above(STD, b.succ(), b) == (b, 0)
    assert min_above(STD, parse("w*2"), W) == (W, 0)


def test_min_above_needs_xi_below_alpha():
    with pytest.raises(PreconditionFailed):
        min_above(STD, W, W)


@settings(max_examples=300)
@given(limits_below_w3, ordinals_below_w3())
def test_closed_form_matches_searches(alpha, xi):
    if not xi < alpha:
        return
    fast = min_above(STD, alpha, xi)
    assert fast == min_above_gallop(STD, alpha, xi)
    if fast.position < 2000:
        assert fast == min_above_linear(STD, alpha, xi)
    # the found entry is the least one reaching xi
    assert fast.value >= xi
    if fast.position:
        assert STD.entry(alpha, fast.position - 1) < xi


def test_empty_avoid_leaves_entries_unchanged():
    av = build_avoiding(AvoidSet())
    for a in ["w", "w*2", "w^2", "w^2*2+w"]:
        alpha = parse(a)
        assert [av.entry(alpha, i) for i in range(12)] == [STD.entry(alpha, i) for i in range(12)]


def test_verify_clean_standard():
    arena = [W, parse("w+1"), parse("w^2")]
    assert verify_csequence(STD, arena, AvoidSet(), 10) == []


def test_avoid_set_rejects_non_limit():
    with pytest.raises(PreconditionFailed):
        verify_csequence(STD, [W], [parse("w+1")], 10)
    with pytest.raises(PreconditionFailed):
        AvoidSet(frozenset([nat(3)]))


def test_corrupted_sequence_flags_strict_increase():
    bad = PatchedCSequence(STD, {(W, 2): nat(1)})
    v = verify_csequence(bad, [W], AvoidSet(), 10)
    assert any(x.kind == "strict increase" and x.alpha == W and x.index == 2 for x in v)


@settings(max_examples=60, deadline=None)
@given(st.lists(limits_above_w, min_size=1, max_size=5),
       st.lists(limits_w3, min_size=1, max_size=6))
def test_avoiding_sequence_is_clean(S, arena):
    avoid = AvoidSet(frozenset(S))
    C = build_avoiding(avoid)
    assert verify_csequence(C, arena + S, avoid, 10) == []
    for alpha in arena:
        assert all(C.entry(alpha, i) not in avoid for i in range(15))


def test_avoiding_bumps_off_member():
    S = AvoidSet(frozenset([parse("w*2")]))
    C = build_avoiding(S)
    alpha = parse("w^2")
    assert STD.entry(alpha, 2) == parse("w*2")
    assert C.entry(alpha, 2) == parse("w*2+1")
    assert C.entry(alpha, 3) == parse("w*3")
    assert min_above(C, alpha, parse("w*2")) == (parse("w*2+1"), 2)
