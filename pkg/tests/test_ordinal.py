import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from ordlab.errors import OverflowCap, ParseError
from ordlab.ordinal import (OMEGA, ONE, ZERO, Kind, Ordinal, Ordering, add, classify, cmp, decode_seq,
                            encode_seq, enumerate_bounded, format_ordinal, is_cnf, nat,
                            omega_power, parse, random_below, subtract_left)

from strategies import ordinals, small_ordinals

W = OMEGA
W2 = omega_power(2)


def test_cmp_examples():
    assert cmp(W2, parse("w*5+3")) is Ordering.GT
    assert cmp(ZERO, ZERO) is Ordering.EQ
    assert cmp(parse("w*2+1"), parse("w*2+1")) is Ordering.EQ
    assert cmp(3, W) is Ordering.LT


def test_add_examples():
    assert add(ONE, W) == W
    assert add(W, ONE) == parse("w+1")
    assert add(parse("w+3"), parse("w*2")) == parse("w*3")
    assert parse("w^(2)+w") + parse("w^(2)") == parse("w^(2)*2")


def test_classify_examples():
    assert classify(ZERO).kind is Kind.ZERO
    c = classify(parse("w+1"))
    assert c.kind is Kind.SUCCESSOR and c.pred == W
    assert classify(parse("w^(2)*3")).kind is Kind.LIMIT


def test_enumerate_examples():
    assert enumerate_bounded(W, 1, 3) == [nat(i) for i in range(4)]
    assert enumerate_bounded(ONE, 3, 3) == [ZERO]
    assert enumerate_bounded(W2, 2, 1) == [ZERO, ONE, W, parse("w+1")]


def _enumerate_oracle(limit, terms, coeff, pool):
    # every CNF built from the exponent pool, filtered by the definition
    out = set()
    for k in range(terms + 1):
        for exps in itertools.combinations(sorted(pool, reverse=True), k):
            for cs in itertools.product(range(1, coeff + 1), repeat=k):
                a = Ordinal(zip(exps, cs))
                if a < limit:
                    out.add(a)
    return sorted(out)


@pytest.mark.parametrize("limit", ["w", "w^(2)", "w^(2)*2+w", "w^(3)", "w^(w)"])
def test_enumerate_matches_oracle(limit):
    lim = parse(limit)
    pool = [nat(k) for k in range(4)] + [W, parse("w+1")]
    pool = [e for e in pool if e <= lim.leading_exponent]
    got = enumerate_bounded(lim, 2, 2)
    if lim.leading_exponent.is_finite:
        assert got == _enumerate_oracle(lim, 2, 2, pool)
    assert got == sorted(set(got)) and all(x < lim and is_cnf(x) for x in got)


def test_enumerate_cap():
    with pytest.raises(OverflowCap):
        enumerate_bounded(parse("w^(w)"), 3, 3, cap=50)


def test_seqcode_examples():
    assert encode_seq([]) == 0 and decode_seq(0) == ()
    assert decode_seq(encode_seq([5])) == (5,)
    assert decode_seq(encode_seq([3, 0, 7])) == (3, 0, 7)


def test_seqcode_is_onto_initial_segment():
    # a bijection: the first codes decode to distinct sequences that encode back
    seen = set()
    for c in range(2000):
        s = decode_seq(c)
        assert encode_seq(s) == c
        seen.add(s)
    assert len(seen) == 2000


@given(st.lists(st.integers(0, 10_000), max_size=8))
def test_seqcode_roundtrip(seq):
    assert decode_seq(encode_seq(seq)) == tuple(seq)


@given(small_ordinals, small_ordinals, small_ordinals)
def test_cmp_total_order(a, b, c):
    assert cmp(a, b) == -cmp(b, a)
    if a <= b and b <= c:
        assert a <= c
    if cmp(a, b) == 0:
        assert a == b and hash(a) == hash(b)


@given(small_ordinals, small_ordinals, small_ordinals)
def test_add_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + ZERO == a == ZERO + a
    if b < c:
        assert a + b < a + c
    assert b <= a + b and is_cnf(a + b)


@given(small_ordinals, small_ordinals)
def test_subtract_left(a, b):
    lo, hi = sorted((a, b))
    assert lo + subtract_left(lo, hi) == hi


@given(small_ordinals)
def test_format_parse_roundtrip(a):
    assert parse(format_ordinal(a)) == a
    assert is_cnf(a)


@given(small_ordinals)
def test_successor_structure(a):
    s = a.succ()
    assert s.is_successor and s.pred() == a
    assert classify(s).pred == a


def test_parse_variants():
    assert parse(" w ^ ( 2 ) * 3 + w + 4 ") == parse("w^(2)*3+w+4")
    assert parse("w^2") == W2
    assert parse("w^w") == omega_power(W)
    assert parse("3+w") == W  # non-canonical sums are normalised
    assert format_ordinal(parse("w^(w+1)*2+w^(2)+5")) == "w^(w+1)*2+w^(2)+5"
    for bad in ["", "w^", "w*", "x", "w+", "(w)", "w*0x", "w*0"]:
        with pytest.raises(ParseError):
            parse(bad)


def test_int_interop():
    assert W > 10**9 and nat(7) == 7 and int(nat(7)) == 7
    with pytest.raises(ValueError):
        int(W)


def test_random_below_respects_limit():
    rng = random.Random(1)
    for lim in [nat(5), W, W2, parse("w^(2)*3+w"), omega_power(W)]:
        for _ in range(200):
            assert random_below(lim, rng) < lim
