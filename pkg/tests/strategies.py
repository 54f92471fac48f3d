"""Hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

from ordlab.ordinal import ZERO, Ordinal, nat


@st.composite
def ordinals(draw, depth: int = 2, max_terms: int = 3, max_coeff: int = 6):
    """CNF ordinals below w^(w^w)-ish, built bottom up so they are valid by construction."""
    if depth == 0:
        return nat(draw(st.integers(0, max_coeff)))
    exps = draw(st.lists(ordinals(depth - 1, 2, 3), max_size=max_terms, unique=True))
    exps.sort(reverse=True)
    return Ordinal((e, draw(st.integers(1, max_coeff))) for e in exps)


@st.composite
def ordinals_below_w3(draw):
    k = draw(st.integers(0, 3))
    exps = sorted(draw(st.lists(st.integers(0, 2), min_size=k, max_size=k, unique=True)), reverse=True)
    return Ordinal((nat(e), draw(st.integers(1, 6))) for e in exps)


limits_below_w3 = ordinals_below_w3().filter(lambda a: a.is_limit)
small_ordinals = ordinals()
nonzero = small_ordinals.filter(lambda a: a != ZERO)


# every limit w^2*a + w*b below w^3 with coefficients <= 6
_LIMITS = sorted(Ordinal([(nat(e), c) for e, c in ((2, a), (1, b)) if c])
                 for a in range(7) for b in range(7) if a or b)
limits_w3 = st.sampled_from(_LIMITS)
limits_above_w = st.sampled_from([a for a in _LIMITS if a > Ordinal([(nat(1), 1)])])
