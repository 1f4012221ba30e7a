from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from upsynth.plt import (
    LE, LT, ONE, ZERO, Bound, Frac, FracDiff, FracDiffMinusOne, NegFrac, NotInPlt, Shift,
    all_terms, bound_add, eval_term, from_linear, negate, oplus,
)

fracs = st.fractions(min_value=0, max_value=3, max_denominator=50)


def test_term_set_size():
    # two constants, four one-parameter shapes, three difference shapes per ordered pair
    assert len(all_terms(1)) == 6
    assert len(all_terms(2)) == 2 + 8 + 6
    assert len(set(all_terms(3))) == len(all_terms(3))


def test_linear_round_trip():
    for t in all_terms(3):
        assert from_linear(*t.linear()) == t


def test_out_of_set_sums():
    with pytest.raises(NotInPlt):
        bound_add(Bound(Frac(0), LE), Bound(Frac(0), LE))
    with pytest.raises(NotInPlt):
        FracDiffMinusOne(1, 1)
    assert FracDiff(2, 2) == ZERO


def test_flags():
    assert oplus(LE, LE) is LE
    assert oplus(LE, LT) is LT
    assert bound_add(Bound(ZERO, LE), Shift(1, LT)) == Bound(ONE, LT)


@given(st.lists(fracs, min_size=2, max_size=2))
def test_eval_of_negation(v):
    for t in all_terms(2):
        assert eval_term(negate(t), v) == -eval_term(t, v) if _negatable(t) else True


def _negatable(t):
    try:
        negate(t)
        return True
    except NotInPlt:
        return False


@given(st.lists(fracs, min_size=2, max_size=2), st.data())
def test_bound_add_is_exact(v, data):
    terms = all_terms(2)
    a = data.draw(st.sampled_from(terms))
    b = data.draw(st.sampled_from(terms))
    try:
        s = bound_add(Bound(a, LE), Bound(b, LT))
    except NotInPlt:
        return
    assert s.flag is LT
    assert eval_term(s.term, v) == eval_term(a, v) + eval_term(b, v)


@given(fracs)
def test_terms_stay_in_range(x):
    f = x - int(x)
    assert eval_term(Frac(0), [x]) == f
    assert eval_term(NegFrac(0), [x]) == -f
    assert Fraction(-1) <= eval_term(FracDiff(0, 1), [x, Fraction(1, 3)]) < 1
