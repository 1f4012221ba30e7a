from fractions import Fraction

from hypothesis import given, settings, strategies as st

from upsynth.plt import LE, LT, Bound, Frac, NegFrac, all_terms, eval_term
from upsynth.regions import (
    ParamBounds, constraint_text, enumerate_regions, find_region, get_basis, is_valid,
    region_implies, sample_member, signature_of,
)

B2 = ParamBounds((0, 0), (2, 2))
REGS2 = enumerate_regions(B2, "engine")


def test_single_parameter_counts():
    assert len(enumerate_regions(ParamBounds((0,), (1,)), "engine")) == 5
    assert len(enumerate_regions(ParamBounds((0,), (2,)), "engine")) == 9
    # every comparison over the full term set also cuts at thirds
    assert len(enumerate_regions(ParamBounds((0,), (1,)), "full")) == 9
    assert len(enumerate_regions(ParamBounds((0,), (2,)), "full")) == 17


def test_representatives_round_trip():
    for r in REGS2:
        assert signature_of(r.representative, r.bounds, r.basis) == r.signature
    assert len({r.signature for r in REGS2}) == len(REGS2)


@settings(max_examples=200, deadline=None)
@given(st.tuples(st.fractions(0, 2, max_denominator=40), st.fractions(0, 2, max_denominator=40)))
def test_partition(v):
    r = find_region(REGS2, v)
    assert r is not None
    # every comparison the engine asks is uniform inside the region
    terms = all_terms(2)
    for a in terms:
        for b in terms:
            for fa in (LE, LT):
                x, y = Bound(a, fa), Bound(b, LE)
                got = is_valid(x, LE, y, r)
                assert got == (eval_term(a, v) <= eval_term(b, v))
            assert is_valid(Bound(a, LE), LT, Bound(b, LE), r) == (eval_term(a, v) < eval_term(b, v))


def test_members_share_signature():
    for r in REGS2[::7]:
        for s in range(3):
            v = sample_member(r, s)
            assert signature_of(v, r.bounds, r.basis) == r.signature


def test_readable_constraints():
    r = find_region(REGS2, (Fraction(29, 20), Fraction(13, 10)))
    text = constraint_text(r)
    assert any("frac(p1)" in t and "frac(p2)" in t for t in text)
    assert r.intparts == (1, 1)
    z = find_region(REGS2, (Fraction(0), Fraction(1, 4)))
    assert "frac(p1) == 0" in constraint_text(z)
    assert "0 < frac(p2) < 1/2" in constraint_text(z)


def test_implication():
    r = find_region(REGS2, (Fraction(29, 20), Fraction(13, 10)))
    assert region_implies(r, {0: 1, 1: -1}, ">", 0)
    assert region_implies(r, {0: 1}, ">=", 1)
    assert not region_implies(r, {0: 1, 1: -1}, "<=", 0)
    eq = find_region(REGS2, (Fraction(1, 2), Fraction(1, 2)))
    assert region_implies(eq, {0: 1, 1: -1}, "==", 0)
    assert region_implies(eq, {0: 2}, "==", 1)


def test_bases_cached():
    assert get_basis(2, "engine") is get_basis(2, "engine")
    assert is_valid(Bound(NegFrac(0), LE), LE, Bound(Frac(0), LE), REGS2[0])
