from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import MODELS
from upsynth.automaton import Atom, Automaton, Edge, compile_model, instantiate, project
from upsynth.concrete import replay, ta_reachable
from upsynth.frontend.dsl import load_model
from upsynth.gen import random_model
from upsynth.region_automaton import concretize_witness, ef_search
from upsynth.regions import enumerate_regions
from upsynth.synthesis import (
    EngineDisagreement, basis_for, check_witness, decide, ef_emptiness, ef_synth,
)


def window():
    # reachable iff p2 <= p1
    return Automaton(("p1", "p2"), (0, 0), (2, 2), ("x",), ("a", "b"), "a",
                     (Edge("a", "b", (Atom("x", ">=", "p2"), Atom("x", "<=", "p1")), None,
                           (("x", 0),)),), {})


def test_window_closed_form():
    res = ef_synth(window(), "b", engine="both")
    assert res.reaching and res.safe
    for v in res.verdicts:
        p1, p2 = v.region.representative[:2]
        assert v.reachable == (p2 <= p1)


def test_toy_always_reaches():
    res = ef_synth(load_model(MODELS / "toy1.upta"), "goal", witness=True)
    assert not res.safe
    c = compile_model(load_model(MODELS / "toy1.upta"))
    assert all(check_witness(c, v) for v in res.verdicts)


def test_emptiness():
    a = window()
    empty, v = ef_emptiness(a, "b")
    assert not empty and v.run is not None
    b = Automaton(a.params, a.lo, a.hi, a.clocks, a.locations, a.init,
                  (Edge("a", "b", (Atom("x", ">", "p1"), Atom("x", "<", "p1")), None,
                        (("x", 0),)),), {})
    assert ef_emptiness(b, "b") == (True, None)


def test_unknown_goal():
    with pytest.raises(ValueError):
        ef_synth(window(), "nowhere")


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_symbolic_matches_oracle(seed):
    a = random_model(seed)
    c = compile_model(a)
    for r in enumerate_regions(c.bounds, basis_for(c)):
        ta = instantiate(a, project(c, r.representative))
        for goal in a.locations[1:]:
            ok, run = ef_search(c, r, goal)
            assert ok == ta_reachable(ta, goal, witness=False)[0]
            if ok:
                w = concretize_witness(run, c, r.representative)
                assert w.final_loc == goal
                assert replay(w, ta)[0]


def test_both_engines_raise_on_disagreement():
    c = compile_model(window())
    r = enumerate_regions(c.bounds, basis_for(c))[0]
    assert decide(c, r, "b", "both").engine == "both"
    err = EngineDisagreement(r, True, False)
    assert "disagree" in str(err)
