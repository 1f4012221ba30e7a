from fractions import Fraction

from hypothesis import given, settings, strategies as st

from oracles import MODELS
from upsynth.automaton import (
    AUX, PARAM_GUARD_TOTAL, PARAM_UPDATE_TOTAL, STOP_CHANGE_TOTAL, Atom, Automaton, Edge,
    compile_model, decompose_update, instantiate, largest_constant, project, validate,
)
from upsynth.concrete import ta_reachable
from upsynth.frontend.dsl import load_model


def two_clock(update, guard=(), stop=None):
    return Automaton(("p1", "p2"), (0, 0), (2, 2), ("x", "y"), ("a", "b"), "a",
                     (Edge("a", "b", tuple(guard), "go", tuple(update)),), stop or {})


def test_counting_loop_rejected():
    vs = validate(load_model(MODELS / "counting_loop.upta"))
    loop = [v for v in vs if v.edge == 1]
    assert loop and loop[0].clause == PARAM_GUARD_TOTAL


def test_case_study_accepted():
    assert validate(load_model(MODELS / "blockchain.upta")) == []
    assert validate(load_model(MODELS / "blockchain_reduced.upta")) == []


def test_clauses():
    assert validate(two_clock([("x", 0)], [Atom("x", "<=", "p1")]))[0].clause == PARAM_GUARD_TOTAL
    assert validate(two_clock([("x", "p1")]))[0].clause == PARAM_UPDATE_TOTAL
    assert validate(two_clock([("x", "p1"), ("y", 1)])) == []
    stop = {"b": frozenset({"x"})}
    assert validate(two_clock([], stop=stop), "sru2p")[0].clause == STOP_CHANGE_TOTAL
    assert validate(two_clock([("x", 0), ("y", 0)], stop=stop), "sru2p") == []
    assert validate(two_clock([("x", 0)], [Atom("x", "<=", "p1")]), "u2p") == []


def test_decompose():
    total, rest = decompose_update({"x": "p1", "y": 3}, ("x", "y"))
    assert total == {"x": "p1", "y": AUX}
    assert rest == {"y": 3}
    assert decompose_update({"x": 1}, ("x", "y")) == (None, {"x": 1})


def test_constants_and_compile():
    a = load_model(MODELS / "blockchain_reduced.upta")
    assert largest_constant(a) == 30
    c = compile_model(a)
    assert AUX in c.params
    assert project(c, tuple(range(len(c.params)))) == tuple(range(len(a.params)))


def test_instantiate_reaches():
    a = load_model(MODELS / "toy1.upta")
    ok, run = ta_reachable(instantiate(a, (Fraction(1, 2),)), "goal")
    assert ok and run.steps[-1].loc == "goal"


def test_instantiate_scales():
    a = Automaton(("p1",), (0,), (2,), ("x",), ("a", "b"), "a",
                  (Edge("a", "b", (Atom("x", ">=", "p1"), Atom("x", "<=", 2)), None, ()),), {})
    ta = instantiate(a, (Fraction(3, 2),))
    assert ta.scale == 2
    assert ta.edges[0].guard == ((0, ">=", 3), (0, "<=", 4))
    assert instantiate(a, (Fraction(1),)).scale == 1


@settings(max_examples=200)
@given(st.lists(st.fractions(0, 5, max_denominator=9), min_size=2, max_size=2),
       st.lists(st.one_of(st.none(), st.integers(0, 3), st.sampled_from(["p1", "p2"])),
                min_size=2, max_size=2))
def test_decompose_composes(w, targets):
    clocks = ("x", "y")
    u = {c: t for c, t in zip(clocks, targets) if t is not None}
    if any(isinstance(t, str) for t in u.values()):
        u = {c: (0 if t is None else t) for c, t in zip(clocks, targets)}
    v = {"p1": Fraction(7, 4), "p2": Fraction(1, 3), AUX: Fraction(0)}

    def apply(w, u):
        return tuple(v[u[c]] if isinstance(u.get(c), str) else Fraction(u[c]) if c in u else x
                     for c, x in zip(clocks, w))

    total, rest = decompose_update(u, clocks)
    got = apply(w, total) if total else tuple(w)
    assert apply(got, rest) == apply(w, u)
