from dataclasses import replace
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from upsynth.automaton import compile_model, instantiate, project
from upsynth.concrete import region_reachable, replay, simulate, ta_reachable
from upsynth.gen import random_model
from upsynth.regions import enumerate_regions
from upsynth.synthesis import basis_for


def instances(seed, stopwatches=False):
    a = random_model(seed, stopwatches=stopwatches)
    c = compile_model(a)
    for r in enumerate_regions(c.bounds, basis_for(c))[::3]:
        yield a, instantiate(a, project(c, r.representative))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 5))
def test_zone_graph_matches_region_graph(seed):
    for a, ta in instances(seed):
        for goal in a.locations[1:]:
            ok, run = ta_reachable(ta, goal)
            assert ok == region_reachable(ta, goal)
            if ok:
                assert run.final_loc == goal
                assert replay(run, ta)[0]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 5), st.integers(0, 100))
def test_simulated_runs_replay(seed, s):
    for a, ta in instances(seed, stopwatches=True):
        run = simulate(ta, 6, s)
        assert replay(run, ta)[0]
        free = simulate(ta, 6, s, stops=False)
        assert replay(free, ta, stops=False)[0]


def test_replay_rejects_tampering():
    a = random_model(3)
    c = compile_model(a)
    checked = 0
    for r in enumerate_regions(c.bounds, basis_for(c)):
        ta = instantiate(a, project(c, r.representative))
        for goal in a.locations[1:]:
            ok, run = ta_reachable(ta, goal)
            if not (ok and run.steps):
                continue
            s = run.steps[-1]
            moved = tuple(x + Fraction(1, 7) for x in s.valuation)
            bad = replace(run, steps=run.steps[:-1] + (replace(s, valuation=moved),))
            assert replay(bad, ta) == (False, len(run.steps) - 1)
            bad = replace(run, steps=run.steps[:-1] + (replace(s, edge=99),))
            assert not replay(bad, ta)[0]
            checked += 1
    assert checked
