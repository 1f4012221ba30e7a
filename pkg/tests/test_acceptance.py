"""Acceptance criteria 1-9; each test prints one PASS/FAIL line.

Run alone with `pytest tests/test_acceptance.py -s` or `python3 tests/test_acceptance.py`.
"""
import random
import time
from dataclasses import replace
from fractions import Fraction

from oracles import GOLDEN, MODELS, completion, delay_into, parse_dump, report
from upsynth.automaton import (
    PARAM_GUARD_TOTAL, compile_model, instantiate, project, validate,
)
from upsynth.concrete import replay, ta_reachable
from upsynth.frontend.dsl import load_model
from upsynth.gen import random_model
from upsynth.pdbm import (
    Malformed, PKind, classify, clock_region, initial, membership, sample_member, te, te_eq,
    te_lt, update_np, update_param,
)
from upsynth.region_automaton import concretize_witness, ef_search
from upsynth.regions import (
    ParamBounds, enumerate_regions, find_region, region_implies, sample_member as region_member,
    signature_of,
)
from upsynth.synthesis import basis_for, ef_synth

N_MODELS = 200
N_SEQUENCES = 10 ** 5
N_SAMPLES = 10 ** 3


def test_criterion_1_case_study():
    t0 = time.time()
    a = load_model(MODELS / "blockchain_reduced.upta")
    c = compile_model(a)
    P = {n: i for i, n in enumerate(c.params)}
    res = ef_synth(c, "reward_y")
    reaching = {v.region.index for v in res.reaching}
    p1_ge_p2 = [v.region for v in res.verdicts
                if region_implies(v.region, {P["p1"]: 1, P["p2"]: -1}, ">=", 0)]
    pv1_gt_v = [v.region for v in res.verdicts
                if region_implies(v.region, {P["pv1"]: 1, P["v"]: -1}, ">", 0)]
    a_ok = p1_ge_p2 and not any(r.index in reaching for r in p1_ge_p2)
    b_ok = pv1_gt_v and not any(r.index in reaching for r in pv1_gt_v)
    c_ok = bool(reaching)
    ok = bool(a_ok and b_ok and c_ok)
    report(1, ok, f"variant=reduced (p=30, p1,p2 in [0,2], pv1,v in [0,1], pv2=0); "
                  f"{len(reaching)}/{len(res.verdicts)} regions reach reward_y; "
                  f"(a) {len(p1_ge_p2)} regions imply p1>=p2, none reach; "
                  f"(b) {len(pv1_gt_v)} imply pv1>v, none reach; {time.time() - t0:.0f}s")
    assert ok


def random_pairs():
    for seed in range(N_MODELS):
        a = random_model(seed)
        assert not validate(a)
        c = compile_model(a)
        for r in enumerate_regions(c.bounds, basis_for(c)):
            yield seed, a, c, r


def test_criterion_2_oracle_equivalence():
    t0 = time.time()
    checks = bad = 0
    for seed, a, c, r in random_pairs():
        ta = instantiate(a, project(c, r.representative))
        for goal in a.locations[1:]:
            sym, _ = ef_search(c, r, goal, witness=False)
            orc, _ = ta_reachable(ta, goal, witness=False)
            checks += 1
            bad += sym != orc
    ok = bad == 0 and checks > 0
    report(2, ok, f"{N_MODELS} models, {checks} region/goal checks, {bad} disagreements, "
                  f"{time.time() - t0:.0f}s")
    assert ok


def test_criterion_3_region_uniformity():
    rng = random.Random(3)
    pairs = [(a, c, r) for _, a, c, r in random_pairs()
             if len({region_member(r, s) for s in range(4)}) >= 3]
    chosen = rng.sample(pairs, 50)
    bad = checks = 0
    for a, c, r in chosen:
        members = []
        s = 0
        while len(members) < 3:
            v = region_member(r, s)
            if v not in members:
                members.append(v)
            s += 1
        for goal in a.locations[1:]:
            verdicts = {ta_reachable(instantiate(a, project(c, v)), goal, witness=False)[0]
                        for v in members}
            checks += 1
            bad += len(verdicts) != 1
    ok = bad == 0
    report(3, ok, f"50 model-region pairs, {checks} goals x 3 member valuations, {bad} disagreements")
    assert ok


def _region_pools():
    pools = []
    for m in (1, 2):
        for hi in (1, 2):
            pools.append(enumerate_regions(ParamBounds((0,) * m, (hi,) * m), "engine"))
    return pools


def test_criterion_4_closure():
    rng = random.Random(4)
    pools = _region_pools()
    malformed = alternation = 0
    for _ in range(N_SEQUENCES):
        r = rng.choice(rng.choice(pools))
        m = r.bounds.m
        h = rng.randint(1, 3)
        cap = max(r.bounds.hi) + rng.randint(0, 1)
        p = initial(h, cap)
        try:
            kind = classify(p, r)
            for _ in range(rng.randint(1, 8)):
                op = rng.random()
                if op < 0.5:
                    p = te(p, r)
                    new = classify(p, r)
                    if new != ("OpenA" if kind == "OpenB" else "OpenB"):
                        alternation += 1
                        break
                elif op < 0.8:
                    u = {x: rng.randint(0, cap) for x in range(1, h + 1) if rng.random() < 0.5}
                    p = update_np(p, u or {1: 0}, r)
                    new = classify(p, r)
                else:
                    p = update_param(p, {x: rng.randrange(m) for x in range(1, h + 1)}, r)
                    new = classify(p, r)
                kind = new
        except Malformed:
            malformed += 1
    ok = malformed == 0 and alternation == 0
    report(4, ok, f"{N_SEQUENCES} sequences, {malformed} malformed, {alternation} kind alternation failures")
    assert ok


def _walk(rng, pools):
    """A random reachable matrix (no clamping) and its region."""
    r = rng.choice(rng.choice(pools))
    h = rng.randint(1, 3)
    p = initial(h)
    for _ in range(rng.randint(0, 6)):
        c = rng.random()
        if c < 0.5:
            p = te(p, r)
        elif c < 0.8:
            p = update_np(p, {x: rng.randint(0, 2) for x in range(1, h + 1) if rng.random() < 0.5}, r)
        else:
            p = update_param(p, {x: rng.randrange(r.bounds.m) for x in range(1, h + 1)}, r)
    return r, p


def test_criterion_5_operator_semantics():
    rng = random.Random(5)
    pools = _region_pools()
    fails = {"update-forward": 0, "update-backward": 0, "te-forward": 0, "te-backward": 0,
             "point-unique": 0, "clock-region": 0}
    for k in range(N_SAMPLES):
        r, p = _walk(rng, pools)
        v = r.representative
        w = sample_member(p, v, k)
        u = {x: rng.randint(0, 2) for x in range(1, p.h + 1) if rng.random() < 0.6}
        q = update_np(p, u, r)
        wu = tuple(Fraction(u[i + 1]) if i + 1 in u else x for i, x in enumerate(w))
        fails["update-forward"] += not membership(wu, v, q)
        w2 = sample_member(q, v, k + 1)
        back = completion(p, w2, v, {x - 1 for x in u})
        fails["update-backward"] += back is None or \
            tuple(Fraction(u[i + 1]) if i + 1 in u else x for i, x in enumerate(back)) != w2
        t = te(p, r)
        fails["te-forward"] += delay_into(t, w, v) is None
        fails["te-backward"] += delay_into(p, sample_member(t, v, k + 2), v, sign=-1) is None
        E, zero, order = clock_region(p, r)
        fr = [x - (x.numerator // x.denominator) for x in map(Fraction, w)]
        in_region = tuple(int(x) for x in map(Fraction, w)) == E and \
            tuple(f == 0 for f in fr) == zero and \
            all(((fr[i - 1] > fr[j - 1]) - (fr[i - 1] < fr[j - 1])) == s for i, j, s in order)
        fails["clock-region"] += not in_region
        pt = update_param(p, {x: rng.randrange(r.bounds.m) for x in range(1, p.h + 1)}, r)
        wp = sample_member(pt, v, k)
        eps = Fraction(1, rng.randint(2, 10 ** 6))
        i = rng.randrange(pt.h)
        moved = tuple(x + eps if j == i else x for j, x in enumerate(wp))
        fails["point-unique"] += not membership(wp, v, pt) or membership(moved, v, pt)
    ok = not any(fails.values())
    report(5, ok, f"{N_SAMPLES} samples per check; failures {fails}")
    assert ok


GOLDEN_CASES = [
    ("update_np", "point", {1: 1}, "point_reset_x"),
    ("te_lt", "point_reset_x", None, "point_reset_x_elapse"),
    ("te_lt", "point", None, "point_elapse"),
    ("update_np", "point_elapse", {2: 1}, "centre_reset_y"),
    ("te_lt", "centre_reset_y", None, "border_elapse"),
    ("te_eq", "border_elapse", None, "centre_hit_integer"),
]


def test_criterion_6_golden_matrices():
    regs = enumerate_regions(ParamBounds((0, 0), (2, 2)), "engine")
    r = find_region(regs, (Fraction(29, 20), Fraction(13, 10)))
    matched = 0
    for op, src, arg, dst in GOLDEN_CASES:
        p = parse_dump((GOLDEN / f"{src}.txt").read_text(), 2,
                       PKind.POINT if src == "point" else PKind.OPEN)
        if op == "update_np":
            got = update_np(p, arg, r)
        else:
            got = {"te_lt": te_lt, "te_eq": te_eq}[op](p, r)
        matched += got.dump(("x", "y"), ("p1", "p2")) == (GOLDEN / f"{dst}.txt").read_text().strip()
    ok = matched == len(GOLDEN_CASES)
    report(6, ok, f"{matched}/{len(GOLDEN_CASES)} golden matrices match")
    assert ok


def test_criterion_7_region_enumeration():
    details = []
    ok = True
    for hi, want in ((1, 5), (2, 9)):
        b = ParamBounds((0,), (hi,))
        regs = enumerate_regions(b, "engine")
        grid = {}
        for k in range(64 * hi + 1):
            v = (Fraction(k, 64),)
            grid.setdefault(signature_of(v, b, regs[0].basis), []).append(v)
        same = set(grid) == {r.signature for r in regs}
        inside = all(find_region(regs, v).signature == s for s, vs in grid.items() for v in vs)
        ok &= len(regs) == want and len(grid) == want and same and inside
        details.append(f"[0,{hi}]: {len(regs)} regions, grid oracle {len(grid)} groups")
    report(7, ok, "; ".join(details))
    assert ok


def test_criterion_8_validator():
    loop_model = validate(load_model(MODELS / "counting_loop.upta"))
    loop = [v for v in loop_model if v.edge == 1 and v.clause == PARAM_GUARD_TOTAL]
    case_study = validate(load_model(MODELS / "blockchain.upta"))
    ok = bool(loop) and case_study == []
    report(8, ok, f"loop-edge example rejected with {PARAM_GUARD_TOTAL} on edge #1 "
                  f"({len(loop_model)} violations); case-study model: {len(case_study)} violations")
    assert ok


def test_criterion_9_stopwatches():
    witnesses = bad = compared = mismatched = with_stops = 0
    for seed in range(20):
        a = random_model(seed, stopwatches=True)
        assert not validate(a, "sru2p")
        with_stops += a.has_stops()
        c = compile_model(a)
        plain = replace(a, stop={})
        cp = compile_model(plain)
        for r in enumerate_regions(c.bounds, basis_for(c)):
            v = r.representative
            ta = instantiate(a, project(c, v))
            for goal in a.locations[1:]:
                ok, run = ef_search(c, r, goal)
                if ok:
                    witnesses += 1
                    try:
                        w = concretize_witness(run, c, v)
                        bad += not (w.final_loc == goal and replay(w, ta, stops=True)[0])
                    except Exception:
                        bad += 1
        # with every stop set empty the stopwatch model is a plain one
        for r in enumerate_regions(cp.bounds, basis_for(cp)):
            ta = instantiate(plain, project(cp, r.representative))
            for goal in plain.locations[1:]:
                compared += 1
                mismatched += ef_search(cp, r, goal, witness=False)[0] != \
                    ta_reachable(ta, goal, witness=False)[0]
    ok = bad == 0 and mismatched == 0 and witnesses > 0
    report(9, ok, f"20 models ({with_stops} with stopwatches), {witnesses} witnesses, {bad} replay failures; "
                  f"empty-stop verdicts {compared - mismatched}/{compared} equal")
    assert ok


if __name__ == "__main__":
    import sys
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
