"""JSON documents for regions, synthesis results and runs.

Rationals are always written as "num/den" strings.
"""
from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources

from ..automaton import AUX, Compiled, project
from ..concrete import ConcreteRun
from ..regions import ParamRegion, constraint_text, region_constraints


def q(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def region_doc(r: ParamRegion, names, witness=None):
    keep = [i for i, n in enumerate(names) if n != AUX]
    cons = []
    for c in region_constraints(r):
        if any(names[i] == AUX for i, _ in c.coefs):
            continue
        cons.append({"lhs": {f"frac({names[i]})": q(k) for i, k in c.coefs},
                     "rel": c.rel, "rhs": q(c.rhs)})
    doc = {
        "index": r.index,
        "intparts": {names[i]: r.intparts[i] for i in keep},
        "constraints": cons,
        "text": [t for t in constraint_text(r) if AUX not in t],
        "representative": {names[i]: q(r.representative[i]) for i in keep},
    }
    if witness is not None:
        doc["witness"] = witness
    return doc


def regions_doc(regions, names, basis):
    return {
        "params": [n for n in names if n != AUX],
        "basis": basis,
        "count": len(regions),
        "regions": [region_doc(r, names) for r in regions],
    }


def run_doc(run: ConcreteRun, clocks, model=None):
    steps = [{"location": run.init_loc,
              "valuation": {c: q(x) for c, x in zip(clocks, run.init_val)}}]
    for s in run.steps:
        d = {"delay": q(s.delay), "edge": s.edge, "location": s.loc,
             "valuation": {c: q(x) for c, x in zip(clocks, s.valuation)}}
        if model is not None and model.edges[s.edge].action:
            d["action"] = model.edges[s.edge].action
        steps.append(d)
    return steps


def synth_doc(res, c: Compiled, witnesses=False):
    names = c.params
    reach = []
    for v in res.reaching:
        w = run_doc(v.run, c.model.clocks, c.model) if witnesses and v.run is not None else None
        reach.append(region_doc(v.region, names, w))
    return {
        "goal": res.goal,
        "engine": res.engine,
        "basis": res.basis,
        "params": list(res.params),
        "verdict": "Empty" if res.empty else "NonEmpty",
        "regions_total": len(res.verdicts),
        "reaching_count": len(reach),
        "reaching": reach,
    }


def load_schema(name):
    return json.loads(resources.files("upsynth").joinpath("schemas", name).read_text())


def dumps(doc):
    return json.dumps(doc, indent=2)
