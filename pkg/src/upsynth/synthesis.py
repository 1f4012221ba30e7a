"""EF-emptiness and exact synthesis of the parameter valuations reaching a goal."""
from __future__ import annotations

from dataclasses import dataclass, field

from .automaton import AUX, Automaton, Compiled, compile_model, instantiate, project
from .concrete import ConcreteRun, replay, ta_reachable
from .region_automaton import SharedCache, SymRun, concretize_witness, ef_search
from .regions import Basis, ParamRegion, constraint_text, enumerate_regions, get_basis

ENGINES = ("symbolic", "oracle", "both")


class EngineDisagreement(AssertionError):
    def __init__(self, region, symbolic, oracle):
        super().__init__(f"engines disagree on region {region.index} at {region.representative}: "
                         f"symbolic={symbolic} oracle={oracle}")
        self.region = region
        self.symbolic = symbolic
        self.oracle = oracle


def update_groups(c: Compiled):
    """For each location, the parameter sets clocks may currently hold values of."""
    groups = {l: set() for l in range(len(c.locs))}
    groups[c.init].add(frozenset())
    work = [(c.init, frozenset())]
    while work:
        l, s = work.pop()
        for e in c.out[l]:
            if e.total is not None:
                t = frozenset(q for q in e.total.values() if q != c.aux)
            elif e.is_total:
                t = frozenset()
            else:
                t = s
            if t not in groups[e.dst]:
                groups[e.dst].add(t)
                work.append((e.dst, t))
    return groups


def relevant_cliques(c: Compiled):
    """Parameter sets whose mutual comparisons the symbolic engine can ask about."""
    out = set()
    for l, gs in update_groups(c).items():
        gp = set()
        for e in c.out[l]:
            gp |= {rhs[1] for _, _, rhs in e.guard if rhs[0] == "p"}
        for s in gs:
            out.add(s)
            out.add(s | frozenset(gp))
    out.discard(frozenset())
    res = []
    for s in sorted(out, key=lambda s: (-len(s), sorted(s))):
        if not any(s <= t for t in res):
            res.append(s)
    return sorted(res, key=sorted)


def basis_for(c: Compiled, kind="model") -> Basis:
    m = len(c.params)
    if kind == "model":
        return Basis.engine(m, relevant_cliques(c) or [frozenset()])
    return get_basis(m, kind)


@dataclass
class RegionVerdict:
    region: ParamRegion
    reachable: bool
    engine: str
    witness: SymRun | None = None
    run: ConcreteRun | None = None


@dataclass
class SynthesisResult:
    goal: str
    engine: str
    params: tuple
    verdicts: list = field(default_factory=list)
    basis: str = "model"

    @property
    def reaching(self):
        return [x for x in self.verdicts if x.reachable]

    @property
    def safe(self):
        return [x for x in self.verdicts if not x.reachable]

    @property
    def empty(self):
        return not self.reaching


def _oracle(c: Compiled, r: ParamRegion, goal, witness):
    a = c.model
    if a.has_stops():
        raise ValueError("the oracle engine does not handle stopwatches")
    ta = instantiate(a, project(c, r.representative))
    return ta_reachable(ta, goal, witness)


def decide(c: Compiled, r: ParamRegion, goal: str, engine="symbolic", witness=False,
           shared: SharedCache | None = None) -> RegionVerdict:
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine}")
    sym = orc = None
    sw = crun = None
    if engine in ("symbolic", "both"):
        sym, sw = ef_search(c, r, goal, witness=witness, shared=shared)
        if sym and witness:
            crun = concretize_witness(sw, c, r.representative)
    if engine in ("oracle", "both"):
        orc, orun = _oracle(c, r, goal, witness and engine == "oracle")
        if engine == "oracle":
            crun = orun
    if engine == "both" and sym != orc:
        raise EngineDisagreement(r, sym, orc)
    verdict = sym if sym is not None else orc
    return RegionVerdict(r, verdict, engine, sw, crun)


def ef_synth(a: Automaton | Compiled, goal: str, engine="symbolic", basis="model",
             witness=False, regions=None, progress=None) -> SynthesisResult:
    c = a if isinstance(a, Compiled) else compile_model(a)
    if goal not in c.locs:
        raise ValueError(f"unknown location {goal}")
    if regions is None:
        regions = enumerate_regions(c.bounds, basis_for(c, basis))
    res = SynthesisResult(goal, engine, tuple(c.model.params), basis=basis)
    shared = SharedCache(c)
    for k, r in enumerate(regions):
        res.verdicts.append(decide(c, r, goal, engine, witness, shared))
        if progress:
            progress(k + 1, len(regions))
    return res


def ef_emptiness(a: Automaton | Compiled, goal: str, engine="symbolic", basis="model"):
    """(empty, first reaching RegionVerdict or None)."""
    c = a if isinstance(a, Compiled) else compile_model(a)
    shared = SharedCache(c)
    for r in enumerate_regions(c.bounds, basis_for(c, basis)):
        d = decide(c, r, goal, engine, witness=True, shared=shared)
        if d.reachable:
            return False, d
    return True, None


def region_report(c: Compiled, r: ParamRegion):
    """Human-readable constraints of r restricted to the model parameters."""
    names = c.model.params
    ints = {n: r.intparts[i] for i, n in enumerate(names)}
    cons = [t for t in constraint_text(r) if AUX not in t]
    return ints, cons, project(c, r.representative)


def check_witness(c: Compiled, v: RegionVerdict) -> bool:
    if v.run is None:
        return True
    ta = instantiate(c.model, project(c, v.region.representative))
    return replay(v.run, ta)[0]
