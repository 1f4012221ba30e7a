"""Automaton model: parametric guards, updates to constants or parameters, stopwatches."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from .regions import ParamBounds

AUX = "_zero"
OPS = ("<", "<=", ">=", ">")


@dataclass(frozen=True)
class Atom:
    clock: str
    op: str
    rhs: int | str  # natural constant or parameter name

    def __post_init__(self):
        if self.op not in OPS:
            raise ValueError(f"relation {self.op!r} not allowed in a guard atom")

    @property
    def parametric(self):
        return isinstance(self.rhs, str)

    def __str__(self):
        return f"{self.clock} {self.op} {self.rhs}"


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    guard: tuple = ()
    action: str | None = None
    update: tuple = ()  # ((clock, nat | param name), ...)

    @property
    def update_map(self):
        return dict(self.update)

    @property
    def parametric_guard(self):
        return any(a.parametric for a in self.guard)

    @property
    def parametric_update(self):
        return any(isinstance(t, str) for _, t in self.update)

    @property
    def parametric(self):
        return self.parametric_guard or self.parametric_update

    def label(self, idx=None):
        name = self.action or "tau"
        return f"{self.src} -{name}-> {self.dst}" if idx is None else f"#{idx} {self.src} -{name}-> {self.dst}"


@dataclass(frozen=True)
class Automaton:
    params: tuple
    lo: tuple
    hi: tuple
    clocks: tuple
    locations: tuple
    init: str
    edges: tuple
    stop: dict = field(default_factory=dict)

    @property
    def bounds(self):
        return ParamBounds(tuple(self.lo), tuple(self.hi), tuple(self.params))

    @property
    def actions(self):
        return sorted({e.action for e in self.edges if e.action})

    def stopped(self, loc):
        return frozenset(self.stop.get(loc, ()))

    def has_stops(self):
        return any(self.stop.get(l) for l in self.locations)


@dataclass(frozen=True)
class Violation:
    edge: int
    clause: str
    message: str

    def __str__(self):
        return f"edge #{self.edge}: [{self.clause}] {self.message}"


# clause identifiers reported by validate
PARAM_GUARD_TOTAL = "param-guard-total-update"
PARAM_UPDATE_TOTAL = "param-update-total-update"
STOP_CHANGE_TOTAL = "stop-change-total-update"


def validate(a: Automaton, flavor="ru2p"):
    """Structural check; returns a list of Violation (empty when accepted)."""
    flavor = flavor.lower()
    if flavor not in ("u2p", "ru2p", "sru2p"):
        raise ValueError(f"unknown flavor {flavor}")
    out = []
    clocks = set(a.clocks)
    params = set(a.params)
    locs = set(a.locations)
    if a.init not in locs:
        out.append(Violation(-1, "declaration", f"initial location {a.init} undeclared"))
    for k, e in enumerate(a.edges):
        if e.src not in locs or e.dst not in locs:
            out.append(Violation(k, "declaration", "undeclared location"))
        for at in e.guard:
            if at.clock not in clocks:
                out.append(Violation(k, "declaration", f"undeclared clock {at.clock}"))
            if isinstance(at.rhs, str) and at.rhs not in params:
                out.append(Violation(k, "declaration", f"undeclared parameter {at.rhs}"))
        for c, t in e.update:
            if c not in clocks:
                out.append(Violation(k, "declaration", f"undeclared clock {c}"))
            if isinstance(t, str) and t not in params:
                out.append(Violation(k, "declaration", f"undeclared parameter {t}"))
    for loc, s in a.stop.items():
        if not set(s) <= clocks:
            out.append(Violation(-1, "declaration", f"unknown clock stopped in {loc}"))
    if a.has_stops() and flavor != "sru2p":
        out.append(Violation(-1, "flavor", "stopwatches require the sru2p flavor"))
    if flavor == "u2p":
        return out
    for k, e in enumerate(a.edges):
        total = set(dict(e.update)) == clocks
        if e.parametric_guard and not total:
            out.append(Violation(k, PARAM_GUARD_TOTAL,
                                 f"{e.label()}: parametric guard requires every clock to be updated"))
        if e.parametric_update and not total:
            out.append(Violation(k, PARAM_UPDATE_TOTAL,
                                 f"{e.label()}: update to a parameter requires every clock to be updated"))
        if flavor == "sru2p" and a.stopped(e.src) != a.stopped(e.dst) and not total:
            out.append(Violation(k, STOP_CHANGE_TOTAL,
                                 f"{e.label()}: changing the stopped set requires every clock to be updated"))
    return out


def decompose_update(u: dict, clocks, aux=AUX):
    """Split u into (total update to parameters or None, remaining constant resets)."""
    if not any(isinstance(t, str) for t in u.values()):
        return None, dict(u)
    total = {}
    rest = {}
    for c in clocks:
        t = u.get(c)
        if isinstance(t, str):
            total[c] = t
        else:
            total[c] = aux
            if t is not None:
                rest[c] = t
    return total, rest


def largest_constant(a: Automaton) -> int:
    k = 0
    for e in a.edges:
        for at in e.guard:
            if not at.parametric:
                k = max(k, at.rhs)
        for _, t in e.update:
            if not isinstance(t, str):
                k = max(k, t)
    for b in a.hi:
        k = max(k, b)
    return k


# ------------------------------------------------------------------ compiled form

@dataclass(frozen=True)
class CEdge:
    index: int
    src: int
    dst: int
    guard: tuple          # ((clock idx, op, ("c", n) | ("p", k)), ...)
    total: dict | None    # clock idx -> param idx, when the update is parametric
    resets: dict          # clock idx -> natural
    parametric: bool
    is_total: bool


@dataclass
class Compiled:
    model: Automaton
    params: tuple         # analysis parameters (may include the auxiliary one)
    bounds: ParamBounds
    aux: int | None
    K: int
    locs: tuple
    init: int
    edges: tuple
    out: dict             # loc idx -> [CEdge]
    stop: tuple           # loc idx -> frozenset of clock idx

    @property
    def h(self):
        return len(self.model.clocks)


def compile_model(a: Automaton) -> Compiled:
    params = list(a.params)
    lo, hi = list(a.lo), list(a.hi)
    needs_aux = False
    for e in a.edges:
        t, _ = decompose_update(e.update_map, a.clocks)
        if t is not None and AUX in t.values():
            needs_aux = True
    aux = None
    if needs_aux:
        aux = len(params)
        params.append(AUX)
        lo.append(0)
        hi.append(0)
    pidx = {p: i for i, p in enumerate(params)}
    cidx = {c: i for i, c in enumerate(a.clocks)}
    lidx = {l: i for i, l in enumerate(a.locations)}
    edges = []
    for k, e in enumerate(a.edges):
        guard = tuple(
            (cidx[at.clock], at.op, ("p", pidx[at.rhs]) if at.parametric else ("c", at.rhs))
            for at in e.guard)
        t, rest = decompose_update(e.update_map, a.clocks)
        total = None if t is None else {cidx[c]: pidx[p] for c, p in t.items()}
        edges.append(CEdge(k, lidx[e.src], lidx[e.dst], guard, total,
                           {cidx[c]: n for c, n in rest.items()}, e.parametric,
                           set(e.update_map) == set(a.clocks)))
    out = {i: [] for i in range(len(a.locations))}
    for ce in edges:
        out[ce.src].append(ce)
    stop = tuple(frozenset(cidx[c] for c in a.stopped(l)) for l in a.locations)
    return Compiled(a, tuple(params), ParamBounds(tuple(lo), tuple(hi), tuple(params)), aux,
                    largest_constant(a), tuple(a.locations), lidx[a.init], tuple(edges), out, stop)


def full_valuation(c: Compiled, v):
    """Extend a valuation of the model parameters with the auxiliary one."""
    v = tuple(Fraction(x) for x in v)
    if c.aux is not None and len(v) == len(c.params) - 1:
        v = v + (Fraction(0),)
    return v


def project(c: Compiled, v):
    return tuple(v[: len(c.model.params)])


# ------------------------------------------------------------------ instantiation

def instantiate(a: Automaton, v):
    """Replace parameters by v and scale every constant to an integer.

    Returns a concrete.ConcreteTA whose `scale` is the common denominator.
    """
    from .concrete import ConcreteTA, CTEdge

    v = {p: Fraction(x) for p, x in zip(a.params, v)}
    L = 1
    for q in v.values():
        L = lcm(L, q.denominator)

    def val(t):
        q = v[t] if isinstance(t, str) else Fraction(t)
        return int(q * L)

    cidx = {c: i for i, c in enumerate(a.clocks)}
    edges = []
    for k, e in enumerate(a.edges):
        g = tuple((cidx[at.clock], at.op, val(at.rhs)) for at in e.guard)
        u = {cidx[c]: val(t) for c, t in e.update}
        edges.append(CTEdge(k, e.src, e.dst, g, u, e.action))
    stops = {l: frozenset(cidx[c] for c in a.stopped(l)) for l in a.locations}
    return ConcreteTA(len(a.clocks), tuple(a.locations), a.init, tuple(edges), L, stops,
                      tuple(a.clocks))
