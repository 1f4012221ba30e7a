"""Symbolic reachability over one parameter region, with witness extraction.

States pair a location with a p-PDBM over the clocks running there; clocks
stopped in the location live in a StopContext with their frozen values.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from . import dbm, pdbm
from .automaton import Compiled, compile_model, full_valuation
from .concrete import ConcreteRun, Step
from .pdbm import Pdbm, StopContext
from .plt import ZERO, eval_term
from .regions import ParamRegion


class ConcretizationFailed(RuntimeError):
    pass


@dataclass(frozen=True)
class SymState:
    loc: int
    pdbm: Pdbm
    ctx: StopContext = StopContext()


@dataclass(frozen=True)
class SymStep:
    edge: int
    delays: int      # number of time-elapsing steps before the edge
    pre: Pdbm        # the time successor on which the guard was taken
    state: SymState  # state after the edge


@dataclass
class SymRun:
    init: SymState
    steps: list = field(default_factory=list)

    def locations(self, c: Compiled):
        return [c.locs[self.init.loc]] + [c.locs[s.state.loc] for s in self.steps]

    def dump(self, c: Compiled):
        names = list(c.params)
        out = []

        def state(s):
            clocks = [c.model.clocks[i] for i in running(c, s.loc)]
            head = f"[{c.locs[s.loc]}]"
            if s.ctx.frozen:
                fz = ", ".join(f"{c.model.clocks[k]}={e}+{t.show(names)}" for k, e, t in s.ctx.frozen)
                head += f" stopped: {fz}"
            return head + "\n" + s.pdbm.dump(clocks, names)

        out.append(state(self.init))
        for st in self.steps:
            e = c.model.edges[st.edge]
            out.append(f"-- {st.delays} elapse step(s), edge #{st.edge} {e.label()}")
            out.append(state(st.state))
        return "\n".join(out)


def running(c: Compiled, loc: int):
    """Clock ids that run in loc, in matrix order."""
    stopped = c.stop[loc]
    return [k for k in range(c.h) if k not in stopped]


def initial_state(c: Compiled) -> SymState:
    p = pdbm.initial(c.h, c.K)
    stopped = c.stop[c.init]
    if stopped:
        p, ctx = pdbm.freeze(p, {k + 1 for k in stopped}, None, {k + 1: k for k in range(c.h)})
        return SymState(c.init, p, ctx)
    return SymState(c.init, p)


def _split_guard(guard, run_idx):
    """Atoms over running clocks (remapped to matrix indices) and over stopped ones."""
    run, stop = [], []
    for x, op, rhs in guard:
        if x in run_idx:
            run.append((run_idx[x], op, rhs))
        else:
            stop.append((x, op, rhs))
    return run, stop


class SharedCache:
    """Successor lists shared between regions of one model.

    Successors of a state depend on the region only through the parameters
    occurring in the state and on the edges leaving its location, so the key
    is the state together with the region restricted to those parameters.
    """

    def __init__(self, c: Compiled):
        self.c = c
        self.succ = {}
        self.steps = {}
        self.loc_params = []
        for l in range(len(c.locs)):
            ps = set()
            for e in c.out[l]:
                ps |= {rhs[1] for _, _, rhs in e.guard if rhs[0] == "p"}
                if e.total is not None:
                    ps |= set(e.total.values())
            self.loc_params.append(frozenset(ps))


def _state_params(s: SymState):
    ps = s.pdbm.params()
    if s.ctx.frozen:
        ps = ps | {i for _, _, t in s.ctx.frozen for i in t.params()}
    return ps


class Explorer:
    """Successor computation for a compiled model inside one region."""

    def __init__(self, c: Compiled, r: ParamRegion, shared: SharedCache | None = None):
        self.c = c
        self.r = r
        self.shared = shared
        self._succ = {} if shared is None else shared.succ
        self._run = [running(c, l) for l in range(len(c.locs))]
        self._idx = [{k: i + 1 for i, k in enumerate(rs)} for rs in self._run]

    def time_successors(self, p: Pdbm):
        key = (p, self.r.restrict(p.params()))
        out = self._succ.get(key)
        if out is None:
            out = pdbm.succ(p, self.r)
            self._succ[key] = out
        return out

    def guard_holds(self, e, p: Pdbm, ctx: StopContext, loc: int) -> bool:
        run, stop = _split_guard(e.guard, self._idx[loc])
        if stop or e.parametric:
            return pdbm.guard_with_stopped(run, stop, p, ctx, self.r) if stop else \
                pdbm.p_guard_exists(run, p, self.r)
        return pdbm.guard_forall(run, p, self.r)

    def fire(self, e, p: Pdbm, ctx: StopContext) -> SymState:
        c, r = self.c, self.r
        src, dst = e.src, e.dst
        h = c.h
        ids = {k + 1: k for k in range(h)}
        if e.total is not None or c.stop[src] != c.stop[dst]:
            # total update: rebuild over all clocks, then freeze the stopped ones
            if e.total is not None:
                full = pdbm.update_param(pdbm.initial(h, c.K), {k + 1: q for k, q in e.total.items()}, r)
                resets = dict(e.resets)
            else:
                if not e.is_total:
                    raise ValueError(f"edge #{e.index} changes the stopped set without a total update")
                full = pdbm.initial(h, c.K)
                resets = dict(e.resets)
            stopped = c.stop[dst]
            keep_idx = self._idx[dst]
            full, nctx = pdbm.freeze(full, {k + 1 for k in stopped}, r, ids)
            run_u = {}
            for k, n in resets.items():
                if k in stopped:
                    nctx = nctx.with_value(k, min(n, c.K + 1), ZERO)
                else:
                    run_u[keep_idx[k]] = n
            return SymState(dst, pdbm.update_np(full, run_u, r), nctx)
        idx = self._idx[src]
        run_u = {}
        nctx = ctx
        for k, n in e.resets.items():
            if k in idx:
                run_u[idx[k]] = n
            else:
                nctx = nctx.with_value(k, min(n, c.K + 1), ZERO)
        return SymState(dst, pdbm.update_np(p, run_u, r), nctx)

    def successors(self, s: SymState):
        if self.shared is None:
            return self._successors(s)
        key = (s, self.r.restrict(_state_params(s) | self.shared.loc_params[s.loc]))
        out = self.shared.steps.get(key)
        if out is None:
            out = self._successors(s)
            self.shared.steps[key] = out
        return out

    def _successors(self, s: SymState):
        out = []
        seen = set()
        for e in self.c.out[s.loc]:
            # a total update forgets the source valuation: one firing is enough
            total = e.total is not None or (e.is_total and not s.ctx.frozen)
            for i, p2 in enumerate(self.time_successors(s.pdbm)):
                if self.guard_holds(e, p2, s.ctx, s.loc):
                    t = self.fire(e, p2, s.ctx)
                    if t not in seen:
                        seen.add(t)
                        out.append(SymStep(e.index, i, p2, t))
                    if total:
                        break
        return out


def successors(s: SymState, c: Compiled, r: ParamRegion):
    return [(st.edge, st.state) for st in Explorer(c, r).successors(s)]


def ef_search(c: Compiled | object, r: ParamRegion, goal, witness=True, cap=None,
              shared: SharedCache | None = None):
    """Breadth-first search for goal; returns (reachable, SymRun | None)."""
    if not isinstance(c, Compiled):
        c = compile_model(c)
    g = goal if isinstance(goal, int) else c.locs.index(goal)
    ex = Explorer(c, r, shared)
    s0 = initial_state(c)
    if s0.loc == g:
        return True, SymRun(s0) if witness else None
    parent = {s0: None}
    queue = deque([s0])
    while queue:
        s = queue.popleft()
        for st in ex.successors(s):
            t = st.state
            if t in parent:
                continue
            parent[t] = (s, st)
            if cap is not None and len(parent) > cap:
                raise RuntimeError("symbolic state space exceeded its cap")
            if t.loc == g:
                if not witness:
                    return True, None
                steps = []
                cur = t
                while parent[cur] is not None:
                    prev, step = parent[cur]
                    steps.append(step)
                    cur = prev
                steps.reverse()
                return True, SymRun(s0, steps)
            queue.append(t)
    return False, None


def reachable_states(c: Compiled, r: ParamRegion):
    ex = Explorer(c, r)
    s0 = initial_state(c)
    seen = {s0}
    queue = deque([s0])
    while queue:
        s = queue.popleft()
        for st in ex.successors(s):
            if st.state not in seen:
                seen.add(st.state)
                queue.append(st.state)
    return seen


# ------------------------------------------------------------------ concretization

def _value(rhs, v):
    kind, n = rhs
    return Fraction(n) if kind == "c" else v[n]


def concretize_witness(run: SymRun, c: Compiled | object, v) -> ConcreteRun:
    """Concrete run following the symbolic witness at parameter valuation v.

    Delays are solved per segment (between total updates) as a system of
    difference constraints on firing times.
    """
    if not isinstance(c, Compiled):
        c = compile_model(c)
    v = full_valuation(c, v)
    h = c.h
    w = [Fraction(0)] * h
    loc = run.init.loc
    steps = []
    K = c.K
    i = 0
    n = len(run.steps)
    while i < n:
        j = i
        while j < n and c.edges[run.steps[j].edge].total is None and \
                c.stop[c.edges[run.steps[j].edge].src] == c.stop[c.edges[run.steps[j].edge].dst]:
            j += 1
        seg = run.steps[i:min(j + 1, n)]
        times = _solve_segment(seg, c, v, w, loc, K)
        prev = Fraction(0)
        for st, t in zip(seg, times):
            e = c.edges[st.edge]
            d = t - prev
            prev = t
            stopped = c.stop[loc]
            w = [x if k in stopped else x + d for k, x in enumerate(w)]
            if e.total is not None:
                w = [v[e.total[k]] for k in range(h)]
            for k, n_ in e.resets.items():
                w[k] = Fraction(n_)
            loc = e.dst
            steps.append(Step(d, st.edge, c.locs[loc], tuple(w)))
        i = j + 1
    return ConcreteRun(c.locs[run.init.loc], tuple(Fraction(0) for _ in range(h)), tuple(steps))


def _solve_segment(seg, c: Compiled, v, w0, loc, K):
    """Firing times T_1..T_n (relative to the segment start) for the steps in seg."""
    n = len(seg)
    m = [[None] * (n + 1) for _ in range(n + 1)]
    for a in range(n + 1):
        m[a][a] = (Fraction(0), True)
    bad = []

    def add(a, b, bound, le):
        # T_a - T_b <= / < bound
        bound = Fraction(bound)
        if a == b:
            if bound < 0 or (bound == 0 and not le):
                bad.append((a, bound))
            return
        dbm.tighten(m, a, b, (bound, le))

    for a in range(1, n + 1):
        add(a - 1, a, 0, True)
    stopped = c.stop[loc]
    run_ids = [k for k in range(c.h) if k not in stopped]
    # clock k at node a has value T_a - T_{origin[k]} + offset[k]
    origin = {k: 0 for k in range(c.h)}
    offset = {k: w0[k] for k in range(c.h)}
    for a, st in enumerate(seg, start=1):
        e = c.edges[st.edge]
        p = st.pre
        for x, op, rhs in e.guard:
            if x in stopped:
                continue
            val = _value(rhs, v) - offset[x]
            o = origin[x]
            if op in ("<", "<="):
                add(a, o, val, op == "<=")
            else:
                add(o, a, -val, op == ">=")
        # membership in the time successor over running clocks
        E = p.E
        for mi, k in enumerate(run_ids, start=1):
            ek = E[mi - 1]
            o, off = origin[k], offset[k]
            if ek > K:
                add(o, a, -(K + 1 - off), True)
                continue
            add(o, a, -(ek - off), True)
            add(a, o, ek + 1 - off, False)
        for mi, k in enumerate([None] + run_ids):
            for mj, l in enumerate([None] + run_ids):
                if mi == mj:
                    continue
                if (k is not None and E[mi - 1] > K) or (l is not None and E[mj - 1] > K):
                    continue
                b = p.D[mi][mj]
                bound = eval_term(b.term, v)
                le = b.flag == pdbm.LE
                # frac(x_k) - frac(x_l) = (T_a - T_ok + off_k - E_k) - (T_a - T_ol + off_l - E_l)
                ck = 0 if k is None else offset[k] - E[mi - 1]
                cl = 0 if l is None else offset[l] - E[mj - 1]
                if k is None and l is None:
                    continue
                if k is None:
                    # -(T_a - T_ol) - cl ⊲ bound
                    add(origin[l], a, bound + cl, le)
                elif l is None:
                    add(a, origin[k], bound - ck, le)
                else:
                    add(origin[l], origin[k], bound - ck + cl, le)
        if e.total is None:
            for k in e.resets:
                if k not in stopped:
                    origin[k] = a
                    offset[k] = Fraction(e.resets[k])
    if bad:
        raise ConcretizationFailed(f"inconsistent constant constraint at step {bad[0][0]}")
    vals = dbm.pick_assignment(m)
    if vals is None:
        raise ConcretizationFailed("segment constraints are infeasible")
    return vals[1:]
