"""Concrete semantics of an instantiated automaton: zone reachability, an
explicit clock-region engine, run replay and random simulation.

Constants of a ConcreteTA are integers in units of 1/scale; runs are recorded
in the original time unit with exact rationals.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from . import dbm


@dataclass(frozen=True)
class CTEdge:
    index: int
    src: str
    dst: str
    guard: tuple        # ((clock idx, op, int), ...)
    update: dict        # clock idx -> int
    action: str | None = None


@dataclass(frozen=True)
class ConcreteTA:
    h: int
    locations: tuple
    init: str
    edges: tuple
    scale: int = 1
    stops: dict = field(default_factory=dict)
    clock_names: tuple = ()

    @property
    def max_constant(self):
        k = 0
        for e in self.edges:
            for _, _, c in e.guard:
                k = max(k, c)
            for c in e.update.values():
                k = max(k, c)
        return k

    def out(self, loc):
        return [e for e in self.edges if e.src == loc]

    def has_stops(self):
        return any(self.stops.get(l) for l in self.locations)


@dataclass(frozen=True)
class Step:
    delay: Fraction
    edge: int
    loc: str
    valuation: tuple


@dataclass(frozen=True)
class ConcreteRun:
    init_loc: str
    init_val: tuple
    steps: tuple = ()

    @property
    def final_loc(self):
        return self.steps[-1].loc if self.steps else self.init_loc

    def dump(self, clock_names=None):
        def show(w):
            names = clock_names or [f"x{i + 1}" for i in range(len(w))]
            return "{" + ", ".join(f"{n}={q}" for n, q in zip(names, w)) + "}"

        lines = [f"({self.init_loc}, {show(self.init_val)})"]
        for s in self.steps:
            lines.append(f"  delay {s.delay}, edge #{s.edge} -> ({s.loc}, {show(s.valuation)})")
        return "\n".join(lines)


_CMP = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">=": lambda a, b: a >= b,
    ">": lambda a, b: a > b,
}


def guard_holds(ta: ConcreteTA, guard, w) -> bool:
    return all(_CMP[op](w[x] * ta.scale, c) for x, op, c in guard)


# ------------------------------------------------------------------ zones

def _z_init(h):
    return [[(0, True) for _ in range(h + 1)] for _ in range(h + 1)]


def _z_up(m):
    m = [r[:] for r in m]
    for i in range(1, len(m)):
        m[i][0] = None
    return m


def _z_down(m):
    m = [r[:] for r in m]
    for i in range(1, len(m)):
        m[0][i] = (0, True)
    dbm.close(m)
    return m


def _z_guard(m, guard):
    m = [r[:] for r in m]
    for x, op, c in guard:
        i = x + 1
        if op == "<":
            dbm.tighten(m, i, 0, (c, False))
        elif op == "<=":
            dbm.tighten(m, i, 0, (c, True))
        elif op == ">":
            dbm.tighten(m, 0, i, (-c, False))
        else:
            dbm.tighten(m, 0, i, (-c, True))
    return m if dbm.close(m) else None


def _z_reset(m, u):
    m = [r[:] for r in m]
    n = len(m)
    for x, c in sorted(u.items()):
        i = x + 1
        for j in range(n):
            if j == i:
                continue
            m[i][j] = dbm.badd((c, True), m[0][j])
            m[j][i] = dbm.badd(m[j][0], (-c, True))
        m[i][0] = (c, True)
        m[0][i] = (-c, True)
        m[i][i] = (0, True)
    dbm.close(m)
    return m


def _z_free(m, xs):
    m = [r[:] for r in m]
    n = len(m)
    for x in xs:
        i = x + 1
        for j in range(n):
            if j != i:
                m[i][j] = None
                m[j][i] = m[j][0]
        m[0][i] = (0, True)
    dbm.close(m)
    return m


def _z_extra(m, k):
    m = [r[:] for r in m]
    n = len(m)
    for i in range(n):
        for j in range(n):
            if i == j or m[i][j] is None:
                continue
            if i != 0 and m[i][j][0] > k:
                m[i][j] = None
            elif j != 0 and m[i][j][0] < -k:
                m[i][j] = (-k, False)
    dbm.close(m)
    return m


def _z_key(m):
    return tuple(tuple(r) for r in m)


def _z_leq(a, b):
    for ra, rb in zip(a, b):
        for x, y in zip(ra, rb):
            if dbm.blt(y, x):
                return False
    return True


def ta_reachable(ta: ConcreteTA, goal: str, witness=True):
    """Forward zone exploration with max-bound extrapolation.

    Returns (reachable, ConcreteRun | None).
    """
    if ta.has_stops():
        raise ValueError("zone oracle does not handle stopwatches")
    k = ta.max_constant
    z0 = _z_extra(_z_init(ta.h), k)
    nodes = [(ta.init, z0, None, None)]
    stored = {ta.init: [z0]}
    queue = deque([0])
    hit = None
    if ta.init == goal:
        hit = 0
    while queue and hit is None:
        nid = queue.popleft()
        loc, z, _, _ = nodes[nid]
        zu = _z_up(z)
        for e in ta.out(loc):
            zg = _z_guard(zu, e.guard)
            if zg is None:
                continue
            zn = _z_extra(_z_reset(zg, e.update), k)
            lst = stored.setdefault(e.dst, [])
            if any(_z_leq(zn, old) for old in lst):
                continue
            lst[:] = [old for old in lst if not _z_leq(old, zn)] + [zn]
            nodes.append((e.dst, zn, nid, e.index))
            if e.dst == goal:
                hit = len(nodes) - 1
                break
            queue.append(len(nodes) - 1)
    if hit is None:
        return False, None
    if not witness:
        return True, None
    path = []
    cur = hit
    while nodes[cur][2] is not None:
        path.append(nodes[cur][3])
        cur = nodes[cur][2]
    path.reverse()
    return True, concretize_path(ta, path)


def concretize_path(ta: ConcreteTA, path, rng=None):
    """A concrete run following the given edge indices (exact, no abstraction)."""
    edges = {e.index: e for e in ta.edges}
    zs = [_z_init(ta.h)]
    ys = []
    for idx in path:
        e = edges[idx]
        y = _z_guard(_z_up(zs[-1]), e.guard)
        if y is None:
            raise ValueError(f"edge #{idx} not enabled along the path")
        ys.append(y)
        zs.append(_z_reset(y, e.update))
    # backward refinement
    b = zs[-1]
    refined = [None] * len(path)
    for k in range(len(path) - 1, -1, -1):
        e = edges[path[k]]
        pre = [r[:] for r in b]
        for x, c in e.update.items():
            dbm.tighten(pre, x + 1, 0, (c, True))
            dbm.tighten(pre, 0, x + 1, (-c, True))
        if not dbm.close(pre):
            raise ValueError("backward refinement failed")
        pre = _z_free(pre, list(e.update))
        y = [[dbm.bmin(a, c) for a, c in zip(ra, rc)] for ra, rc in zip(ys[k], pre)]
        if not dbm.close(y):
            raise ValueError("backward refinement failed")
        refined[k] = y
        b = [[dbm.bmin(a, c) for a, c in zip(ra, rc)] for ra, rc in zip(zs[k], _z_down(y))]
        if not dbm.close(b):
            raise ValueError("backward refinement failed")
    w = tuple(Fraction(0) for _ in range(ta.h))
    steps = []
    loc = ta.init
    for k, idx in enumerate(path):
        e = edges[idx]
        d = _delay_into(refined[k], [x * ta.scale for x in w], rng)
        if d is None:
            raise ValueError("no delay found")
        w = tuple(x + d / ta.scale for x in w)
        w = tuple(Fraction(e.update[i], ta.scale) if i in e.update else x for i, x in enumerate(w))
        loc = e.dst
        steps.append(Step(d / ta.scale, idx, loc, w))
    return ConcreteRun(ta.init, tuple(Fraction(0) for _ in range(ta.h)), tuple(steps))


def _delay_into(z, w, rng=None):
    """Some d >= 0 with w + d inside zone z (scaled units), or None."""
    lo, hi = (Fraction(0), True), None
    for i in range(1, len(z)):
        x = w[i - 1]
        up = z[i][0]
        if up is not None:
            cand = (up[0] - x, up[1])
            if hi is None or cand[0] < hi[0] or (cand[0] == hi[0] and not cand[1]):
                hi = cand
        low = z[0][i]
        if low is not None:
            cand = (-low[0] - x, low[1])
            if cand[0] > lo[0] or (cand[0] == lo[0] and not cand[1]):
                lo = cand
    if hi is not None and (lo[0] > hi[0] or (lo[0] == hi[0] and not (lo[1] and hi[1]))):
        return None
    d = dbm.choose(lo, hi, rng)
    # differences are delay invariant; check them exactly
    for i in range(len(z)):
        for j in range(len(z)):
            b = z[i][j]
            if b is None:
                continue
            xi = (w[i - 1] + d) if i else 0
            xj = (w[j - 1] + d) if j else 0
            diff = xi - xj
            if diff > b[0] or (diff == b[0] and not b[1]):
                return None
    return d


# ------------------------------------------------------------------ region graph

def region_reachable(ta: ConcreteTA, goal: str) -> bool:
    """Explicit search over the classical clock-region graph."""
    if ta.has_stops():
        raise ValueError("region oracle does not handle stopwatches")
    M = ta.max_constant
    INF = M + 1
    h = ta.h

    def succs(reg):
        ints, zero, order = reg
        out = [reg]
        seen = {reg}
        cur = reg
        while True:
            ints, zero, order = cur
            ints = list(ints)
            if zero:
                big = frozenset(x for x in zero if ints[x] == M)
                for x in big:
                    ints[x] = INF
                rest = zero - big
                nxt = (tuple(ints), frozenset(), ((rest,) + order) if rest else order)
            elif order:
                top = order[-1]
                for x in top:
                    ints[x] += 1
                nxt = (tuple(ints), top, order[:-1])
            else:
                break
            if nxt in seen:
                break
            seen.add(nxt)
            out.append(nxt)
            cur = nxt
        return out

    def sat(reg, guard):
        ints, zero, _ = reg
        for x, op, c in guard:
            n = ints[x]
            if n == INF:
                if op in ("<", "<="):
                    return False
                continue
            if x in zero:
                if not _CMP[op](n, c):
                    return False
            elif op in ("<", "<="):
                if not n + 1 <= c:
                    return False
            elif not n >= c:
                return False
        return True

    def reset(reg, u):
        ints, zero, order = reg
        ints = list(ints)
        zero = set(zero)
        order = [set(g) for g in order]
        for x, c in u.items():
            ints[x] = c
            for g in order:
                g.discard(x)
            zero.add(x)
        return tuple(ints), frozenset(zero), tuple(frozenset(g) for g in order if g)

    start = (ta.init, (tuple([0] * h), frozenset(range(h)), ()))
    seen = {start}
    queue = deque([start])
    while queue:
        loc, reg = queue.popleft()
        if loc == goal:
            return True
        for r2 in succs(reg):
            for e in ta.out(loc):
                if sat(r2, e.guard):
                    nxt = (e.dst, reset(r2, e.update))
                    if nxt not in seen:
                        seen.add(nxt)
                        queue.append(nxt)
    return False


# ------------------------------------------------------------------ replay & simulate

def _advance(ta, loc, w, d, stops):
    stopped = ta.stops.get(loc, frozenset()) if stops else frozenset()
    return tuple(x if i in stopped else x + d for i, x in enumerate(w))


def replay(run: ConcreteRun, ta: ConcreteTA, stops=True):
    """Check a run step by step; returns (True, None) or (False, failing step index)."""
    loc, w = run.init_loc, tuple(run.init_val)
    if loc != ta.init or any(x != 0 for x in w):
        return False, 0
    edges = {e.index: e for e in ta.edges}
    for k, s in enumerate(run.steps):
        e = edges.get(s.edge)
        if e is None or e.src != loc or s.delay < 0:
            return False, k
        w = _advance(ta, loc, w, s.delay, stops)
        if not guard_holds(ta, e.guard, w):
            return False, k
        w = tuple(Fraction(e.update[i], ta.scale) if i in e.update else x for i, x in enumerate(w))
        loc = e.dst
        if loc != s.loc or tuple(s.valuation) != w:
            return False, k
    return True, None


def _guard_interval(ta, loc, w, guard, stops=True):
    stopped = ta.stops.get(loc, frozenset()) if stops else frozenset()
    lo, hi = (Fraction(0), True), None
    for x, op, c in guard:
        c = Fraction(c, ta.scale)
        if x in stopped:
            if not _CMP[op](w[x], c):
                return None
            continue
        b = c - w[x]
        if op in ("<", "<="):
            cand = (b, op == "<=")
            if hi is None or cand[0] < hi[0] or (cand[0] == hi[0] and not cand[1]):
                hi = cand
        else:
            cand = (b, op == ">=")
            if cand[0] > lo[0] or (cand[0] == lo[0] and not cand[1]):
                lo = cand
    if hi is not None and (lo[0] > hi[0] or (lo[0] == hi[0] and not (lo[1] and hi[1]))):
        return None
    return lo, hi


def simulate(ta: ConcreteTA, steps: int, seed=0, stops=True) -> ConcreteRun:
    """A random run of at most `steps` discrete transitions."""
    rng = random.Random(seed)
    loc = ta.init
    w = tuple(Fraction(0) for _ in range(ta.h))
    out = []
    for _ in range(steps):
        opts = []
        for e in ta.out(loc):
            iv = _guard_interval(ta, loc, w, e.guard, stops)
            if iv is not None:
                opts.append((e, iv))
        if not opts:
            break
        e, (lo, hi) = rng.choice(opts)
        d = dbm.choose(lo, hi, rng)
        w = _advance(ta, loc, w, d, stops)
        w = tuple(Fraction(e.update[i], ta.scale) if i in e.update else x for i, x in enumerate(w))
        loc = e.dst
        out.append(Step(d, e.index, loc, w))
    return ConcreteRun(ta.init, tuple(Fraction(0) for _ in range(ta.h)), tuple(out))
