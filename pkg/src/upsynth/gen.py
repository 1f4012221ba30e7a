"""Random small models satisfying the total-update restrictions."""
from __future__ import annotations

import random

from .automaton import Atom, Automaton, Edge


def random_model(seed, h_max=3, m_max=2, bound_max=2, locs_max=5, edges_max=8,
                 const_max=2, stopwatches=False, p_param=0.35):
    rng = random.Random(seed)
    h = rng.randint(1, h_max)
    m = rng.randint(1, m_max)
    clocks = tuple(["x", "y", "z", "w"][:h])
    params = tuple(f"p{i + 1}" for i in range(m))
    lo, hi = [], []
    for _ in range(m):
        a = rng.randint(0, bound_max)
        b = rng.randint(a, bound_max)
        if a == b:
            b = min(bound_max, a + 1) if a < bound_max else a
            a = b - 1 if b > 0 and b == a else a
        lo.append(a)
        hi.append(b)
    nl = rng.randint(2, locs_max)
    locs = tuple(f"l{i}" for i in range(nl))
    stop = {}
    if stopwatches:
        for l in locs[1:]:
            if rng.random() < 0.5:
                stop[l] = frozenset(rng.sample(clocks, rng.randint(1, h)))
    ne = rng.randint(1, edges_max)
    edges = []
    for k in range(ne):
        # bias sources toward earlier locations so more of the graph is connected
        src = locs[rng.randint(0, min(nl - 1, k))] if k < nl else rng.choice(locs)
        dst = rng.choice(locs)
        guard = []
        for _ in range(rng.randint(0, 2)):
            c = rng.choice(clocks)
            op = rng.choice(("<", "<=", ">=", ">"))
            rhs = rng.choice(params) if rng.random() < p_param else rng.randint(0, const_max)
            guard.append(Atom(c, op, rhs))
        parametric_update = rng.random() < p_param
        change = stopwatches and stop.get(src, frozenset()) != stop.get(dst, frozenset())
        total = parametric_update or any(a.parametric for a in guard) or change
        upd = []
        if total:
            for c in clocks:
                if parametric_update and rng.random() < 0.6:
                    upd.append((c, rng.choice(params)))
                else:
                    upd.append((c, rng.randint(0, const_max)))
        else:
            for c in clocks:
                if rng.random() < 0.3:
                    upd.append((c, rng.randint(0, const_max)))
        edges.append(Edge(src, dst, tuple(guard), f"a{k}", tuple(upd)))
    return Automaton(params, tuple(lo), tuple(hi), clocks, locs, locs[0], tuple(edges),
                     {l: s for l, s in stop.items()})
