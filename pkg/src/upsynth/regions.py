"""Parameter regions: comparison bases, cell enumeration, validity of bounds.

A region is fixed by the integer parts of all parameters and by the truth of a
finite family of linear comparisons over their fractional parts (the basis).
Three bases are available:

* "full": every comparison d1 <= d2 + d3 over the term set.
* "engine": every pairwise comparison d1 <= d2, plus the three-term
  comparisons f_b <= d + f_a (f in {0} u {frac(p)}) that arise when a
  parametric guard is intersected with a matrix.  These are exactly the
  comparisons the symbolic operators inspect, so it yields a coarser partition
  on which every engine decision is still uniform.
* model cliques: the engine basis restricted to groups of parameters that can
  meet inside one symbolic state (see synthesis.relevant_cliques).
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

from . import fm
from .plt import (
    LE, LT, ONE, ZERO, Bound, Flag, Frac, PltTerm, Shift, all_terms, eval_term,
)


class OutOfBounds(ValueError):
    pass


@dataclass(frozen=True)
class ParamBounds:
    lo: tuple
    hi: tuple
    names: tuple = ()

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise ValueError("bounds length mismatch")
        for a, b in zip(self.lo, self.hi):
            if a < 0 or b < a:
                raise ValueError(f"bad interval [{a}, {b}]")
        if not self.names:
            object.__setattr__(self, "names", tuple(f"p{i + 1}" for i in range(len(self.lo))))

    @property
    def m(self):
        return len(self.lo)

    def contains(self, v):
        return all(a <= Fraction(x) <= b for a, b, x in zip(self.lo, self.hi, v))


def _lin_vec(t: PltTerm, m):
    coefs, k = t.linear()
    a = [0] * m
    for i, c in coefs:
        a[i] += c
    return a, k


def _normalize(a, k):
    """Scale a.f <= k so that the integer entries are coprime."""
    g = 0
    for x in a:
        g = gcd(g, abs(x))
    g = gcd(g, abs(k))
    if g > 1:
        a = [x // g for x in a]
        k //= g
    return tuple(a), k


def _plane(a, k):
    """Unoriented hyperplane key: first nonzero coefficient positive."""
    a, k = _normalize(list(a), k)
    for x in a:
        if x:
            if x < 0:
                a = tuple(-y for y in a)
                k = -k
            break
    return a, k


class Basis:
    """A family of oriented comparisons a.f <= k over fractional parts."""

    def __init__(self, m: int, halfspaces, name: str):
        self.m = m
        self.name = name
        kept = set()
        for a, k in halfspaces:
            a, k = _normalize(list(a), k)
            if not any(a):
                continue
            hi = sum(x for x in a if x > 0)
            lo = sum(x for x in a if x < 0)
            # sup over [0,1)^m is hi (not attained when hi > 0), min is lo
            if hi <= k or lo > k:
                continue
            kept.add((a, k))
        self.halfspaces = sorted(kept)
        planes = {}
        for a, k in self.halfspaces:
            p = _plane(a, k)
            planes.setdefault(p, set()).add((a, k) == p)
        self.planes = sorted(planes)
        # hyperplanes whose sign (<, =, >) is fully decided by the signature
        self.decided = {p for p, o in planes.items() if len(o) == 2}

    @classmethod
    def full(cls, m):
        terms = all_terms(m)
        vecs = [_lin_vec(t, m) for t in terms]
        hs = set()
        for (a1, k1), (a2, k2), (a3, k3) in itertools.product(vecs, repeat=3):
            hs.add((tuple(x - y - z for x, y, z in zip(a1, a2, a3)), k2 + k3 - k1))
        return cls(m, hs, "full")

    @classmethod
    def engine(cls, m, cliques=None):
        if cliques is None:
            cliques = [frozenset(range(m))]
            name = "engine"
        else:
            name = "model"
        hs = set()
        allt = all_terms(m)
        for c in cliques:
            terms = [t for t in allt if set(t.params()) <= c]
            vecs = [_lin_vec(t, m) for t in terms]
            for (a1, k1), (a2, k2) in itertools.product(vecs, repeat=2):
                hs.add((tuple(x - y for x, y in zip(a1, a2)), k2 - k1))
            fr = [_lin_vec(ZERO, m)] + [_lin_vec(Frac(i), m) for i in sorted(c)]
            for (ab, kb), (aa, ka) in itertools.product(fr, repeat=2):
                for a3, k3 in vecs:
                    hs.add((tuple(x - y - z for x, y, z in zip(ab, a3, aa)), k3 + ka - kb))
        b = cls(m, hs, name)
        b.cliques = [frozenset(c) for c in cliques]
        return b

    def truths(self, fnum, scale):
        """Truth vector at fractional parts fnum / scale (integers)."""
        out = []
        for a, k in self.halfspaces:
            s = 0
            for x, f in zip(a, fnum):
                if x:
                    s += x * f
            out.append(s <= k * scale)
        return tuple(out)

    def position(self):
        """Map from halfspace to its index in the truth vector."""
        got = self.__dict__.get("_position")
        if got is None:
            got = {h: n for n, h in enumerate(self.halfspaces)}
            self._position = got
        return got

    def component(self, params: frozenset):
        """Parameters connected to params through some plane of the basis."""
        cache = self.__dict__.setdefault("_component", {})
        got = cache.get(params)
        if got is None:
            got = set(params)
            grown = True
            while grown:
                grown = False
                for a, _ in self.planes:
                    sup = {i for i, x in enumerate(a) if x}
                    if sup & got and not sup <= got:
                        got |= sup
                        grown = True
            got = frozenset(got)
            cache[params] = got
        return got

    def support_index(self, params: frozenset):
        """Indices of halfspaces whose support lies inside params."""
        cache = self.__dict__.setdefault("_support", {})
        got = cache.get(params)
        if got is None:
            got = tuple(n for n, (a, _) in enumerate(self.halfspaces)
                        if all(i in params for i, x in enumerate(a) if x))
            cache[params] = got
        return got

    def plane_decided(self, a, k):
        if not any(a):
            return True
        return _plane(a, k) in self.decided


_BASES = {}


def get_basis(m, kind="engine"):
    key = (m, kind)
    if key not in _BASES:
        _BASES[key] = Basis.full(m) if kind == "full" else Basis.engine(m)
    return _BASES[key]


def _split(v):
    ints, fracs = [], []
    for x in v:
        x = Fraction(x)
        n = x.numerator // x.denominator
        ints.append(n)
        fracs.append(x - n)
    return tuple(ints), fracs


def _scaled(fracs):
    L = 1
    for f in fracs:
        L = lcm(L, f.denominator)
    return L, tuple(int(f * L) for f in fracs)


@dataclass(frozen=True)
class RegionSignature:
    intparts: tuple
    truths: tuple


def signature_of(v, bounds: ParamBounds, basis: Basis | None = None) -> RegionSignature:
    if len(v) != bounds.m or not bounds.contains(v):
        raise OutOfBounds(v)
    basis = basis or get_basis(bounds.m)
    ints, fracs = _split(v)
    L, fnum = _scaled(fracs)
    return RegionSignature(ints, basis.truths(fnum, L))


@dataclass(eq=False)
class ParamRegion:
    signature: RegionSignature
    representative: tuple
    bounds: ParamBounds
    basis: Basis
    index: int = -1
    _canon: dict = field(default_factory=dict, repr=False)
    _variants: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        ints, fracs = _split(self.representative)
        self.fracs = tuple(fracs)
        self.scale, self.fnum = _scaled(fracs)
        self._vals = {}
        self._restrict = {}

    def restrict(self, params: frozenset):
        """The part of the signature that only mentions the given parameters."""
        got = self._restrict.get(params)
        if got is None:
            idx = self.basis.support_index(params)
            t = self.signature.truths
            got = (tuple(self.signature.intparts[i] for i in sorted(params)),
                   tuple(t[k] for k in idx))
            self._restrict[params] = got
        return got

    def __eq__(self, other):
        return isinstance(other, ParamRegion) and self.signature == other.signature

    def __hash__(self):
        return hash(self.signature)

    @property
    def intparts(self):
        return self.signature.intparts

    def value(self, t: PltTerm) -> int:
        """Value of t at the representative, scaled by self.scale."""
        s = self._vals.get(t)
        if s is None:
            coefs, k = t.linear()
            s = k * self.scale
            for i, c in coefs:
                s += c * self.fnum[i]
            self._vals[t] = s
        return s

    def exact(self, t: PltTerm) -> Fraction:
        return Fraction(self.value(t), self.scale)

    def _decided_equal(self, t1, t2):
        if self.value(t1) != self.value(t2):
            return False
        (c1, k1), (c2, k2) = t1.linear(), t2.linear()
        a = [0] * self.basis.m
        for i, c in c1:
            a[i] += c
        for i, c in c2:
            a[i] -= c
        return self.basis.plane_decided(a, k2 - k1)

    def equal_variants(self, t: PltTerm):
        """Terms over a subset of t's parameters that provably coincide with t here."""
        got = self._variants.get(t)
        if got is None:
            ps = set(t.params())
            cands = [u for u in all_terms(self.basis.m) if set(u.params()) <= ps and u != t]
            got = [u for u in cands if self._decided_equal(t, u)]
            got.sort(key=_pref)
            self._variants[t] = got
        return got

    def canon(self, t: PltTerm) -> PltTerm:
        """Class representative among region-equal terms (never adds parameters)."""
        r = self._canon.get(t)
        if r is None:
            alts = self.equal_variants(t)
            r = min([t] + alts, key=_pref)
            self._canon[t] = r
        return r

    def describe(self, minimal=True):
        return region_constraints(self, minimal)

    def __repr__(self):
        rep = ", ".join(f"{n}={q}" for n, q in zip(self.bounds.names, self.representative))
        return f"ParamRegion({rep})"


def _pref(t: PltTerm):
    return (len(t.params()), int(t.kind), t.i, t.j)


def _val(x, r: ParamRegion):
    if isinstance(x, Shift):
        return x.value * r.scale, x.flag
    if isinstance(x, Bound):
        return r.value(x.term), x.flag
    s, fl = 0, LE
    for y in x:
        v, f = _val(y, r)
        s += v
        fl = LE if (fl is LE and f is LE) else LT
    return s, fl


def is_valid(a, rel: Flag, b, r: ParamRegion) -> bool:
    """Validity of the comparison a rel b between bounds (b may be a sum)."""
    va, fa = _val(a, r)
    vb, fb = _val(b, r)
    if va < vb:
        return True
    if va > vb:
        return False
    if rel is LT:
        return fa is LT and fb is LE
    return fa is fb or fa is LT


def terms_equal_in(r: ParamRegion, t1: PltTerm, t2: PltTerm) -> bool:
    return r.value(t1) == r.value(t2)


# ---------------------------------------------------------------- enumeration

def _solve_square(rows):
    """Solve a square system given as [(coef list, rhs)]; None if singular."""
    n = len(rows)
    m = [[Fraction(x) for x in a] + [Fraction(k)] for a, k in rows]
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return None
        m[c], m[p] = m[p], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [m[r][n] for r in range(n)]


def _faces(planes, nvars):
    """Sample one point per face of the arrangement inside [0,1)^nvars.

    planes: list of (coef tuple of length nvars, rhs) meaning a.f = rhs.
    Fibre recursion on the first variable: critical values are the first
    coordinates of arrangement vertices (box facets included); we sample them
    and the midpoints between consecutive ones.
    """
    if nvars == 0:
        return [()]
    box = []
    for i in range(nvars):
        e = tuple(1 if j == i else 0 for j in range(nvars))
        box += [(e, 0), (e, 1)]
    allp = list(dict.fromkeys(list(planes) + box))
    crit = {Fraction(0), Fraction(1)}
    if nvars == 1:
        for (a,), k in allp:
            crit.add(Fraction(k, a))
    else:
        for sub in itertools.combinations(allp, nvars):
            sol = _solve_square(sub)
            if sol is None or not all(0 <= x <= 1 for x in sol):
                continue
            crit.add(sol[0])
    cs = sorted(c for c in crit if 0 <= c <= 1)
    samples = []
    for x, y in zip(cs, cs[1:]):
        samples += [x, (x + y) / 2]
    out = []
    for c in samples:
        sub = {}
        for a, k in planes:
            rest = a[1:]
            rhs = k - a[0] * c
            if not any(rest):
                continue
            # keep exact rational rhs by clearing denominators
            d = rhs.denominator if isinstance(rhs, Fraction) else 1
            key = _plane([x * d for x in rest], int(rhs * d))
            sub[key] = True
        for tail in _faces(list(sub), nvars - 1):
            out.append((c,) + tail)
    return out


def _components(planes, free):
    parent = {v: v for v in free}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, _ in planes:
        sup = [v for v, x in zip(free, a) if x]
        for u in sup[1:]:
            parent[find(u)] = find(sup[0])
    groups = {}
    for v in free:
        groups.setdefault(find(v), []).append(v)
    return list(groups.values())


class RegionEnumerator:
    """Enumerates regions for given bounds and basis, caching fractional cells."""

    def __init__(self, bounds: ParamBounds, basis: Basis | None = None):
        self.bounds = bounds
        self.basis = basis or get_basis(bounds.m)
        self._cells = {}

    def cells(self, zero: frozenset):
        """Fractional sample points (one per cell) with frac forced to 0 on `zero`."""
        if zero in self._cells:
            return self._cells[zero]
        m = self.basis.m
        free = [i for i in range(m) if i not in zero]
        planes = set()
        for a, k in self.basis.planes:
            sub = tuple(a[i] for i in free)
            if any(sub):
                planes.add(_plane(sub, k))
        comps = _components(planes, list(range(len(free))))
        per = []
        for comp in comps:
            cp = set()
            for a, k in planes:
                if any(a[i] for i in comp):
                    cp.add(_plane(tuple(a[i] for i in comp), k))
            cp = sorted(cp)
            seen = {}
            for pt in _faces(cp, len(comp)):
                sig = tuple(_sign(sum(x * y for x, y in zip(a, pt)) - k) for a, k in cp)
                seen.setdefault(sig, pt)
            per.append((comp, list(seen.values())))
        out = []
        for combo in itertools.product(*[pts for _, pts in per]):
            f = [Fraction(0)] * m
            for (comp, _), pt in zip(per, combo):
                for idx, val in zip(comp, pt):
                    f[free[idx]] = Fraction(val)
            out.append(tuple(f))
        self._cells[zero] = out
        return out

    def regions(self):
        b = self.bounds
        out = []
        seen = set()
        for ints in itertools.product(*[range(a, h + 1) for a, h in zip(b.lo, b.hi)]):
            zero = frozenset(i for i, (n, h) in enumerate(zip(ints, b.hi)) if n == h)
            for f in self.cells(zero):
                v = tuple(n + x for n, x in zip(ints, f))
                L, fnum = _scaled(list(f))
                sig = RegionSignature(tuple(ints), self.basis.truths(fnum, L))
                if sig in seen:
                    continue
                seen.add(sig)
                out.append(ParamRegion(sig, v, b, self.basis))
        out.sort(key=lambda r: (r.intparts, r.fracs))
        for i, r in enumerate(out):
            r.index = i
        return out


def _sign(x):
    return (x > 0) - (x < 0)


def enumerate_regions(bounds: ParamBounds, basis: Basis | str | None = None):
    if isinstance(basis, str):
        basis = get_basis(bounds.m, basis)
    return RegionEnumerator(bounds, basis).regions()


def find_region(regions, v):
    """The region of `regions` containing valuation v (None if absent)."""
    if not regions:
        return None
    r0 = regions[0]
    sig = signature_of(v, r0.bounds, r0.basis)
    for r in regions:
        if r.signature == sig:
            return r
    return None


# ---------------------------------------------------------------- constraints

def _sig_constraints(sig: RegionSignature, bounds: ParamBounds, basis: Basis):
    """Linear constraints on fractional variables 0..m-1 defining the cell."""
    cs = []
    for i, (n, h) in enumerate(zip(sig.intparts, bounds.hi)):
        if n == h:
            cs.append(({i: 1}, "==", 0))
        else:
            cs.append(({i: -1}, "<=", 0))
            cs.append(({i: 1}, "<", 1))
    for (a, k), t in zip(basis.halfspaces, sig.truths):
        co = {i: x for i, x in enumerate(a) if x}
        if t:
            cs.append((co, "<=", k))
        else:
            cs.append(({i: -x for i, x in co.items()}, "<", -k))
    return cs


def representative(sig: RegionSignature, bounds: ParamBounds, basis: Basis | None = None):
    """A valuation with the given signature, via elimination and midpoints."""
    basis = basis or get_basis(bounds.m)
    sol = fm.solve(_sig_constraints(sig, bounds, basis), order=list(range(bounds.m)))
    if sol is None:
        raise fm.Infeasible(sig)
    return tuple(n + sol.get(i, Fraction(0)) for i, n in enumerate(sig.intparts))


def sample_member(r: ParamRegion, seed=0):
    """A seeded valuation of region r, distinct seeds usually giving distinct points."""
    rng = random.Random(seed)

    def pick(lo, los, hi, his):
        if lo is None or hi is None or lo == hi:
            return fm.midpoint(lo, los, hi, his)
        return lo + (hi - lo) * Fraction(rng.randint(1, 255), 256)

    sol = fm.solve(_sig_constraints(r.signature, r.bounds, r.basis), order=list(range(r.bounds.m)),
                   pick=pick)
    if sol is None:
        raise fm.Infeasible(r.signature)
    return tuple(n + sol.get(i, Fraction(0)) for i, n in enumerate(r.intparts))


@dataclass(frozen=True)
class LinCon:
    """sum(coefs[i] * frac(p_i)) rel rhs, exact rationals."""
    coefs: tuple
    rel: str
    rhs: Fraction

    def show(self, names):
        parts = []
        for i, c in self.coefs:
            n = f"frac({names[i]})"
            if c == 1:
                parts.append(("+", n))
            elif c == -1:
                parts.append(("-", n))
            else:
                parts.append(("+" if c > 0 else "-", f"{abs(c)}*{n}"))
        s = ""
        for k, (sg, txt) in enumerate(parts):
            s += (("-" if sg == "-" else "") + txt) if k == 0 else f" {sg} {txt}"
        return f"{s} {self.rel} {self.rhs}"


def _pretty(a, k, rel):
    """Orient a.f rel k with a positive leading coefficient."""
    co = [(i, x) for i, x in enumerate(a) if x]
    flip = {"<": ">", "<=": ">=", "==": "==", ">": "<", ">=": "<="}
    if co and co[0][1] < 0:
        co = [(i, -x) for i, x in co]
        k = -k
        rel = flip[rel]
    if len(co) == 1 and co[0][1] != 1:
        c0 = co[0][1]
        return LinCon(((co[0][0], Fraction(1)),), rel, Fraction(k, c0))
    return LinCon(tuple((i, Fraction(x)) for i, x in co), rel, Fraction(k))


def region_constraints(r: ParamRegion, minimal=True):
    """Fractional constraints of the cell as LinCon values (redundant ones dropped)."""
    m = r.basis.m
    cons = []
    for i, (n, h) in enumerate(zip(r.intparts, r.bounds.hi)):
        if n == h or r.fracs[i] == 0:
            cons.append(((i,), (1,), 0, "=="))
    pos = r.basis.position()
    truths = r.signature.truths
    for a, k in r.basis.planes:
        up = pos.get((a, k))
        na = tuple(-x for x in a)
        down = pos.get(_normalize(list(na), -k))
        if up is not None and down is not None:
            # both orientations: the sign is exact
            t1, t2 = truths[up], truths[down]
            rel = "==" if t1 and t2 else ("<" if t1 else ">")
        elif up is not None:
            rel = "<=" if truths[up] else ">"
        else:
            rel = ">=" if truths[down] else "<"
        cons.append((tuple(i for i in range(m) if a[i]), tuple(x for x in a if x), k, rel))
    cons = list(dict.fromkeys(cons))
    # equality on a single variable: frac = 0 drops all plain lower bounds
    if minimal:
        cons = _prune(cons, r)
    out = []
    for idx, co, k, rel in cons:
        a = [0] * m
        for i, x in zip(idx, co):
            a[i] = x
        out.append(_pretty(a, k, rel))
    return out


def _as_fm(c):
    idx, co, k, rel = c
    d = dict(zip(idx, co))
    if rel in (">", ">="):
        return [({i: -x for i, x in d.items()}, "<" if rel == ">" else "<=", -k)]
    return [(d, rel, k)]


def _prune(cons, r):
    box = []
    for i in range(r.basis.m):
        box.append(({i: -1}, "<=", 0))
        box.append(({i: 1}, "<", 1))
    # constraints that are positive-width box facts are never listed on their own
    keep = list(cons)
    # try dropping the most complex constraints first so simple ones survive
    order = sorted(cons, key=lambda c: (len(c[0]), sum(abs(x) for x in c[1]), c[3] != "=="), reverse=True)
    for c in order:
        rest = [x for x in keep if x != c]
        base = box + [y for x in rest for y in _as_fm(x)]
        if all(fm.implies(base, y) for y in _as_fm(c)):
            keep = rest
    return keep


def constraint_text(r: ParamRegion):
    """Human-readable constraint strings, merging two-sided bounds on one variable."""
    names = r.bounds.names
    lines = []
    single = {}
    for c in region_constraints(r):
        if len(c.coefs) == 1 and c.coefs[0][1] == 1 and c.rel != "==":
            single.setdefault(c.coefs[0][0], []).append(c)
        else:
            lines.append(c.show(names))
    for i, cs in sorted(single.items()):
        lo = [c for c in cs if c.rel in (">", ">=")]
        hi = [c for c in cs if c.rel in ("<", "<=")]
        n = f"frac({names[i]})"
        if lo and hi:
            l, h = lo[0], hi[0]
            lines.append(f"{l.rhs} {'<' if l.rel == '>' else '<='} {n} {h.rel} {h.rhs}")
        else:
            lines.extend(c.show(names) for c in cs)
    return lines


_IMPLIES = {}


def region_implies(r: ParamRegion, coefs: dict, rel: str, rhs) -> bool:
    """Whether every valuation of the region satisfies sum coefs[i] * p_i rel rhs.

    rel is one of <, <=, ==, >=, >; coefs are keyed by parameter index.
    """
    d = {i: Fraction(c) for i, c in coefs.items() if c}
    # only parameters linked to the target through basis planes matter
    comp = r.basis.component(frozenset(d))
    key = (id(r.basis), comp, r.restrict(comp), tuple(sorted(d.items())), rel, Fraction(rhs))
    got = _IMPLIES.get(key)
    if got is None:
        got = _implies(r, d, comp, rel, Fraction(rhs))
        _IMPLIES[key] = got
    return got


def _implies(r, d, comp, rel, rhs):
    # p_i = n_i + frac(p_i) with n_i fixed by the region
    k = rhs - sum(c * r.intparts[i] for i, c in d.items())
    base = []
    for i in sorted(comp):
        base.append(({i: -1}, "<=", 0))
        base.append(({i: 1}, "<", 1))
    for c in region_constraints(r, minimal=False):
        idx = tuple(i for i, _ in c.coefs)
        if set(idx) <= comp:
            base.extend(_as_fm((idx, tuple(x for _, x in c.coefs), c.rhs, c.rel)))
    if rel in (">", ">="):
        target = [({i: -x for i, x in d.items()}, "<" if rel == ">" else "<=", -k)]
    elif rel == "==":
        target = [(d, "<=", k), ({i: -x for i, x in d.items()}, "<=", -k)]
    else:
        target = [(d, rel, k)]
    return all(fm.implies(base, t) for t in target)
