"""Precise parametric DBMs over fractional parts of clocks.

Matrix index 0 is the reference clock; clocks are 1..H.  Cell D[i][j] bounds
frac(x_i) - frac(x_j).  Integer parts are kept in E and saturate at cap + 1.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from fractions import Fraction

from . import dbm
from .plt import (
    LE, LT, ONE, ZERO, ZERO_LE, Bound, Frac, FracDiff, Kind, NegFrac, Shift, bound_add,
    negate,
)
from .regions import ParamRegion, is_valid


class Malformed(ValueError):
    def __init__(self, cond, detail=""):
        super().__init__(f"malformed matrix: condition {cond} {detail}".strip())
        self.cond = cond


class WrongKind(ValueError):
    pass


class NotPoint(ValueError):
    pass


class NotTotal(ValueError):
    pass


class PKind(enum.Enum):
    OPEN = "open"
    POINT = "point"


@dataclass(frozen=True)
class Pdbm:
    E: tuple
    D: tuple
    kind: PKind = PKind.OPEN
    cap: int | None = None

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.E, self.D, self.kind, self.cap))
            object.__setattr__(self, "_hash", h)
        return h

    @property
    def h(self):
        return len(self.E)

    def params(self):
        """Parameter indices occurring in the matrix."""
        got = self.__dict__.get("_params")
        if got is None:
            got = frozenset(i for row in self.D for b in row for i in b.term.params())
            object.__setattr__(self, "_params", got)
        return got

    def dump(self, clocks=None, names=None):
        h = self.h
        clocks = list(clocks) if clocks else [f"x{i}" for i in range(1, h + 1)]
        labels = ["0"] + clocks
        lines = ["E: (" + ", ".join(str(e) for e in self.E) + ")"]
        for i in range(h + 1):
            cells = " | ".join(self.D[i][j].show(names) for j in range(h + 1))
            lines.append(f"{labels[i]}: {cells}")
        return "\n".join(lines)


def initial(h, cap=None):
    row = (ZERO_LE,) * (h + 1)
    return Pdbm((0,) * h, (row,) * (h + 1), PKind.OPEN, cap)


def _mat(p):
    return [list(r) for r in p.D]


def _freeze_mat(m):
    return tuple(tuple(r) for r in m)


def _clampE(e, cap):
    return e if cap is None else min(e, cap + 1)


# ------------------------------------------------------------------ classification

_MINUS1_LT = Shift(-1, LT)
_ONE_LT = Bound(ONE, LT)


def _is_zero_le(b, r):
    return b.flag is LE and r.value(b.term) == 0


def classify(p: Pdbm, r: ParamRegion) -> str:
    """'OpenA', 'OpenB' or 'Point'; raises Malformed naming the first broken clause."""
    h = p.h
    D = p.D
    if len(D) != h + 1 or any(len(row) != h + 1 for row in D):
        raise Malformed("shape")
    for i in range(h + 1):
        if not _is_zero_le(D[i][i], r):
            raise Malformed("diag", f"at {i}")
    for i in range(1, h + 1):
        if not (is_valid(_MINUS1_LT, LE, D[0][i], r) and is_valid(D[0][i], LE, ZERO_LE, r)):
            raise Malformed("1", f"D[0][{i}]")
        if not (is_valid(ZERO_LE, LE, D[i][0], r) and is_valid(D[i][0], LE, _ONE_LT, r)):
            raise Malformed("1", f"D[{i}][0]")
    if p.kind is PKind.POINT:
        for i in range(h + 1):
            for j in range(h + 1):
                if D[i][j].flag is not LE:
                    raise Malformed("8", "non-strict flags")
                if r.value(D[i][j].term) != -r.value(D[j][i].term):
                    raise Malformed("8", "antisymmetry")
        for i in range(1, h + 1):
            t = D[i][0].term
            if t.kind is Kind.FRAC:
                want = _clampE(r.intparts[t.i], p.cap)
                if p.E[i - 1] != want:
                    raise Malformed("8", f"E[{i}]")
            elif t.kind is not Kind.ZERO:
                raise Malformed("8", f"D[{i}][0] is not a parameter fraction")
        _check_triangle(p, r, "8(2)")
        return "Point"
    for i in range(1, h + 1):
        for j in range(1, h + 1):
            if i == j:
                continue
            a = is_valid(ZERO_LE, LE, D[i][j], r) and is_valid(D[i][j], LE, _ONE_LT, r) \
                and is_valid(_MINUS1_LT, LE, D[j][i], r) and is_valid(D[j][i], LE, ZERO_LE, r)
            b = is_valid(ZERO_LE, LE, D[j][i], r) and is_valid(D[j][i], LE, _ONE_LT, r) \
                and is_valid(_MINUS1_LT, LE, D[i][j], r) and is_valid(D[i][j], LE, ZERO_LE, r)
            if not (a or b):
                raise Malformed("2", f"({i},{j})")
    for i in range(h + 1):
        for j in range(h + 1):
            vij, vji = r.value(D[i][j].term), r.value(D[j][i].term)
            if vij == -vji and vij != r.scale:
                if D[i][j].flag is not LE or D[j][i].flag is not LE:
                    raise Malformed("3", f"({i},{j}) should be non-strict")
            elif D[i][j].flag is not LT or D[j][i].flag is not LT:
                raise Malformed("3", f"({i},{j}) should be strict")
    _check_triangle(p, r, "4")
    a = any(_is_zero_le(D[i][0], r) and _is_zero_le(D[0][i], r) for i in range(1, h + 1))
    if a:
        return "OpenA"
    b = any(D[i][0].flag is LT and r.value(D[i][0].term) == r.scale for i in range(1, h + 1)) and \
        all(D[0][j].flag is LT for j in range(1, h + 1) if r.value(D[0][j].term) == 0)
    if b:
        return "OpenB"
    if h == 0:
        return "OpenA"
    raise Malformed("5")


def _check_triangle(p, r, cond):
    D = p.D
    n = p.h + 1
    vals = [[(r.value(D[i][j].term), D[i][j].flag) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            vij, fij = vals[i][j]
            for k in range(n):
                vik, fik = vals[i][k]
                vkj, fkj = vals[k][j]
                s = vik + vkj
                if vij > s:
                    raise Malformed(cond, f"triangle ({i},{k},{j})")
                if vij == s and fij is LE and not (fik is LE and fkj is LE):
                    raise Malformed(cond, f"triangle ({i},{k},{j})")


def is_border(p: Pdbm, r: ParamRegion) -> bool:
    """Condition 5a: some clock sits exactly on an integer."""
    D = p.D
    return any(_is_zero_le(D[i][0], r) and _is_zero_le(D[0][i], r) for i in range(1, p.h + 1))


# ------------------------------------------------------------------ operators

def lfp(p: Pdbm, r: ParamRegion):
    D = p.D
    n = p.h + 1
    out = []
    for x in range(1, n):
        row = D[x]
        ok = True
        for i in range(n):
            b = row[i]
            v = r.value(b.term)
            if v < 0 or (v == 0 and b.flag is LT):
                ok = False
                break
        if ok:
            out.append(x)
    return out


def update_np(p: Pdbm, u: dict, r: ParamRegion | None = None) -> Pdbm:
    """Reset clocks (matrix indices) to natural constants."""
    if not u:
        return p
    m = _mat(p)
    E = list(p.E)
    n = p.h + 1
    for x in sorted(u):
        m[x][0] = ZERO_LE
        m[0][x] = ZERO_LE
        for i in range(1, n):
            m[x][i] = m[0][i]
            m[i][x] = m[i][0]
        E[x - 1] = _clampE(u[x], p.cap)
    return Pdbm(tuple(E), _freeze_mat(m), PKind.OPEN, p.cap)


def update_param(p: Pdbm, u: dict, r: ParamRegion) -> Pdbm:
    """Total update of every clock to a parameter index; yields a point matrix."""
    h = p.h
    if set(u) != set(range(1, h + 1)):
        raise NotTotal(sorted(u))
    n = h + 1
    m = [[ZERO_LE] * n for _ in range(n)]
    E = [0] * h
    for i in range(1, n):
        k = u[i]
        if not isinstance(k, int) or isinstance(k, bool):
            raise TypeError("parameter index expected")
        m[i][0] = Bound(r.canon(Frac(k)), LE)
        m[0][i] = Bound(r.canon(NegFrac(k)), LE)
        E[i - 1] = _clampE(r.intparts[k], p.cap)
        for j in range(1, n):
            if i != j:
                m[i][j] = Bound(r.canon(FracDiff(k, u[j])), LE)
    return Pdbm(tuple(E), _freeze_mat(m), PKind.POINT, p.cap)


def te_lt(p: Pdbm, r: ParamRegion) -> Pdbm:
    if p.kind is not PKind.POINT and not is_border(p, r):
        raise WrongKind("te_lt expects a point or border matrix")
    L = lfp(p, r)
    x = L[0]
    m = _mat(p)
    D = p.D
    for i in range(1, p.h + 1):
        if i in L:
            m[i][0] = _ONE_LT
        else:
            m[i][0] = bound_add(D[i][x], _ONE_LT, r)
        m[0][i] = Bound(D[0][i].term, LT)
    return Pdbm(p.E, _freeze_mat(m), PKind.OPEN, p.cap)


def te_eq(p: Pdbm, r: ParamRegion) -> Pdbm:
    if p.kind is PKind.POINT or is_border(p, r):
        raise WrongKind("te_eq expects a centre matrix")
    L = lfp(p, r)
    x = L[0]
    m = _mat(p)
    D = p.D
    E = list(p.E)
    one_le, minus_one = Bound(ONE, LE), Shift(-1, LE)
    for i in range(1, p.h + 1):
        if i in L:
            m[i][0] = ZERO_LE
            m[0][i] = ZERO_LE
            E[i - 1] = _clampE(E[i - 1] + 1, p.cap)
        else:
            m[i][0] = bound_add(D[i][x], one_le, r)
            m[0][i] = bound_add(D[x][i], minus_one, r)
    # every clock that just hit an integer gets the row/column refresh, not only x
    for y in L:
        for i in range(1, p.h + 1):
            m[i][y] = m[i][0]
            m[y][i] = m[0][i]
    return Pdbm(tuple(E), _freeze_mat(m), PKind.OPEN, p.cap)


def te(p: Pdbm, r: ParamRegion) -> Pdbm:
    if p.h == 0:
        return p
    if p.kind is PKind.POINT or is_border(p, r):
        return te_lt(p, r)
    return te_eq(p, r)


def succ(p: Pdbm, r: ParamRegion, limit=100000):
    """Time successors TE^i(p), i >= 0, until a matrix repeats."""
    seen = {p}
    out = [p]
    cur = p
    for _ in range(limit):
        cur = te(cur, r)
        if cur in seen:
            return out
        seen.add(cur)
        out.append(cur)
    raise RuntimeError("time-successor chain did not close")


# ------------------------------------------------------------------ guards
# atom: (clock index, op, rhs) with op in "<", "<=", ">=", ">" and rhs either
# ("c", n) for a natural constant or ("p", k) for parameter k.

_OPS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">=": lambda a, b: a >= b,
    ">": lambda a, b: a > b,
}


class ParametricAtom(ValueError):
    pass


def _frac_zero(p, x, r):
    b = p.D[0][x]
    return b.flag is LE and r.value(b.term) == 0


def guard_forall(atoms, p: Pdbm, r: ParamRegion) -> bool:
    """True iff every member of p satisfies all constant atoms."""
    for x, op, (kind, c) in atoms:
        if kind != "c":
            raise ParametricAtom((x, op, c))
        e = p.E[x - 1]
        if p.cap is not None and e > p.cap:
            if op in ("<", "<="):
                return False
            continue
        if _frac_zero(p, x, r):
            if not _OPS[op](e, c):
                return False
        else:
            # value lies strictly between e and e + 1
            if op in ("<", "<="):
                if not e + 1 <= c:
                    return False
            elif not e >= c:
                return False
    return True


def _rhs_parts(rhs, r):
    kind, c = rhs
    if kind == "c":
        return c, 0
    return r.intparts[c], r.fnum[c]


def p_guard_exists(atoms, p: Pdbm, r: ParamRegion) -> bool:
    """True iff some member of p satisfies the (possibly parametric) atoms.

    Atoms are split into integer-part and fractional-part conditions; the
    fractional ones are added as edges to the cell constraints and the clock
    variables are eliminated by shortest-path closure (negative cycle check).
    """
    n = p.h + 1
    S = r.scale
    m = [[(r.value(b.term), b.flag is LE) for b in row] for row in p.D]
    for x, op, rhs in atoms:
        e = p.E[x - 1]
        ni, fv = _rhs_parts(rhs, r)
        if p.cap is not None and e > p.cap:
            # clock exceeds every constant and parameter bound
            if op in ("<", "<="):
                return False
            continue
        if e < ni:
            if op in (">", ">="):
                return False
            continue
        if e > ni:
            if op in ("<", "<="):
                return False
            continue
        if op == "<":
            dbm.tighten(m, x, 0, (fv, False))
        elif op == "<=":
            dbm.tighten(m, x, 0, (fv, True))
        elif op == ">":
            dbm.tighten(m, 0, x, (-fv, False))
        else:
            dbm.tighten(m, 0, x, (-fv, True))
    return dbm.close(m)


def is_parametric(atoms):
    return any(rhs[0] == "p" for _, _, rhs in atoms)


# ------------------------------------------------------------------ semantics

def _frac(q):
    q = Fraction(q)
    n = q.numerator // q.denominator
    return n, q - n


def eval_bound(b: Bound, v):
    from .plt import eval_term
    return eval_term(b.term, v)


def membership(w, v, p: Pdbm) -> bool:
    """Whether clock valuation w (indexed 0..H-1) lies in p valuated at v."""
    from .plt import eval_term
    if len(w) != p.h:
        return False
    fr = [Fraction(0)]
    for i, x in enumerate(w):
        n, f = _frac(x)
        e = p.E[i]
        if p.cap is not None and e > p.cap:
            if n < p.cap + 1:
                return False
        elif n != e:
            return False
        fr.append(f)
    for i in range(p.h + 1):
        for j in range(p.h + 1):
            b = p.D[i][j]
            d = fr[i] - fr[j]
            bound = eval_term(b.term, v)
            if d > bound or (d == bound and b.flag is LT):
                return False
    return True


def valuated(p: Pdbm, v):
    from .plt import eval_term
    return [[(eval_term(b.term, v), b.flag is LE) for b in row] for row in p.D]


def sample_member(p: Pdbm, v, seed=0):
    """A member of p at v (deterministic per seed)."""
    rng = random.Random(seed)
    fr = dbm.pick_assignment(valuated(p, v), rng)
    if fr is None:
        raise ValueError("empty valuated matrix")
    out = []
    for i in range(p.h):
        e = p.E[i]
        out.append(e + fr[i + 1])
    return tuple(out)


def clock_region(p: Pdbm, r: ParamRegion):
    """The clock region containing p: per clock (E, frac is zero), plus the
    weak order of fractional parts as a tuple of (i, j, sign)."""
    D = p.D
    n = p.h + 1
    zero = tuple(_frac_zero(p, x, r) for x in range(1, n))
    order = []
    for i in range(1, n):
        for j in range(i + 1, n):
            hi_ij = (r.value(D[i][j].term), D[i][j].flag)
            hi_ji = (r.value(D[j][i].term), D[j][i].flag)
            if hi_ij[0] == 0 and hi_ij[1] is LE and hi_ji[0] == 0 and hi_ji[1] is LE:
                s = 0
            elif hi_ij[0] < 0 or (hi_ij[0] == 0 and hi_ij[1] is LT):
                s = -1
            else:
                s = 1
            order.append((i, j, s))
    return tuple(p.E), zero, tuple(order)


# ------------------------------------------------------------------ stopwatches

@dataclass(frozen=True)
class StopContext:
    """Frozen values of stopped clocks: (clock id, integer part, fraction term)."""
    frozen: tuple = ()

    @property
    def stopped(self):
        return frozenset(c for c, _, _ in self.frozen)

    def value_of(self, clock):
        for c, e, t in self.frozen:
            if c == clock:
                return e, t
        raise KeyError(clock)

    def with_value(self, clock, e, t):
        items = [f for f in self.frozen if f[0] != clock] + [(clock, e, t)]
        return StopContext(tuple(sorted(items, key=lambda f: f[0])))


def freeze(p: Pdbm, stopped, r: ParamRegion | None = None, ids=None):
    """Remove stopped clocks (matrix indices) and record their exact values.

    ids maps matrix index -> clock identifier recorded in the context.
    """
    stopped = set(stopped)
    if not stopped:
        return p, StopContext()
    ids = ids or {i: i for i in range(1, p.h + 1)}
    frozen = []
    for x in sorted(stopped):
        up, lo = p.D[x][0], p.D[0][x]
        if up.flag is not LE or lo.flag is not LE:
            raise NotPoint(x)
        if r is not None and r.value(up.term) != -r.value(lo.term):
            raise NotPoint(x)
        if r is None and negate(lo.term) != up.term:
            raise NotPoint(x)
        frozen.append((ids[x], p.E[x - 1], up.term))
    keep = [0] + [i for i in range(1, p.h + 1) if i not in stopped]
    D = tuple(tuple(p.D[i][j] for j in keep) for i in keep)
    E = tuple(p.E[i - 1] for i in keep[1:])
    return Pdbm(E, D, p.kind, p.cap), StopContext(tuple(sorted(frozen, key=lambda f: f[0])))


def stopped_atom_holds(e, term, op, rhs, r: ParamRegion, cap=None) -> bool:
    """Exact check of a frozen clock e + term against a constant or parameter."""
    S = r.scale
    if cap is not None and e > cap:
        return op in (">", ">=")
    lhs = e * S + r.value(term)
    ni, fv = _rhs_parts(rhs, r)
    return _OPS[op](lhs, ni * S + fv)


def guard_with_stopped(running, stopped_atoms, p: Pdbm, ctx: StopContext, r: ParamRegion) -> bool:
    """running: atoms over matrix indices; stopped_atoms: atoms over clock ids in ctx."""
    for c, op, rhs in stopped_atoms:
        e, t = ctx.value_of(c)
        if not stopped_atom_holds(e, t, op, rhs, r, p.cap):
            return False
    if is_parametric(running) or is_parametric(stopped_atoms):
        return p_guard_exists(running, p, r)
    return guard_forall(running, p, r)
