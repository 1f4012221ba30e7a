"""Exact Fourier-Motzkin elimination over rationals.

A constraint is (coefs, rel, rhs) meaning sum(coefs[v] * v) rel rhs with
rel in {"<", "<=", "=="}; coefs is a dict var -> Fraction.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd


class Infeasible(Exception):
    pass


def _norm(coefs, rel, rhs):
    coefs = {k: Fraction(v) for k, v in coefs.items() if v}
    return coefs, rel, Fraction(rhs)


def _key(c):
    coefs, rel, rhs = c
    if not coefs:
        return ((), rel, rhs)
    # scale so the first coefficient has magnitude 1
    first = coefs[min(coefs)]
    s = abs(first)
    return (tuple(sorted((k, v / s) for k, v in coefs.items())), rel, rhs / s)


def _trivial(c):
    """True/False when the constraint has no variables, else None."""
    coefs, rel, rhs = c
    if coefs:
        return None
    if rel == "<":
        return 0 < rhs
    if rel == "<=":
        return 0 <= rhs
    return rhs == 0


def solve(constraints, order=None, pick=None):
    """Return a satisfying assignment {var: Fraction} or None.

    pick(lo, lo_strict, hi, hi_strict) chooses a value inside the final
    interval of each variable during back-substitution; default is the midpoint
    (or an offset of 1 from a single finite end).
    """
    cs = [_norm(*c) for c in constraints]
    vars_ = set()
    for co, _, _ in cs:
        vars_.update(co)
    if order is None:
        order = sorted(vars_, key=repr)
    else:
        order = list(order) + sorted(vars_ - set(order), key=repr)
    pick = pick or midpoint
    subs = []  # (var, expr coefs, const) from equalities
    elim = []  # (var, lowers, uppers)

    for x in order:
        for c in cs:
            t = _trivial(c)
            if t is False:
                return None
        cs = [c for c in cs if _trivial(c) is None]
        eq = next((c for c in cs if c[1] == "==" and x in c[0]), None)
        if eq is not None:
            co, _, rhs = eq
            a = co[x]
            expr = {k: -v / a for k, v in co.items() if k != x}
            const = rhs / a
            subs.append((len(elim), x, expr, const))
            new = []
            for c in cs:
                if c is eq:
                    continue
                new.append(_subst(c, x, expr, const))
            cs = new
            elim.append((x, None, None))
            continue
        lows, ups, rest = [], [], []
        for c in cs:
            co, rel, rhs = c
            a = co.get(x, 0)
            if a == 0:
                rest.append(c)
            elif a > 0:
                ups.append(c)
            else:
                lows.append(c)
        for lo in lows:
            for up in ups:
                rest.append(_combine(lo, up, x))
        cs = _simplify(rest)
        elim.append((x, lows, ups))
    for c in cs:
        if _trivial(c) is False:
            return None

    val = {}
    subs_at = {s[0]: s for s in subs}
    for pos in range(len(elim) - 1, -1, -1):
        x, lows, ups = elim[pos]
        if lows is None:
            _, _, expr, const = subs_at[pos]
            val[x] = const + sum(v * val.get(k, Fraction(0)) for k, v in expr.items())
            continue
        lo, los, hi, his = None, False, None, False
        for co, rel, rhs in lows:
            a = co[x]
            b = (rhs - sum(v * val.get(k, Fraction(0)) for k, v in co.items() if k != x)) / a
            s = rel == "<"
            if lo is None or b > lo or (b == lo and s):
                lo, los = b, s
        for co, rel, rhs in ups:
            a = co[x]
            b = (rhs - sum(v * val.get(k, Fraction(0)) for k, v in co.items() if k != x)) / a
            s = rel == "<"
            if hi is None or b < hi or (b == hi and s):
                hi, his = b, s
        if lo is not None and hi is not None:
            if lo > hi or (lo == hi and (los or his)):
                return None
        val[x] = pick(lo, los, hi, his)
    return val


def midpoint(lo, los, hi, his):
    if lo is None and hi is None:
        return Fraction(0)
    if lo is None:
        return hi - 1
    if hi is None:
        return lo + 1
    return (lo + hi) / 2


def _subst(c, x, expr, const):
    co, rel, rhs = c
    a = co.get(x)
    if not a:
        return c
    nco = {k: v for k, v in co.items() if k != x}
    for k, v in expr.items():
        nco[k] = nco.get(k, 0) + a * v
    return _norm(nco, rel, rhs - a * const)


def _combine(lo, up, x):
    # lo: a<0, up: b>0 ; scale to cancel x
    cl, rl, hl = lo
    cu, ru, hu = up
    a, b = -cl[x], cu[x]
    co = {}
    for k, v in cl.items():
        co[k] = co.get(k, 0) + v * b
    for k, v in cu.items():
        co[k] = co.get(k, 0) + v * a
    co.pop(x, None)
    rel = "<" if "<" in (rl, ru) else "<="
    return _norm(co, rel, hl * b + hu * a)


def _simplify(cs):
    best = {}
    out = []
    for c in cs:
        t = _trivial(c)
        if t is True:
            continue
        if t is False:
            return [c]
        if c[1] == "==":
            out.append(c)
            continue
        lhs, rel, rhs = _key(c)
        cur = best.get(lhs)
        if cur is None or rhs < cur[0] or (rhs == cur[0] and rel == "<" and cur[1] == "<="):
            best[lhs] = (rhs, rel, c)
    return out + [v[2] for v in best.values()]


def feasible(constraints) -> bool:
    return solve(constraints) is not None


def negate(c):
    co, rel, rhs = c
    neg = {k: -v for k, v in co.items()}
    if rel == "<":
        return [(neg, "<=", -rhs)]
    if rel == "<=":
        return [(neg, "<", -rhs)]
    return [(co, "<", rhs), (neg, "<", -rhs)]


def implies(constraints, c) -> bool:
    """True iff every solution of constraints satisfies c."""
    return all(solve(list(constraints) + [n]) is None for n in negate(c))


def lcm(a, b):
    return a * b // gcd(a, b)
