"""Small numeric difference-bound helpers shared by the symbolic and concrete engines.

A bound is (value, le) with le True for <=; None stands for +infinity.
Values may be ints or Fractions.
"""
from __future__ import annotations


def badd(a, b):
    if a is None or b is None:
        return None
    return (a[0] + b[0], a[1] and b[1])


def blt(a, b):
    """a strictly tighter than b."""
    if b is None:
        return a is not None
    if a is None:
        return False
    return a[0] < b[0] or (a[0] == b[0] and not a[1] and b[1])


def bmin(a, b):
    return a if blt(a, b) else b


def close(m):
    """Floyd-Warshall in place; returns False when the system is empty."""
    n = len(m)
    for k in range(n):
        mk = m[k]
        for i in range(n):
            mik = m[i][k]
            if mik is None:
                continue
            mi = m[i]
            for j in range(n):
                mkj = mk[j]
                if mkj is None:
                    continue
                s = (mik[0] + mkj[0], mik[1] and mkj[1])
                cur = mi[j]
                if cur is None or s[0] < cur[0] or (s[0] == cur[0] and cur[1] and not s[1]):
                    mi[j] = s
        d = m[k][k]
        if d[0] < 0 or (d[0] == 0 and not d[1]):
            return False
    for i in range(n):
        d = m[i][i]
        if d[0] < 0 or (d[0] == 0 and not d[1]):
            return False
    return True


def tighten(m, i, j, b):
    if blt(b, m[i][j]):
        m[i][j] = b


def pick_assignment(m, rng=None, pick=None):
    """Greedy assignment of nodes 1..n-1 (node 0 fixed at 0) in a closed system.

    m[i][j] bounds x_i - x_j.  Returns a list of values (index 0 is 0) or None.
    """
    from fractions import Fraction

    n = len(m)
    m = [row[:] for row in m]
    if not close(m):
        return None
    vals = [Fraction(0)] + [None] * (n - 1)
    for i in range(1, n):
        # x_i - x_0 <= m[i][0], x_0 - x_i <= m[0][i]
        hi = m[i][0]
        lo = None if m[0][i] is None else (-m[0][i][0], m[0][i][1])
        v = choose(lo, hi, rng, pick)
        vals[i] = v
        m[i][0] = (v, True)
        m[0][i] = (-v, True)
        if not close(m):
            return None
    return vals


def choose(lo, hi, rng=None, pick=None):
    """A value in the interval given by lo=(value, closed) and hi=(value, closed)."""
    from fractions import Fraction

    if pick is not None:
        return pick(lo, hi)
    if lo is not None and hi is not None and lo[0] == hi[0]:
        return Fraction(lo[0])
    if lo is None and hi is None:
        return Fraction(0)
    if hi is None:
        base = Fraction(lo[0])
        return base + (Fraction(rng.randint(1, 8), 4) if rng else 1)
    if lo is None:
        base = Fraction(hi[0])
        return base - (Fraction(rng.randint(1, 8), 4) if rng else 1)
    a, b = Fraction(lo[0]), Fraction(hi[0])
    if rng is None:
        return (a + b) / 2
    n = 16
    ks = list(range(1, n))
    if lo[1]:
        ks.append(0)
    if hi[1]:
        ks.append(n)
    k = rng.choice(ks)
    return a + (b - a) * k / n
