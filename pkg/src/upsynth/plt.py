"""Parametric linear terms over fractional parts of parameters, and bounds.

Parameter indices are 0-based internally; display names default to p1, p2, ...
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


class NotInPlt(ValueError):
    pass


class UnknownParameter(KeyError):
    pass


class Kind(enum.IntEnum):
    # the order here is also the preference order used when picking a class
    # representative among terms that coincide inside a region
    ZERO = 0
    ONE = 1
    FRAC = 2
    NEG_FRAC = 3
    ONE_MINUS_FRAC = 4
    FRAC_MINUS_ONE = 5
    FRAC_DIFF = 6
    FRAC_DIFF_PLUS_ONE = 7
    FRAC_DIFF_MINUS_ONE = 8


class Flag(enum.IntEnum):
    LT = 0
    LE = 1

    def __str__(self):
        return "<" if self is Flag.LT else "<="


LT = Flag.LT
LE = Flag.LE


def oplus(a: Flag, b: Flag) -> Flag:
    return LE if (a is LE and b is LE) else LT


@dataclass(frozen=True, slots=True)
class PltTerm:
    kind: Kind
    i: int = -1
    j: int = -1

    def linear(self):
        """(coefficients as sorted ((index, coef), ...), constant)."""
        return _LINEAR[self.kind](self.i, self.j)

    def params(self):
        k = self.kind
        if k in (Kind.ZERO, Kind.ONE):
            return ()
        if k in (Kind.FRAC_DIFF, Kind.FRAC_DIFF_PLUS_ONE, Kind.FRAC_DIFF_MINUS_ONE):
            return (self.i, self.j)
        return (self.i,)

    def show(self, names: Sequence[str] | None = None) -> str:
        def n(k):
            return f"frac({names[k] if names else 'p%d' % (k + 1)})"

        k = self.kind
        if k is Kind.ZERO:
            return "0"
        if k is Kind.ONE:
            return "1"
        if k is Kind.FRAC:
            return n(self.i)
        if k is Kind.NEG_FRAC:
            return "-" + n(self.i)
        if k is Kind.ONE_MINUS_FRAC:
            return "1 - " + n(self.i)
        if k is Kind.FRAC_MINUS_ONE:
            return n(self.i) + " - 1"
        if k is Kind.FRAC_DIFF:
            return f"{n(self.i)} - {n(self.j)}"
        if k is Kind.FRAC_DIFF_PLUS_ONE:
            return f"{n(self.i)} + 1 - {n(self.j)}"
        return f"{n(self.i)} - 1 - {n(self.j)}"

    def __str__(self):
        return self.show()


def _lin(pairs, c):
    d = {}
    for idx, co in pairs:
        d[idx] = d.get(idx, 0) + co
    return tuple(sorted((k, v) for k, v in d.items() if v)), c


_LINEAR = {
    Kind.ZERO: lambda i, j: ((), 0),
    Kind.ONE: lambda i, j: ((), 1),
    Kind.FRAC: lambda i, j: (((i, 1),), 0),
    Kind.NEG_FRAC: lambda i, j: (((i, -1),), 0),
    Kind.ONE_MINUS_FRAC: lambda i, j: (((i, -1),), 1),
    Kind.FRAC_MINUS_ONE: lambda i, j: (((i, 1),), -1),
    Kind.FRAC_DIFF: lambda i, j: _lin([(i, 1), (j, -1)], 0),
    Kind.FRAC_DIFF_PLUS_ONE: lambda i, j: _lin([(i, 1), (j, -1)], 1),
    Kind.FRAC_DIFF_MINUS_ONE: lambda i, j: _lin([(i, 1), (j, -1)], -1),
}

ZERO = PltTerm(Kind.ZERO)
ONE = PltTerm(Kind.ONE)


def Frac(i):
    return PltTerm(Kind.FRAC, i)


def NegFrac(i):
    return PltTerm(Kind.NEG_FRAC, i)


def OneMinusFrac(i):
    return PltTerm(Kind.ONE_MINUS_FRAC, i)


def FracMinusOne(i):
    return PltTerm(Kind.FRAC_MINUS_ONE, i)


def FracDiff(i, j):
    return ZERO if i == j else PltTerm(Kind.FRAC_DIFF, i, j)


def FracDiffPlusOne(i, j):
    """frac(p_i) + 1 - frac(p_j)."""
    return ONE if i == j else PltTerm(Kind.FRAC_DIFF_PLUS_ONE, i, j)


def FracDiffMinusOne(i, j):
    """frac(p_i) - 1 - frac(p_j)."""
    if i == j:
        raise NotInPlt("frac(p) - 1 - frac(p) = -1")
    return PltTerm(Kind.FRAC_DIFF_MINUS_ONE, i, j)


def from_linear(coefs, const) -> PltTerm:
    """Re-express a normalized linear form as one of the nine constructors."""
    coefs = tuple(sorted((k, v) for k, v in coefs if v))
    if not coefs:
        if const == 0:
            return ZERO
        if const == 1:
            return ONE
        raise NotInPlt(f"constant {const}")
    if len(coefs) == 1:
        (i, c), = coefs
        table = {(1, 0): Kind.FRAC, (-1, 0): Kind.NEG_FRAC, (-1, 1): Kind.ONE_MINUS_FRAC,
                 (1, -1): Kind.FRAC_MINUS_ONE}
        k = table.get((c, const))
        if k is None:
            raise NotInPlt(f"{c}*f{i} + {const}")
        return PltTerm(k, i)
    if len(coefs) == 2:
        (a, ca), (b, cb) = coefs
        if {ca, cb} != {1, -1}:
            raise NotInPlt(str(coefs))
        pos, neg = (a, b) if ca == 1 else (b, a)
        if const == 0:
            return PltTerm(Kind.FRAC_DIFF, pos, neg)
        if const == 1:
            return PltTerm(Kind.FRAC_DIFF_PLUS_ONE, pos, neg)
        if const == -1:
            return PltTerm(Kind.FRAC_DIFF_MINUS_ONE, pos, neg)
    raise NotInPlt(f"{coefs} + {const}")


def canonical(coefs, const) -> PltTerm:
    return from_linear(_lin(coefs, 0)[0], const)


def term_add_linear(a: PltTerm, b: PltTerm | int):
    ca, ka = a.linear()
    if isinstance(b, int):
        return ca, ka + b
    cb, kb = b.linear()
    return _lin(list(ca) + list(cb), 0)[0], ka + kb


def negate(t: PltTerm) -> PltTerm:
    c, k = t.linear()
    return from_linear(tuple((i, -v) for i, v in c), -k)


def all_terms(m: int) -> list[PltTerm]:
    out = [ZERO, ONE]
    for i in range(m):
        out += [Frac(i), NegFrac(i), OneMinusFrac(i), FracMinusOne(i)]
    for i in range(m):
        for j in range(m):
            if i != j:
                out += [PltTerm(Kind.FRAC_DIFF, i, j), PltTerm(Kind.FRAC_DIFF_PLUS_ONE, i, j),
                        PltTerm(Kind.FRAC_DIFF_MINUS_ONE, i, j)]
    return out


def fracs_of(v: Sequence[Fraction]):
    return [Fraction(x) - (Fraction(x).numerator // Fraction(x).denominator) for x in v]


def eval_term(t: PltTerm, v) -> Fraction:
    """Exact value of t when each frac(p_i) is the fractional part of v[i]."""
    coefs, k = t.linear()
    total = Fraction(k)
    for i, c in coefs:
        try:
            x = Fraction(v[i])
        except (IndexError, KeyError):
            raise UnknownParameter(i) from None
        total += c * (x - (x.numerator // x.denominator))
    return total


@dataclass(frozen=True, slots=True)
class Bound:
    term: PltTerm
    flag: Flag

    def show(self, names=None):
        return f"({self.term.show(names)}, {self.flag})"

    def __str__(self):
        return self.show()


@dataclass(frozen=True, slots=True)
class Shift:
    """An integer shift operand (-1, 0 or 1) usable only on the right of bound_add."""
    value: int
    flag: Flag


ZERO_LE = Bound(ZERO, LE)
ZERO_LT = Bound(ZERO, LT)
ONE_LT = Bound(ONE, LT)
ONE_LE = Bound(ONE, LE)


def bound_add(a: Bound, b: Bound | Shift, region=None) -> Bound:
    """Sum of two bounds; raises NotInPlt when the sum leaves the term set.

    With a region, a failed syntactic sum is retried with region-equal
    variants of the left operand (the syntactic replacement of coinciding terms).
    """
    flag = oplus(a.flag, b.flag)
    other = b.value if isinstance(b, Shift) else b.term
    try:
        t = from_linear(*term_add_linear(a.term, other))
    except NotInPlt:
        if region is None:
            raise
        for alt in region.equal_variants(a.term):
            try:
                t = from_linear(*term_add_linear(alt, other))
                break
            except NotInPlt:
                continue
        else:
            raise
    if region is not None:
        t = region.canon(t)
    return Bound(t, flag)
