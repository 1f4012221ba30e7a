"""Line-oriented model language: parser and serializer.

    param p in [0, 2];
    clock x, y;
    const max = 30;
    loc idle;  loc busy stop {y};
    init idle;
    edge idle -> busy when x >= p & y == max sync go do { x := p, y := 0 };

`==` in a guard is shorthand for the pair `>=` and `<=`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from ..automaton import Atom, Automaton, Edge

KEYWORDS = {"param", "in", "clock", "const", "loc", "stop", "init", "edge", "when", "sync", "do"}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<num>\d+)
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>->|:=|<=|>=|==|[<>\[\]{},;&=])
""", re.VERBOSE)


class ParseError(ValueError):
    def __init__(self, msg, line=None, col=None):
        self.msg = msg
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line is not None else ""
        super().__init__(where + msg)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text):
    out = []
    pos, line, start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind not in ("ws", "comment"):
            t = m.group()
            if kind == "id" and t in KEYWORDS:
                kind = "kw"
            out.append(Token(kind, t, line, pos - start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - start + 1))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0
        self.params, self.lo, self.hi = [], [], []
        self.clocks = []
        self.consts = {}
        self.locs = []
        self.stop = {}
        self.init = None
        self.edges = []

    @property
    def tok(self):
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def expect(self, kind, text=None):
        t = self.tok
        if t.kind != kind or (text is not None and t.text != text):
            want = repr(text) if text else kind
            got = repr(t.text) if t.text else "end of input"
            self.error(f"expected {want}, found {got}")
        self.i += 1
        return t

    def accept(self, kind, text=None):
        t = self.tok
        if t.kind == kind and (text is None or t.text == text):
            self.i += 1
            return t
        return None

    def fresh(self, t):
        name = t.text
        if name in self.params or name in self.clocks or name in self.consts or name in self.locs:
            self.error(f"{name} is already declared", t)
        return name

    def nat(self):
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return int(t.text)
        if t.kind == "id" and t.text in self.consts:
            self.i += 1
            return self.consts[t.text]
        self.error("expected a natural number or constant")

    def parse(self):
        while self.tok.kind != "eof":
            t = self.expect("kw")
            getattr(self, f"_decl_{t.text}", lambda: self.error(f"unexpected keyword {t.text}", t))()
        if self.init is None:
            self.error("missing init declaration")
        return Automaton(tuple(self.params), tuple(self.lo), tuple(self.hi), tuple(self.clocks),
                         tuple(self.locs), self.init, tuple(self.edges),
                         {l: s for l, s in self.stop.items() if s})

    def _decl_param(self):
        name = self.fresh(self.expect("id"))
        self.expect("kw", "in")
        self.expect("op", "[")
        a = self.nat()
        self.expect("op", ",")
        b = self.nat()
        close = self.expect("op", "]")
        if a > b:
            self.error(f"empty range for {name}", close)
        self.expect("op", ";")
        self.params.append(name)
        self.lo.append(a)
        self.hi.append(b)

    def _decl_clock(self):
        while True:
            self.clocks.append(self.fresh(self.expect("id")))
            if not self.accept("op", ","):
                break
        self.expect("op", ";")

    def _decl_const(self):
        name = self.fresh(self.expect("id"))
        self.expect("op", "=")
        self.consts[name] = self.nat()
        self.expect("op", ";")

    def _decl_loc(self):
        name = self.fresh(self.expect("id"))
        stopped = []
        if self.accept("kw", "stop"):
            self.expect("op", "{")
            if not self.accept("op", "}"):
                while True:
                    stopped.append(self.clock())
                    if not self.accept("op", ","):
                        break
                self.expect("op", "}")
        self.expect("op", ";")
        self.locs.append(name)
        self.stop[name] = frozenset(stopped)

    def _decl_init(self):
        t = self.tok
        if self.init is not None:
            self.error("duplicate init declaration", t)
        self.init = self.loc()
        self.expect("op", ";")

    def clock(self):
        t = self.expect("id")
        if t.text not in self.clocks:
            self.error(f"undeclared clock {t.text}", t)
        return t.text

    def loc(self):
        t = self.expect("id")
        if t.text not in self.locs:
            self.error(f"undeclared location {t.text}", t)
        return t.text

    def value(self):
        """A natural, a constant, or a parameter name."""
        t = self.tok
        if t.kind == "id" and t.text in self.params:
            self.i += 1
            return t.text
        if t.kind == "id" and t.text not in self.consts:
            self.error(f"undeclared identifier {t.text}", t)
        return self.nat()

    def _decl_edge(self):
        src = self.loc()
        self.expect("op", "->")
        dst = self.loc()
        guard, action, update = [], None, []
        if self.accept("kw", "when"):
            while True:
                c = self.clock()
                op = self.tok
                if op.kind != "op" or op.text not in ("<", "<=", ">=", ">", "=="):
                    self.error("expected a comparison operator")
                self.i += 1
                rhs = self.value()
                if op.text == "==":
                    guard += [Atom(c, ">=", rhs), Atom(c, "<=", rhs)]
                else:
                    guard.append(Atom(c, op.text, rhs))
                if not self.accept("op", "&"):
                    break
        if self.accept("kw", "sync"):
            action = self.expect("id").text
        if self.accept("kw", "do"):
            self.expect("op", "{")
            seen = set()
            if not self.accept("op", "}"):
                while True:
                    t = self.tok
                    c = self.clock()
                    if c in seen:
                        self.error(f"clock {c} updated twice", t)
                    seen.add(c)
                    self.expect("op", ":=")
                    update.append((c, self.value()))
                    if not self.accept("op", ","):
                        break
                self.expect("op", "}")
        self.expect("op", ";")
        self.edges.append(Edge(src, dst, tuple(guard), action, tuple(update)))


def parse_model(text: str) -> Automaton:
    return _Parser(text).parse()


def load_model(path) -> Automaton:
    with open(path) as f:
        return parse_model(f.read())


def serialize(a: Automaton) -> str:
    lines = []
    for p, lo, hi in zip(a.params, a.lo, a.hi):
        lines.append(f"param {p} in [{lo}, {hi}];")
    if a.clocks:
        lines.append(f"clock {', '.join(a.clocks)};")
    for l in a.locations:
        s = sorted(a.stopped(l), key=a.clocks.index)
        lines.append(f"loc {l} stop {{{', '.join(s)}}};" if s else f"loc {l};")
    lines.append(f"init {a.init};")
    for e in a.edges:
        parts = [f"edge {e.src} -> {e.dst}"]
        if e.guard:
            parts.append("when " + " & ".join(str(at) for at in e.guard))
        if e.action:
            parts.append(f"sync {e.action}")
        if e.update:
            parts.append("do { " + ", ".join(f"{c} := {t}" for c, t in e.update) + " }")
        lines.append(" ".join(parts) + ";")
    return "\n".join(lines) + "\n"
