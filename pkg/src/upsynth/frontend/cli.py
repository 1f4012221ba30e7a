"""Command line interface: validate, regions, check, synth, simulate."""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from ..automaton import compile_model, instantiate, project, validate
from ..concrete import simulate
from ..regions import enumerate_regions
from ..synthesis import ENGINES, EngineDisagreement, basis_for, ef_synth
from . import output
from .dsl import ParseError, load_model

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _load(path):
    try:
        return load_model(path)
    except ParseError as e:
        raise UsageError(f"{path}:{e}") from None
    except OSError as e:
        raise UsageError(str(e)) from None


def _flavor(a):
    return "sru2p" if a.has_stops() else "ru2p"


def _checked(path):
    a = _load(path)
    bad = validate(a, _flavor(a))
    if bad:
        raise UsageError("model rejected:\n" + "\n".join(f"  {v}" for v in bad))
    return a


def _axes(arg, a):
    if arg:
        axes = [s.strip() for s in arg.split(",")]
    else:
        free = [p for p, lo, hi in zip(a.params, a.lo, a.hi) if lo < hi] or list(a.params)
        axes = (free * 2)[:2]
    if len(axes) != 2 or any(x not in a.params for x in axes):
        raise UsageError(f"--axes needs two parameters among {', '.join(a.params)}")
    return axes


def parse_valuation(text, a):
    vals = {}
    for part in filter(None, (s.strip() for s in text.split(","))):
        if "=" not in part:
            raise UsageError(f"bad valuation item {part!r}")
        k, x = (s.strip() for s in part.split("=", 1))
        if k not in a.params:
            raise UsageError(f"unknown parameter {k}")
        try:
            vals[k] = Fraction(x)
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"bad rational {x!r}") from None
    missing = [p for p in a.params if p not in vals]
    if missing:
        raise UsageError(f"missing values for {', '.join(missing)}")
    v = tuple(vals[p] for p in a.params)
    for p, x, lo, hi in zip(a.params, v, a.lo, a.hi):
        if x < 0:
            raise UsageError(f"{p} must be non-negative")
        if not lo <= x <= hi:
            print(f"warning: {p}={x} lies outside [{lo}, {hi}]", file=sys.stderr)
    return v


def cmd_validate(args, out):
    a = _load(args.file)
    bad = validate(a, args.flavor)
    if bad:
        for v in bad:
            print(v, file=out)
        return EXIT_VIOLATION
    print(f"ok: {len(a.locations)} locations, {len(a.clocks)} clocks, {len(a.params)} parameters, "
          f"{len(a.edges)} edges ({args.flavor})", file=out)
    return EXIT_OK


def cmd_regions(args, out):
    a = _load(args.file)
    c = compile_model(a)
    basis = basis_for(c, args.basis)
    regs = enumerate_regions(c.bounds, basis)
    if args.json:
        print(output.dumps(output.regions_doc(regs, c.params, args.basis)), file=out)
    else:
        print(f"{len(regs)} regions ({args.basis} basis)", file=out)
        for r in regs:
            doc = output.region_doc(r, c.params)
            ints = ", ".join(f"{k}={n}" for k, n in doc["intparts"].items())
            rep = ", ".join(f"{k}={x}" for k, x in zip(a.params, project(c, r.representative)))
            print(f"#{r.index} int[{ints}] " + " & ".join(doc["text"]) + f"  rep: {rep}", file=out)
    if args.plot:
        from .plot import region_scatter
        region_scatter([(project(c, r.representative), None) for r in regs], list(a.params),
                       _axes(args.axes, a), args.plot, f"{len(regs)} regions")
    return EXIT_OK


def _synth(args):
    a = _checked(args.file)
    if a.has_stops() and args.engine != "symbolic":
        raise UsageError("stopwatch models are only supported by the symbolic engine")
    c = compile_model(a)
    if args.goal not in a.locations:
        raise UsageError(f"unknown location {args.goal}")
    res = ef_synth(c, args.goal, args.engine, args.basis, witness=args.witness)
    return a, c, res


def _plot(args, a, c, res):
    if args.plot:
        from .plot import region_scatter
        pts = [(project(c, v.region.representative), "reach" if v.reachable else "safe")
               for v in res.verdicts]
        region_scatter(pts, list(a.params), _axes(args.axes, a), args.plot, f"EF {res.goal}")


def cmd_check(args, out):
    a, c, res = _synth(args)
    if args.json:
        print(output.dumps(output.synth_doc(res, c, args.witness)), file=out)
    else:
        verdict = "Empty" if res.empty else "NonEmpty"
        print(f"verdict: {verdict}", file=out)
        print(f"regions reaching {res.goal}: {len(res.reaching)} of {len(res.verdicts)} "
              f"(engine {res.engine}, {res.basis} basis)", file=out)
        if args.witness and not res.empty:
            v = res.reaching[0]
            rep = ", ".join(f"{k}={x}" for k, x in zip(a.params, project(c, v.region.representative)))
            print(f"witness at {rep}:", file=out)
            if v.run is not None:
                print(v.run.dump(a.clocks), file=out)
    _plot(args, a, c, res)
    if args.expect_unreachable and not res.empty:
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_synth(args, out):
    a, c, res = _synth(args)
    if args.json:
        print(output.dumps(output.synth_doc(res, c, args.witness)), file=out)
    else:
        print(f"goal {res.goal}: {len(res.reaching)} of {len(res.verdicts)} regions reach it", file=out)
        for v in res.reaching:
            doc = output.region_doc(v.region, c.params)
            ints = ", ".join(f"{k}={n}" for k, n in doc["intparts"].items())
            print(f"#{v.region.index} int[{ints}] " + " & ".join(doc["text"]), file=out)
    _plot(args, a, c, res)
    return EXIT_OK


def cmd_simulate(args, out):
    a = _load(args.file)
    v = parse_valuation(args.valuation, a)
    ta = instantiate(a, v)
    run = simulate(ta, args.steps, args.seed, stops=not args.no_stops)
    if args.json:
        doc = {"valuation": {p: output.q(x) for p, x in zip(a.params, v)}, "scale": ta.scale,
               "steps": output.run_doc(run, a.clocks, a)}
        print(output.dumps(doc), file=out)
    else:
        print(run.dump(a.clocks), file=out)
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="upsynth", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("validate", help="check the structural restrictions of a model")
    p.add_argument("file")
    p.add_argument("--flavor", choices=("u2p", "ru2p", "sru2p"), default="ru2p")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("regions", help="enumerate parameter regions")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.add_argument("--basis", choices=("engine", "full", "model"), default="engine")
    p.add_argument("--plot", metavar="FILE")
    p.add_argument("--axes", metavar="P,Q")
    p.set_defaults(func=cmd_regions)

    for name, func, hlp in (("check", cmd_check, "decide whether the goal is reachable"),
                            ("synth", cmd_synth, "list the regions reaching the goal")):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("file")
        p.add_argument("--goal", required=True)
        p.add_argument("--engine", choices=ENGINES, default="symbolic")
        p.add_argument("--basis", choices=("engine", "full", "model"), default="model")
        p.add_argument("--witness", action="store_true")
        p.add_argument("--plot", metavar="FILE")
        p.add_argument("--axes", metavar="P,Q")
        if name == "check":
            p.add_argument("--json", action="store_true")
            p.add_argument("--expect-unreachable", action="store_true")
        else:
            g = p.add_mutually_exclusive_group()
            g.add_argument("--json", action="store_true")
            g.add_argument("--text", action="store_true")
        p.set_defaults(func=func)

    p = sub.add_parser("simulate", help="random concrete runs at a parameter valuation")
    p.add_argument("file")
    p.add_argument("--valuation", required=True, help='e.g. "p1=3/2,p2=5/4"')
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.add_argument("--no-stops", action="store_true", help="let stopped clocks run")
    p.set_defaults(func=cmd_simulate)
    return ap


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args, out)
    except UsageError as e:
        print(f"error: {e}", file=err)
        return EXIT_USAGE
    except EngineDisagreement as e:
        print(f"internal error: {e}", file=err)
        return 3


if __name__ == "__main__":
    sys.exit(main())
