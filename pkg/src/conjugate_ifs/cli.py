"""Command-line front end.

Exit codes: 0 success (or a compatible system for ``check``), 2 incompatible,
3 undecided, 1 malformed input or a failed computation.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction

import numpy as np

from . import conjugate, measure, regularity, stability, zoo
from .errors import ConjugateError

EXIT = {conjugate.COMPATIBLE: 0, conjugate.INCOMPATIBLE: 2, conjugate.UNDECIDED: 3}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _num(s):
    return float(Fraction(s.strip()))


def _nums(s):
    return [_num(v) for v in s.split(",") if v.strip()]


def _pvec(s):
    return None if s is None else measure.check_probability_vector(_nums(s))


def _system(args):
    if getattr(args, "config", None):
        return conjugate.load_system(args.config)
    if not getattr(args, "system", None):
        raise ValueError("give --system NAME[:params] or --config PATH")
    return zoo.build(args.system)


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)


def cmd_check(args):
    rep = conjugate.validate(_system(args), args.tol)
    print(rep.summary())
    return EXIT[rep.status]


def cmd_eval(args):
    s = _system(args)
    x = _nums(args.x)
    y, err = conjugate.evaluate(s, x[0] if len(x) == 1 else np.array(x), args.tol)
    print(format(y, ".17g"), format(err, ".3g"))
    return 0


def cmd_render(args):
    table = conjugate.evaluate_grid(_system(args), args.depth, args.tol)
    _emit(table.to_csv(args.out), args.out)
    return 0


def cmd_measure(args):
    s = _system(args)
    ifs = s.x_side if args.side == "x" else s.y_side
    m = measure.chaos_game(ifs, _pvec(args.p), args.samples, args.burn_in, args.seed,
                           n_streams=args.streams, threads=args.threads)
    _emit(m.to_csv(args.out), args.out)
    return 0


def cmd_holder(args):
    h = regularity.holder_thresholds(_system(args), _pvec(args.p), args.samples, args.seed)
    print(f"alpha_star {h.alpha_star:.10g} stderr {h.stderr_alpha:.3g}")
    print(f"beta_star {h.beta_star:.10g} stderr {h.stderr_beta:.3g}")
    return 0


def cmd_dim(args):
    d = measure.fan_lau_dimension(_system(args), args.grid, args.iters)
    print(format(d, ".10g"))
    return 0


def cmd_probe(args):
    word = None if args.word is None else [int(v) for v in args.word.split(",")]
    tr = regularity.local_exponent_probe(_system(args), args.seed, args.depth, _pvec(args.p), word)
    _emit(tr.to_csv(args.out), args.out)
    return 0


def cmd_stability(args):
    if args.case == "discrete":
        s = _system(args)
        ifs = s.x_side if args.side == "x" else s.y_side
        depths = [int(v) for v in _nums(args.n)] if args.n else list(range(1, 7))
        rows = stability.discrete_approximation_experiment(ifs, depths)
    elif args.case == "deform":
        ns = [math.inf if v.strip() == "inf" else int(v) for v in args.n.split(",")] if args.n else [2, 4, 8, 16, 32]
        rows = stability.deformation_experiment(ns, args.depth if args.depth_set else 10, args.tol)
    else:
        if not args.other:
            raise ValueError("--case uniform needs --other")
        sup, haus = stability.uniform_vs_hausdorff_check(_system(args), zoo.build(args.other), args.depth, args.tol)
        print(f"sup_diff {sup:.17g}")
        print(f"haus_diff {haus:.17g}")
        return 0
    _emit(stability.experiment_csv(rows, args.out), args.out)
    return 0


def cmd_catalog(args):
    for e in zoo.CATALOG:
        print(f"{e.name:30s} {e.reference:34s} {e.expected_validation:12s} {e.notes}")
    if args.export:
        os.makedirs(args.export, exist_ok=True)
        for e in zoo.CATALOG:
            with open(os.path.join(args.export, e.name + ".json"), "w") as fh:
                json.dump(e.build().to_config(), fh, indent=2)
    return 0


def build_parser():
    p = _Parser(prog="conjugate-ifs", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=None, help="cap on worker threads")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, system=True):
        if system:
            sp.add_argument("--system", help="catalog reference NAME[:p1,p2,...]")
            sp.add_argument("--config", help="JSON system configuration")
        sp.add_argument("--tol", type=float, default=1e-9)
        sp.add_argument("--out", default=None)

    sp = sub.add_parser("check", help="validate a system")
    common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("eval", help="evaluate the solution at a point")
    common(sp)
    sp.add_argument("--x", required=True, help="point; comma-separated for 2-D")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("render", help="exact values on a word-endpoint grid (CSV)")
    common(sp)
    sp.add_argument("--depth", type=int, default=12)
    sp.set_defaults(func=cmd_render)

    sp = sub.add_parser("measure", help="chaos-game sample (CSV)")
    common(sp)
    sp.add_argument("--side", choices=("x", "y"), default="x")
    sp.add_argument("--p", default=None)
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--burn-in", type=int, default=None)
    sp.add_argument("--streams", type=int, default=1)
    sp.set_defaults(func=cmd_measure)

    sp = sub.add_parser("holder", help="Hoelder thresholds")
    common(sp)
    sp.add_argument("--p", default=None)
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=42)
    sp.set_defaults(func=cmd_holder)

    sp = sub.add_parser("dim", help="dimension from the transfer density")
    common(sp)
    sp.add_argument("--grid", type=int, default=4096)
    sp.add_argument("--iters", type=int, default=200)
    sp.set_defaults(func=cmd_dim)

    sp = sub.add_parser("probe", help="local exponent trace (CSV)")
    common(sp)
    sp.add_argument("--p", default=None)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--depth", type=int, default=12)
    sp.add_argument("--word", default=None, help="explicit letters, comma-separated")
    sp.set_defaults(func=cmd_probe)

    sp = sub.add_parser("stability", help="Hausdorff-distance experiments")
    common(sp)
    sp.add_argument("--case", choices=("discrete", "deform", "uniform"), required=True)
    sp.add_argument("--n", default=None, help="depths (discrete) or n values (deform)")
    sp.add_argument("--depth", type=int, default=None)
    sp.add_argument("--side", choices=("x", "y"), default="x")
    sp.add_argument("--other", default=None, help="second system for --case uniform")
    sp.set_defaults(func=cmd_stability)

    sp = sub.add_parser("catalog", help="list built-in systems")
    sp.add_argument("--export", default=None, help="directory for JSON configs")
    sp.set_defaults(func=cmd_catalog)
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # usage errors exit 1 (see _Parser.error); --help exits 0
        return exc.code or 0
    if hasattr(args, "depth"):
        args.depth_set = args.depth is not None
        if args.depth is None:
            args.depth = 12
        if args.depth < 1:
            print("error: depth must be >= 1", file=sys.stderr)
            return 1
    if hasattr(args, "tol") and not args.tol > 0:
        print("error: tol must be > 0", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except (ConjugateError, ValueError, KeyError, OSError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
