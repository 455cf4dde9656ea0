"""Command-line entry point.

Exit codes: 0 success (EASY for classify), 1 HARD, 2 indeterminate,
3 solve asked on a HARD pair, 64 usage or parse error, 65 invalid stream.
"""
from __future__ import annotations

import argparse
import json
import secrets
import sys
from fractions import Fraction
from pathlib import Path

from . import analysis, formats, genhard, polarize, separability, stream_solver
from .core import CSPError, TruthTable, opt_value
from .events import TurnstileError, to_instance

EXIT_OK, EXIT_HARD, EXIT_INDETERMINATE, EXIT_SOLVE_HARD = 0, 1, 2, 3
EXIT_USAGE, EXIT_DATA = 64, 65


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _truth_table(bits: str, k: int | None) -> TruthTable:
    try:
        f = TruthTable.from_bits(bits, k)
    except CSPError as e:
        raise UsageError(str(e)) from None
    if k is not None and f.k != k:
        raise UsageError(f"--f has {len(bits)} bits but --k is {k}")
    return f


def _rat(text: str) -> Fraction:
    try:
        return formats.parse_rational(text)
    except formats.FormatError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _vec(x) -> list[str]:
    return [formats.fmt_rational(v) for v in x]


def _emit(obj: dict, out=None) -> None:
    print(json.dumps(obj), file=out or sys.stdout)


def _seed(args) -> int:
    return args.seed if args.seed is not None else secrets.randbits(63)


def _tol(args) -> Fraction:
    return args.tol if args.tol is not None else separability.DEFAULT_TOL


# ---------------------------------------------------------------- commands

def cmd_classify(args) -> int:
    f = _truth_table(args.f, args.k)
    v = separability.decide(f, args.gamma, args.beta, _tol(args))
    if isinstance(v, separability.Easy):
        _emit({"verdict": "EASY", "lambda": _vec(v.lam), "tau_Y": str(v.tau_Y),
               "tau_N": str(v.tau_N)})
        return EXIT_OK
    _emit({"verdict": "HARD", "mu": _vec(v.mu), "slack": str(v.slack),
           "D_Y": _vec(v.D_Y.p), "D_N": _vec(v.D_N.p)})
    return EXIT_HARD


def _solver_config(args, f, seed):
    if args.lam is not None:
        if args.tau_y is None or args.tau_n is None:
            raise UsageError("--lambda needs --tau-y and --tau-n")
        lam = [_rat(t) for t in args.lam.split(",")]
        return stream_solver.ClassifierConfig(lam, args.tau_y, args.tau_n,
                                              repetitions=args.reps, seed=seed)
    v = separability.decide(f, args.gamma, args.beta, _tol(args))
    if isinstance(v, separability.Hard):
        return None
    return stream_solver.ClassifierConfig.from_verdict(v, repetitions=args.reps, seed=seed)


def cmd_solve(args) -> int:
    f = _truth_table(args.f, args.k)
    stream = formats.read_stream(args.stream)
    if stream.k != f.k:
        raise UsageError("stream arity differs from --f")
    seed = _seed(args)
    cfg = _solver_config(args, f, seed)
    if cfg is None:
        print("the (gamma, beta) pair is HARD; no streaming classifier exists", file=sys.stderr)
        return EXIT_SOLVE_HARD
    base = {"lambda": _vec(cfg.lam), "tau_Y": str(cfg.tau_Y), "tau_N": str(cfg.tau_N),
            "threshold": str(cfg.threshold)}
    if args.exact:
        psi = to_instance(stream, f)
        if psi.total_weight == 0:
            raise TurnstileError("stream has zero total weight")
        B = stream_solver.exact_bias(psi, cfg.lam)[1]
        _emit({"verdict": cfg.verdict(B), "mode": "exact", "B": str(B),
               "W": str(psi.total_weight), **base})
        return EXIT_OK
    try:
        res = stream_solver.classify_stream(stream, cfg)
    except TurnstileError:
        raise
    except CSPError as e:
        raise TurnstileError(str(e)) from None
    _emit({"verdict": res.verdict, "mode": "sketch", "B": res.B, "W": res.W,
           "seed": seed, "repetitions": cfg.repetitions, **base})
    return EXIT_OK


def _mask(spec: str, k: int):
    if "=" in spec and not Path(spec).exists():
        return formats.parse_inline_dist(spec, k)
    D = formats.read_dist(spec)
    if D.k != k:
        raise UsageError("mask distribution arity differs from --k")
    return D


def cmd_gen(args) -> int:
    seed = _seed(args)
    mask = _mask(args.mask, args.k)
    pad = _mask(args.pad, args.k) if args.pad else None
    alpha = args.alpha if args.alpha is not None else genhard.default_alpha(args.n, args.k)
    T = 1 if args.mode == "rmd" else args.T
    tau = args.tau if args.mode == "padded" else Fraction(0)
    try:
        params = genhard.GenParams(args.n, args.k, alpha, T, mask, pad, tau, seed)
    except CSPError as e:
        raise UsageError(str(e)) from None
    gen = genhard.gen_padded(params) if args.mode == "padded" else genhard.gen_streaming_rmd(params)
    formats.write_stream(gen.stream, args.out)
    if args.meta:
        Path(args.meta).write_text(
            "\n".join(formats.meta_lines(gen, params, not args.hide_planted)) + "\n")
    _emit({"out": str(args.out), "events": len(gen.stream), "seed": seed})
    return EXIT_OK


def cmd_polarize(args) -> int:
    A = polarize.NonnegFn.from_dist(formats.read_dist(args.dist, normalized=not args.unnormalized))
    trace = polarize.polarize_full(A)
    if args.out:
        with open(args.out, "w") as fh:
            formats.write_trace(trace, fh)
    else:
        formats.write_trace(trace, sys.stdout)
    return EXIT_OK


def cmd_analyze(args) -> int:
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        if args.preset == "2and" or args.f is None:
            f = analysis.TWO_AND
            rows = analysis.two_and_curves(args.curve_step, oracle=not args.no_oracle)
            analysis.write_curves_csv(rows, out)
        else:
            f = _truth_table(args.f, args.k)
            grid = analysis.mu_grid(args.curve_step)
            analysis.write_ratio_csv(analysis.ratio_curve(f, grid), out)
        r = separability.approx_ratio(f, args.grid)
    finally:
        if args.out:
            out.close()
    _emit({"alpha": str(r.alpha), "alpha_float": float(r.alpha), "beta": str(r.beta),
           "beta_float": float(r.beta), "grid": str(args.grid)}, sys.stderr)
    return EXIT_OK


def cmd_brute(args) -> int:
    f = _truth_table(args.f, args.k)
    psi = to_instance(formats.read_stream(args.instance), f)
    if psi.total_weight == 0:
        raise TurnstileError("instance has zero total weight")
    val, sigma = opt_value(f, psi)
    _emit({"val": str(val), "val_float": float(val),
           "assignment": "".join("+" if s > 0 else "-" for s in sigma)})
    return EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="streamcsp", description="Streaming Max-CSP dichotomy toolkit")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def fk(sp, k_required=False):
        sp.add_argument("--f", required=True, help="truth table bits, index 0 = (-1,...,-1)")
        sp.add_argument("--k", type=int, required=k_required)

    c = sub.add_parser("classify", help="decide EASY or HARD for (gamma, beta)")
    fk(c)
    c.add_argument("--gamma", type=_rat, required=True)
    c.add_argument("--beta", type=_rat, required=True)
    c.add_argument("--tol", type=_rat)
    c.set_defaults(run=cmd_classify)

    s = sub.add_parser("solve", help="run the bias classifier on a stream file")
    fk(s)
    s.add_argument("--gamma", type=_rat, required=True)
    s.add_argument("--beta", type=_rat, required=True)
    s.add_argument("--stream", required=True)
    s.add_argument("--exact", action="store_true", help="exact bias instead of sketches")
    s.add_argument("--seed", type=int)
    s.add_argument("--reps", type=int, default=stream_solver.DEFAULT_REPETITIONS)
    s.add_argument("--lambda", dest="lam")
    s.add_argument("--tau-y", type=_rat)
    s.add_argument("--tau-n", type=_rat)
    s.add_argument("--tol", type=_rat)
    s.set_defaults(run=cmd_solve)

    g = sub.add_parser("gen", help="generate an RMD-based instance stream")
    g.add_argument("--mode", choices=("rmd", "streaming", "padded"), required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--alpha", type=_rat)
    g.add_argument("--T", type=int, default=1)
    g.add_argument("--mask", required=True, help="DIST file or inline '11=1/2,00=1/2'")
    g.add_argument("--pad", help="padding distribution (padded mode)")
    g.add_argument("--tau", type=_rat, default=Fraction(0))
    g.add_argument("--seed", type=int)
    g.add_argument("--out", required=True)
    g.add_argument("--meta", help="JSON-lines metadata sidecar")
    g.add_argument("--hide-planted", action="store_true")
    g.set_defaults(run=cmd_gen)

    z = sub.add_parser("polarize", help="polarize a distribution to its canonical form")
    z.add_argument("--dist", required=True)
    z.add_argument("--unnormalized", action="store_true", help="accept any nonnegative masses")
    z.add_argument("--out")
    z.set_defaults(run=cmd_polarize)

    a = sub.add_parser("analyze", help="threshold curves and approximation ratio")
    a.add_argument("--preset", choices=("2and",))
    a.add_argument("--f")
    a.add_argument("--k", type=int)
    a.add_argument("--grid", type=_rat, default=Fraction(1, 720), help="beta grid step")
    a.add_argument("--curve-step", type=_rat, default=Fraction(1, 100))
    a.add_argument("--no-oracle", action="store_true")
    a.add_argument("--out")
    a.set_defaults(run=cmd_analyze)

    b = sub.add_parser("brute", help="exact optimum of a small instance")
    fk(b)
    b.add_argument("--instance", required=True)
    b.set_defaults(run=cmd_brute)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.cmd == "analyze" and args.preset is None and args.f is None:
            raise UsageError("analyze needs --preset 2and or --f")
        return args.run(args)
    except UsageError as e:
        print(f"streamcsp: {e}", file=sys.stderr)
        return EXIT_USAGE
    except formats.FormatError as e:
        print(f"streamcsp: parse error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except TurnstileError as e:
        print(f"streamcsp: invalid stream: {e}", file=sys.stderr)
        return EXIT_DATA
    except separability.Indeterminate as e:
        print(f"streamcsp: indeterminate: {e} (slack {e.slack})", file=sys.stderr)
        return EXIT_INDETERMINATE
    except CSPError as e:
        print(f"streamcsp: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
