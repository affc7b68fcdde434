"""Command-line entry point: ``maxrand {analytic,simulate,verify,figure}``.

CSV files have one header row and 17-significant-digit floats. Every
simulation output is accompanied by a JSON manifest (sorted keys) that names
the files and records what is needed to replay the run. Relative output
paths are resolved against ``$MAXRAND_OUTDIR`` when it is set.

Exit status: 0 on success or pass, 1 on a failed verification, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, analytic, stats, suites
from .env import GENERATOR_NAME, EnvStream
from .field import MODELS, InitialConfig, simulate

FIG1 = {"p": 0.9, "sites": 10_000, "steps": 1000}
HIST_BINS = 50


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def resolve(path: str) -> Path:
    out = Path(path)
    base = os.environ.get("MAXRAND_OUTDIR")
    if base and not out.is_absolute():
        out = Path(base) / out
    out.parent.mkdir(parents=True, exist_ok=True)
    return out


def emit(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        resolve(path).write_text(text)


def write_manifest(prefix: str, manifest: dict) -> str:
    path = f"{prefix}_manifest.json"
    resolve(path).write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    return path


# argument types; ValueError/ArgumentTypeError become usage errors (exit 2)

def open_unit(text: str) -> float:
    x = float(text)
    if not 0.0 < x < 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in (0, 1)")
    return x


def horizon(text: str):
    if text.lower() in ("inf", "infinity"):
        return analytic.INFINITY
    t = int(text)
    if t < 0:
        raise argparse.ArgumentTypeError("t must be >= 0")
    return t


def grid(text: str) -> np.ndarray:
    """``lo:hi:count`` with both endpoints included."""
    try:
        lo, hi, count = text.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be lo:hi:count, got {text!r}")
    if count < 1 or (count > 1 and not lo <= hi):
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    return np.linspace(lo, hi, count)


def nonneg(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return n


def positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def seed_type(text: str) -> int:
    n = int(text)
    if not 0 <= n < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return n


def init_type(text: str) -> InitialConfig:
    try:
        return InitialConfig.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _levels(args, parser, flag="u"):
    single = getattr(args, flag)
    many = getattr(args, f"{flag}_grid")
    if (single is None) == (many is None):
        parser.error(f"give exactly one of --{flag} or --{flag}-grid")
    levels = np.atleast_1d(single if single is not None else many)
    if not np.all((levels > 0) & (levels < 1)):
        parser.error(f"--{flag} values must lie in (0, 1)")
    return levels


def cmd_analytic(args, parser) -> int:
    if args.what == "phi":
        u = _levels(args, parser)
        text = write_csv(["u", "phi"], zip(u, np.atleast_1d(analytic.phi_t(u, args.p, args.t))))
    elif args.what == "cov":
        if args.u_grid is not None:
            pairs = [(a, b) for a in args.u_grid for b in args.u_grid]
        elif args.u1 is not None and args.u2 is not None:
            pairs = [(args.u1, args.u2)]
        else:
            parser.error("cov needs --u1 and --u2, or --u-grid")
        if not all(0 < a < 1 and 0 < b < 1 for a, b in pairs):
            parser.error("levels must lie in (0, 1)")
        text = write_csv(["u1", "u2", "cov"],
                         ((a, b, analytic.indicator_cov(a, b, args.p)) for a, b in pairs))
    else:
        if args.u is None:
            parser.error("staircase needs --u (the level)")
        x = _levels(args, parser, "x")
        text = write_csv(["x", "F"], zip(x, analytic.stationary_theta_cdf(x, args.u, args.p)))
    emit(text, args.out)
    return 0


def _run_manifest(argv, params, result, outputs) -> dict:
    manifest = {
        "command": list(argv),
        "params": params,
        "generator": GENERATOR_NAME,
        "version": __version__,
        "outputs": outputs,
    }
    if result.trace is not None:
        trace = result.trace
        t = trace.horizon
        last = trace.last_time(t)
        manifest.update({
            "catastrophe_times": list(trace.times),
            "last_catastrophe": last if trace.times else None,
            "age": trace.age(t),
            "elapsed_since_last_catastrophe": t - last,
        })
    return manifest


def _histogram_rows(hist, extra=()):
    edges = hist.edges
    for i, count in enumerate(hist.bins):
        yield (edges[i], edges[i + 1], count, *(col[i] for col in extra))


def cmd_simulate(args, parser, argv) -> int:
    if args.model == "baksneppen" and args.sites < 3:
        parser.error("baksneppen needs --sites >= 3")
    if args.init.kind == "explicit" and len(args.init.value) != args.sites:
        parser.error("explicit --init length must equal --sites")
    stream = EnvStream(args.seed, args.p)
    result = simulate(args.model, args.init, args.sites, args.steps, stream)
    values = result.final.values
    hist = stats.histogram(values, 0.0, 1.0, args.bins)
    hist_path = f"{args.out_prefix}_hist.csv"
    field_path = f"{args.out_prefix}_field.csv"
    emit(write_csv(["bin_lo", "bin_hi", "count"], _histogram_rows(hist)), hist_path)
    emit(write_csv(["site", "fitness"], zip(range(1, values.size + 1), values)), field_path)
    params = {"model": args.model, "p": args.p, "sites": args.sites, "steps": args.steps,
              "seed": args.seed, "init": str(args.init), "bins": args.bins}
    manifest = _run_manifest(argv, params, result, [hist_path, field_path])
    manifest["histogram_overflow"] = hist.overflow
    write_manifest(args.out_prefix, manifest)
    return 0


def cmd_verify(args) -> int:
    kwargs = {k: v for k, v in vars(args).items()
              if k in ("p", "u", "t", "steps", "reps", "seed", "u1", "u2") and v is not None}
    suite = suites.SUITES[args.suite]
    if args.suite == "pgf":
        levels = (kwargs["u"],) if "u" in kwargs else (0.3, 0.5, 0.9)
        probs = (kwargs["p"],) if "p" in kwargs else (0.3, 0.5, 0.9)
        result = suite(levels=levels, probs=probs)
    else:
        accepted = suite.__code__.co_varnames[: suite.__code__.co_argcount]
        result = suite(**{k: v for k, v in kwargs.items() if k in accepted})
    print(result.report())
    return 0 if result.passed else 1


def cmd_figure(args, argv) -> int:
    prefix = args.out_prefix or args.which
    if args.which == "fig2":
        u = np.linspace(0.001, 0.999, 999)
        cols = [u, analytic.phi_t(u, args.p, args.t), analytic.phi(u, args.p)]
        path = f"{prefix}.csv"
        emit(write_csv(["u", f"phi_{args.t}", "phi_inf"], zip(*cols)), path)
        write_manifest(prefix, {"command": list(argv), "version": __version__,
                                "params": {"p": args.p, "t": args.t, "grid": "0.001:0.999:999"},
                                "outputs": [path]})
        return 0
    p, n, steps = FIG1["p"], FIG1["sites"], FIG1["steps"]
    result = simulate("maxrand", InitialConfig.iid_uniform(), n, steps, EnvStream(args.seed, p))
    hist = stats.histogram(result.final.values, 0.0, 1.0, HIST_BINS)
    a = result.trace.age(steps)
    edges = hist.edges
    baseline = np.full(HIST_BINS, n / HIST_BINS)
    conditional = n * (edges[1:] ** a - edges[:-1] ** a)
    path = f"{prefix}_hist.csv"
    emit(write_csv(["bin_lo", "bin_hi", "count", "uniform_baseline", "conditional_expected"],
                   _histogram_rows(hist, (baseline, conditional))), path)
    field_path = f"{prefix}_field.csv"
    emit(write_csv(["site", "fitness"], zip(range(1, n + 1), result.final.values)), field_path)
    params = {"model": "maxrand", "p": p, "sites": n, "steps": steps, "seed": args.seed,
              "init": "iid", "bins": HIST_BINS}
    write_manifest(prefix, _run_manifest(argv, params, result, [path, field_path]))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="maxrand", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"maxrand {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analytic", help="evaluate closed-form laws on a grid")
    pa.add_argument("what", choices=["phi", "cov", "staircase"])
    pa.add_argument("--p", type=open_unit, required=True)
    pa.add_argument("--t", type=horizon, default=analytic.INFINITY,
                    help="integer horizon or 'inf' (default)")
    pa.add_argument("--u", type=open_unit, help="single level (staircase: the chain level)")
    pa.add_argument("--u-grid", type=grid, help="levels as lo:hi:count")
    pa.add_argument("--u1", type=open_unit)
    pa.add_argument("--u2", type=open_unit)
    pa.add_argument("--x", type=open_unit, help="staircase evaluation point")
    pa.add_argument("--x-grid", type=grid, help="staircase evaluation points")
    pa.add_argument("--out", help="output CSV (default: stdout)")

    ps = sub.add_parser("simulate", help="run a site-field simulation")
    ps.add_argument("--model", choices=MODELS, default="maxrand")
    ps.add_argument("--p", type=open_unit, default=0.9)
    ps.add_argument("--sites", type=positive, default=10_000)
    ps.add_argument("--steps", type=nonneg, default=1000)
    ps.add_argument("--seed", type=seed_type, default=0)
    ps.add_argument("--init", type=init_type, default=InitialConfig.iid_uniform(),
                    help="iid | const:C | explicit:a,b,...")
    ps.add_argument("--bins", type=positive, default=HIST_BINS)
    ps.add_argument("--out-prefix", default="run")

    pv = sub.add_parser("verify", help="run a verification suite")
    pv.add_argument("suite", choices=sorted(suites.SUITES))
    pv.add_argument("--p", type=open_unit)
    pv.add_argument("--u", type=open_unit)
    pv.add_argument("--u1", type=open_unit)
    pv.add_argument("--u2", type=open_unit)
    pv.add_argument("--t", type=nonneg)
    pv.add_argument("--steps", type=nonneg)
    pv.add_argument("--reps", type=positive)
    pv.add_argument("--seed", type=seed_type)

    pf = sub.add_parser("figure", help="emit plot-ready data for the two figures")
    pf.add_argument("which", choices=["fig1", "fig2"])
    pf.add_argument("--seed", type=seed_type, default=0)
    pf.add_argument("--p", type=open_unit, default=0.9, help="fig2 only")
    pf.add_argument("--t", type=nonneg, default=4, help="fig2 only")
    pf.add_argument("--out-prefix")
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "analytic":
        return cmd_analytic(args, parser)
    if args.command == "simulate":
        return cmd_simulate(args, parser, argv)
    if args.command == "verify":
        return cmd_verify(args)
    return cmd_figure(args, argv)


if __name__ == "__main__":
    sys.exit(main())
