"""Command-line interface.

    ggbm specfun eval --fn ml --beta 0.5 --x -1
    ggbm sample --process ggbm --beta 0.8 --alpha 1.5 --level 10 --seed 7
    ggbm variation --p 1.3333 --levels 8..14 path.csv
    ggbm discriminate --alpha 1.5 path_000000.csv path_000001.csv
    ggbm sde --driver ggbm --coef linear:0.5 --x0 1 --level 12 --seed 3
    ggbm experiment run onedim.cfg --threads 8 --out results/onedim

Exit codes: 0 success (all checks passed), 1 check failure, 2 usage or
configuration error. ``GGBM_SEED`` sets the default seed.
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from dataclasses import asdict

from . import __version__, specfun
from .discriminate import DiscriminatorConfig, classify_values
from .errors import ConvergenceError, IndexEstimationError, PreconditionError, RangeError
from .experiments import SEED_ENV, ConfigError, ExperimentConfig, load_config, run_experiment
from .pathio import fmt, path_csv_text, read_path_csv, write_path_csv
from .paths import DyadicGrid, ProcessSpec, simulate_ensemble
from .sampling import derive_stream
from .sde import CoefficientSpec, solve_time_changed, solve_young
from .variation import (
    dyadic_sums,
    estimate_index,
    max_subsequence_sums,
    write_profiles_csv,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _default_seed():
    env = os.environ.get(SEED_ENV)
    if env in (None, ""):
        return 1
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def _levels(text):
    """'8..14' or '8,10,12'."""
    try:
        if ".." in text:
            a, b = text.split("..")
            return list(range(int(a), int(b) + 1))
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad level list {text!r}; use 8..14 or 8,10,12") from None


def _coef(text):
    """constant:c | linear:c | affine:a,b | table:FILE:L[:k]"""
    kind, _, rest = text.partition(":")
    kind = kind.lower()
    try:
        if kind == "constant":
            return CoefficientSpec.constant(float(rest))
        if kind == "linear":
            return CoefficientSpec.linear(float(rest))
        if kind == "affine":
            a, b = rest.split(",")
            return CoefficientSpec.affine(float(a), float(b))
        if kind == "table":
            parts = rest.split(":")
            fname, lip = parts[0], float(parts[1])
            k = float(parts[2]) if len(parts) > 2 else 0.0
            with open(fname, newline="") as fh:
                rows = [r for r in csv.reader(fh)][1:]
            return CoefficientSpec.table([float(r[0]) for r in rows], [float(r[1]) for r in rows], lip, k)
    except (ValueError, IndexError, OSError) as exc:
        raise argparse.ArgumentTypeError(f"bad coefficient {text!r}: {exc}") from None
    raise argparse.ArgumentTypeError(
        f"unknown coefficient {text!r}; use constant:c, linear:c, affine:a,b or table:FILE:L[:k]")


def _process_spec(args):
    name = args.process.lower()
    if name == "bm":
        return ProcessSpec.bm()
    if name == "fbm":
        return ProcessSpec.fbm(args.H)
    if name == "ggbm":
        return ProcessSpec.ggbm(args.beta, args.alpha)
    if name == "tcbm":
        return ProcessSpec.tcbm(args.beta, args.alpha)
    raise UsageError(f"process {args.process!r} has no dyadic-grid sampler")


def _emit(text, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_specfun_eval(args):
    fn = args.fn
    if fn in ("ml", "ml-deriv", "mwright", "mwright-survival", "mwright2", "gamma") and not args.x:
        raise UsageError(f"--x is required for --fn {fn}")
    vals = []
    for x in args.x or [None]:
        if fn == "ml":
            v = specfun.mittag_leffler(args.beta, x)
        elif fn == "ml-deriv":
            v = specfun.mittag_leffler_deriv(args.beta, x, args.n)
        elif fn == "mwright":
            v = specfun.m_wright_density(args.beta, x)
        elif fn == "mwright-survival":
            v = specfun.m_wright_survival(args.beta, x)
        elif fn == "mwright2":
            v = specfun.m_wright_two_var(args.beta, x, args.t)
        elif fn == "moment":
            v = specfun.m_wright_moment(args.beta, args.delta)
        elif fn == "mu":
            v = specfun.mu_beta_alpha(args.beta, args.alpha)
        else:  # gamma
            v = specfun.gamma_fn(x)
        vals.append(v)
    sys.stdout.write("".join(fmt(v) + "\n" for v in vals))
    return EXIT_OK


def cmd_sample(args):
    spec = _process_spec(args)
    ens = simulate_ensemble(spec, args.level, args.replicas, args.seed, start=args.start,
                            workers=args.threads)
    paths = ens.paths()
    if args.out is None:
        if len(paths) != 1:
            raise UsageError("--out DIR is required when --replicas > 1")
        sys.stdout.write(path_csv_text(paths[0]))
        return EXIT_OK
    os.makedirs(args.out, exist_ok=True)
    for i, p in enumerate(paths):
        r = args.start + i
        p.meta.update(seed=args.seed, stream=r, replica=r)
        write_path_csv(p, os.path.join(args.out, f"path_{r:06d}.csv"))
    return EXIT_OK


def cmd_variation(args):
    paths = [read_path_csv(f) for f in args.files]
    if args.index:
        rows = []
        for f, p in zip(args.files, paths):
            lo, hi = (args.levels[0], args.levels[-1]) if args.levels else (None, None)
            try:
                est = estimate_index(p, level_range=(lo, hi) if lo is not None else None)
                rows.append([f, fmt(est.v_hat)])
            except IndexEstimationError:
                rows.append([f, "nan"])
        text = "file,v_hat\n" + "".join(",".join(r) + "\n" for r in rows)
        _emit(text, args.out)
        return EXIT_OK
    if not args.p:
        raise UsageError("--p is required unless --index is given")
    outputs = []
    for f, path in zip(args.files, paths):
        levels = args.levels or list(range(1, path.grid.level + 1))
        fn = max_subsequence_sums if args.max else dyadic_sums
        profs = [fn(path, p, levels) for p in args.p]
        buf = io.StringIO()
        write_profiles_csv(profs, buf)
        outputs.append((f, buf.getvalue()))
    if len(outputs) == 1:
        _emit(outputs[0][1], args.out)
    else:
        if not args.out:
            raise UsageError("--out DIR is required with several input files")
        os.makedirs(args.out, exist_ok=True)
        for f, text in outputs:
            base = os.path.splitext(os.path.basename(f))[0]
            with open(os.path.join(args.out, base + ".profile.csv"), "w", newline="") as fh:
                fh.write(text)
    return EXIT_OK


def cmd_discriminate(args):
    cfg = DiscriminatorConfig(args.window, args.eps_s, args.eps_d)
    lines = ["replica,true_class,label,slope_2,slope_2a\n"]
    for i, f in enumerate(args.files):
        p = read_path_csv(f)
        v = classify_values(p.values, args.alpha, cfg)[0]
        true = p.process.kind if p.process is not None else "UNKNOWN"
        lines.append(f"{i},{true},{v.label},{fmt(v.slope_2)},{fmt(v.slope_2a)}\n")
    _emit("".join(lines), args.out)
    return EXIT_OK


def cmd_sde(args):
    grid = DyadicGrid(args.level)
    rng = derive_stream(args.seed, args.stream)
    drift = args.drift
    if args.driver == "tcbm":
        sol = solve_time_changed(args.coef, drift, args.x0, args.beta, args.alpha, grid, rng)
    else:
        spec = ProcessSpec.ggbm(args.beta, args.alpha) if args.driver == "ggbm" else ProcessSpec.fbm(args.H)
        drv = simulate_ensemble(spec, args.level, 1, args.seed, start=args.stream).paths()[0]
        drv.meta.update(seed=args.seed, stream=args.stream)
        sol = solve_young(args.coef, drift, args.x0, drv, allow_outside_regime=args.allow_outside_regime)
        sol.path.meta["regime"] = sol.regime
        if sol.regime != "proven regime":
            print(f"warning: {sol.regime}", file=sys.stderr)
    if args.out:
        write_path_csv(sol.path, args.out)
    else:
        sys.stdout.write(path_csv_text(sol.path))
    return EXIT_OK


def cmd_experiment_run(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.replicas is not None:
        cfg.replicas = args.replicas
    if args.threads is not None:
        cfg.threads = args.threads
    if args.out is not None:
        cfg.out = args.out
    if cfg.out is None:
        cfg.out = os.path.join("results", cfg.kind)
    cfg = ExperimentConfig(**asdict(cfg))  # re-validate after overrides
    report = run_experiment(cfg)
    for c in report.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}")
    print(f"{cfg.kind}: {'PASS' if report.passed else 'FAIL'} -> {cfg.out}")
    return EXIT_OK if report.passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="ggbm", description="ggBm / time-changed Bm toolkit")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        if seed:
            p.add_argument("--seed", type=int, default=None, help=f"default from ${SEED_ENV} or 1")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--out", default=None)

    sf = sub.add_parser("specfun", help="special functions")
    sfs = sf.add_subparsers(dest="action", required=True)
    ev = sfs.add_parser("eval", help="evaluate a special function")
    ev.add_argument("--fn", default="ml",
                    choices=["ml", "ml-deriv", "mwright", "mwright-survival", "mwright2",
                             "moment", "mu", "gamma"])
    ev.add_argument("--beta", type=float, default=0.5)
    ev.add_argument("--x", type=float, nargs="+")
    ev.add_argument("--n", type=int, default=0, help="derivative order")
    ev.add_argument("--t", type=float, default=1.0)
    ev.add_argument("--alpha", type=float, default=1.5)
    ev.add_argument("--delta", type=float, default=1.0)
    ev.set_defaults(func=cmd_specfun_eval)

    sp = sub.add_parser("sample", help="simulate paths and write CSVs")
    sp.add_argument("--process", required=True, choices=["bm", "fbm", "ggbm", "tcbm"])
    sp.add_argument("--beta", type=float, default=0.8)
    sp.add_argument("--alpha", type=float, default=1.5)
    sp.add_argument("--H", type=float, default=0.75)
    sp.add_argument("--level", type=int, default=10)
    sp.add_argument("--replicas", type=int, default=1)
    sp.add_argument("--start", type=int, default=0, help="first replica index")
    common(sp)
    sp.set_defaults(func=cmd_sample)

    va = sub.add_parser("variation", help="p-variation profiles or index estimates of path CSVs")
    va.add_argument("files", nargs="+")
    va.add_argument("--p", type=float, action="append")
    va.add_argument("--levels", type=_levels)
    va.add_argument("--max", action="store_true", help="exact subsequence maximum (level <= 12)")
    va.add_argument("--index", action="store_true", help="estimate the variation index")
    common(va, seed=False)
    va.set_defaults(func=cmd_variation)

    di = sub.add_parser("discriminate", help="classify path CSVs as GGBM / TCBM")
    di.add_argument("files", nargs="+")
    di.add_argument("--alpha", type=float, required=True)
    di.add_argument("--beta", type=float, default=0.8)
    d = DiscriminatorConfig()
    di.add_argument("--window", type=int, default=d.window)
    di.add_argument("--eps-s", type=float, default=d.eps_s)
    di.add_argument("--eps-d", type=float, default=d.eps_d)
    common(di, seed=False)
    di.set_defaults(func=cmd_discriminate)

    sd = sub.add_parser("sde", help="solve an SDE along a simulated driver")
    sd.add_argument("--driver", required=True, choices=["ggbm", "fbm", "tcbm"])
    sd.add_argument("--coef", type=_coef, required=True)
    sd.add_argument("--drift", type=_coef, default=None)
    sd.add_argument("--x0", type=float, default=1.0)
    sd.add_argument("--beta", type=float, default=0.8)
    sd.add_argument("--alpha", type=float, default=1.5)
    sd.add_argument("--H", type=float, default=0.75)
    sd.add_argument("--level", type=int, default=12)
    sd.add_argument("--stream", type=int, default=0)
    sd.add_argument("--allow-outside-regime", action="store_true")
    common(sd)
    sd.set_defaults(func=cmd_sde)

    ex = sub.add_parser("experiment", help="run a configured experiment")
    exs = ex.add_subparsers(dest="action", required=True)
    run = exs.add_parser("run", help="run the experiment in a config file")
    run.add_argument("config")
    run.add_argument("--replicas", type=int, default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--threads", type=int, default=None)
    run.add_argument("--out", default=None)
    run.set_defaults(func=cmd_experiment_run)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if hasattr(args, "seed") and args.seed is None and args.command != "experiment":
            args.seed = _default_seed()
        if getattr(args, "threads", None) is not None and args.threads < 1:
            raise UsageError("--threads must be >= 1")
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"ggbm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, PreconditionError, RangeError, ConvergenceError, OSError) as exc:
        print(f"ggbm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
