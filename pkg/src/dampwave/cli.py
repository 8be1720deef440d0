"""Command-line entry point: ``dampwave <command> [options]``.

Exit codes: 0 success, 1 invalid input, 2 runtime failure, 3 failed check.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import checks
from .config import ExperimentConfig, load_config, validate
from .errors import DampwaveError, ParseError, ValidationError
from .harness import atlas_rows, prediction_text, run_experiment, sweep, write_atlas

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME, EXIT_CHECK = 0, 1, 2, 3


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else validate(ExperimentConfig())
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def _frac_range(spec: str):
    """'lo:hi:count' -> count evenly spaced exact values."""
    lo, hi, count = spec.split(":")
    lo, hi, count = Fraction(lo), Fraction(hi), int(count)
    if count < 2:
        return [lo]
    return [lo + (hi - lo) * k / (count - 1) for k in range(count)]


def cmd_simulate(args) -> int:
    cfg = _config(args)
    res = run_experiment(cfg, args.out)
    out = args.out or cfg.out_dir
    print(f"records: {len(res.records)}  written to {out}")
    print(prediction_text(cfg), end="")
    for name, fit in res.fits.items():
        print(f"{name}: slope {fit.slope:.6g}  verdict {fit.verdict.value}")
    return EXIT_OK


def cmd_classify(args) -> int:
    cfg = _config(args)
    changes = {}
    for key in ("n", "alpha", "p", "lam"):
        value = getattr(args, key)
        if value is not None:
            changes[key] = int(value) if key == "n" else Fraction(value)
    cfg = validate(replace(cfg, **changes))
    print(prediction_text(cfg), end="")
    return EXIT_OK


def cmd_atlas(args) -> int:
    cfg = _config(args)
    ps = _frac_range(args.p_range) if args.p_range else list(cfg.sweep_p)
    lams = _frac_range(args.lambda_range) if args.lambda_range else list(cfg.sweep_lambda)
    if not ps or not lams:
        raise ValidationError("atlas needs p and lambda axes ([sweep] or --p-range/--lambda-range)")
    out = Path(args.out or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = atlas_rows(cfg.n, cfg.alpha, ps, lams)
    write_atlas(rows, out / "atlas.csv")
    print(f"{len(rows)} points written to {out / 'atlas.csv'}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _config(args)
    if not cfg.sweep_p:
        raise ValidationError("sweep needs [sweep] p and lambda axes")
    rows = sweep(cfg, args.out, threads=args.threads)
    failed = sum(1 for r in rows if r["error"])
    print(f"{len(rows)} cells, {failed} with errors")
    return EXIT_OK


def _report(results) -> int:
    for res in results:
        print(res.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK


def cmd_verify_weights(args) -> int:
    cfg = _config(args)
    params = cfg.model_params()
    grid = cfg.grid()
    return _report(checks.weights_suite(params, grid, cfg.epsilon, cfg.delta, cfg.t0, seed=cfg.seed))


def cmd_selftest(args) -> int:
    return _report(checks.kummer_suite() + checks.energetics_suite())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dampwave", description="Damped wave decay experiments")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config file")
    common.add_argument("--out", help="output directory (overrides [output] dir)")
    common.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
    common.add_argument("--seed", type=int, help="seed for randomised checks (default from config, 42)")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="run one experiment").set_defaults(func=cmd_simulate)
    cl = sub.add_parser("classify", parents=[common], help="print the predicted decay rate")
    cl.add_argument("--n", help="space dimension")
    cl.add_argument("--alpha", help="damping exponent (exact fractions allowed)")
    cl.add_argument("--p", help="nonlinear exponent")
    cl.add_argument("--lambda", dest="lam", help="weight exponent of the data")
    cl.set_defaults(func=cmd_classify)
    at = sub.add_parser("atlas", parents=[common], help="classify a (p, lambda) grid into atlas.csv")
    at.add_argument("--p-range", help="lo:hi:count")
    at.add_argument("--lambda-range", help="lo:hi:count")
    at.set_defaults(func=cmd_atlas)
    sub.add_parser("sweep", parents=[common], help="classify (and optionally simulate) the sweep axes").set_defaults(func=cmd_sweep)
    sub.add_parser("verify-weights", parents=[common], help="weight-function inequality battery").set_defaults(func=cmd_verify_weights)
    sub.add_parser("selftest", parents=[common], help="special-function and energy invariant suites").set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (DampwaveError, ArithmeticError, OSError, np.linalg.LinAlgError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
