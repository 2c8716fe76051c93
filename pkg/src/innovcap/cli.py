"""Command-line experiment runner.

    innovcap <subcommand> [--config PATH] [--seed INT] [--out DIR] [--threads INT]

Exit status is 0 on success, 1 when an invariant fails or a module raises,
and 2 for an invalid config.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
import traceback

from . import experiments as ex
from . import records
from .errors import InnovcapError
from .verify import format_table, run_suites

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="innovcap", description="Predictable/innovation capacity experiments.")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in ex.EXPERIMENTS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="YAML or JSON config; keys override the built-in defaults")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", default=None, help="output directory (default: ./out/<subcommand>)")
        p.add_argument("--threads", type=int, default=1)
        if name == "verify":
            p.add_argument("--negative-control", action="store_true",
                           help="count rank with a deliberately wrong threshold; the run must fail")
        if name == "covfit":
            p.add_argument("--planted", action="store_true", help="fit synthetic splits with known coefficients")
    return parser


def _error_report(out, exc: BaseException, experiment: str) -> None:
    payload = {
        "experiment": experiment,
        "error": type(exc).__name__,
        "message": str(exc),
        "traceback": traceback.format_exception(type(exc), exc, exc.__traceback__),
    }
    if out is not None:
        os.makedirs(out, exist_ok=True)
        records.write_json(os.path.join(out, "error.json"), payload)
    print(f"error: {payload['error']}: {payload['message']}", file=sys.stderr)


def run_verify(cfg: dict, out=None) -> int:
    t = time.perf_counter()
    results = run_suites(cfg["seed"], cfg["negative_control"])
    elapsed = time.perf_counter() - t
    print(format_table(results))
    if elapsed > cfg["soft_budget_s"]:
        print(f"warning: verify took {elapsed:.0f} s, over the {cfg['soft_budget_s']:.0f} s budget", file=sys.stderr)
    if out is not None:
        os.makedirs(out, exist_ok=True)
        path = os.path.join(out, "verify.csv")
        records.write_csv(path, ["suite", "passed", "worst", "detail"],
                          ([r.name, r.passed, r.worst, r.detail] for r in results))
        records.write_sidecar(path, cfg, cfg["seed"])
    ok = all(r.passed for r in results)
    print("verify: all suites passed" if ok else "verify: FAILED")
    return EXIT_OK if ok else EXIT_FAIL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    name = args.experiment
    out = args.out if args.out is not None else os.path.join("out", name)
    overrides = {"seed": args.seed}
    if name == "verify" and args.negative_control:
        overrides["negative_control"] = True
    if name == "covfit" and args.planted:
        overrides["planted"] = True
    try:
        raw = ex.load_config(args.config) if args.config else {}
        cfg = ex.resolve_config(name, raw, **overrides)
        if args.threads < 1:
            raise ex.ConfigError("--threads must be at least 1")
    except ex.ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if name == "verify":
        return run_verify(cfg, out)
    try:
        summary = ex.RUNNERS[name](cfg, out, args.threads)
    except (InnovcapError, ArithmeticError, ValueError, RuntimeError) as exc:
        _error_report(out, exc, name)
        return EXIT_FAIL
    print(f"{name}: {'passed' if summary['passed'] else 'FAILED'}; outputs in {out}")
    return EXIT_OK if summary["passed"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
