"""Command line entry point: ``oseenlab <command> --config run.ini --out DIR``."""
from __future__ import annotations

import argparse
import logging
import os
import sys

from .config import RunConfig, load_config, parse_n_list
from .errors import ConfigError
from .pipeline import COMMANDS, EXIT_FAIL, RunState, run_pipeline, write_summary

HELP = {
    "classify": "flatness admissibility of the domain",
    "solve": "Galerkin solve, velocity and density CSVs",
    "decompose": "solve, then split u into grad psi + perp_grad A",
    "regularity": "solve, then transport, lambda and membership report",
    "verify": "solve and run every check",
    "study": "convergence study over the N list",
    "run": "full pipeline: classify, solve, decompose, regularity, verify",
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="oseenlab", description="Slip-boundary compressible Oseen laboratory.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, help=HELP[name])
        sp.add_argument("--config", required=True, metavar="PATH", help="INI run configuration")
        sp.add_argument("--out", default="out", metavar="DIR", help="output directory (default: out)")
        sp.add_argument("--seed", type=int, default=None, metavar="U64", help="override [run] seed")
        sp.add_argument("--n-override", default=None, metavar="LIST", help="override [run] N, e.g. 8,16,32")
        sp.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError("--seed must be an unsigned 64-bit integer")
            cfg = RunConfig(**{**cfg.__dict__, "seed": args.seed})
        if args.n_override:
            cfg = cfg.with_n(parse_n_list(args.n_override, "--n-override"))
    except ConfigError as exc:
        print(f"oseenlab: config error: {exc}", file=sys.stderr)
        os.makedirs(args.out, exist_ok=True)
        write_summary(RunState(args.out), None, args.command, EXIT_FAIL, f"ConfigError: {exc}")
        return EXIT_FAIL
    status = run_pipeline(cfg, args.out, args.command)
    with open(os.path.join(args.out, "summary.txt"), encoding="utf-8") as fh:
        sys.stdout.write(fh.read())
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
