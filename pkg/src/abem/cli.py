"""Command line interface.

Five subcommands, one per experiment family plus dataset generation:

    abem convergence  --config cfg.yaml --out runs/conv
    abem static       --config cfg.yaml --out runs/static
    abem sweep        --config cfg.yaml --out runs/sweep
    abem dynamic      --config cfg.yaml --out runs/dyn
    abem gen-synthetic --config cfg.yaml --out data/

Exit codes: 0 on success, 2 on configuration validation failure, 1 on
runtime errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .harness import (
    ConfigError,
    cmd_convergence,
    cmd_dynamic,
    cmd_gen_synthetic,
    cmd_static,
    cmd_sweep,
    load_config,
    resolve_config,
)

_COMMANDS = {
    "convergence": cmd_convergence,
    "static": cmd_static,
    "sweep": cmd_sweep,
    "dynamic": cmd_dynamic,
    "gen-synthetic": cmd_gen_synthetic,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abem",
        description="Adaptive evolutionary influencer seeding experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("convergence", "fixed-budget convergence traces for evolutionary seeders"),
        ("static", "compare all seeders on one static snapshot"),
        ("sweep", "nomination-threshold and budget grid for the adaptive seeder"),
        ("dynamic", "snapshot-sequence comparison with periodic recomputation"),
        ("gen-synthetic", "generate a synthetic (optionally temporal) edge list"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="YAML experiment config")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config's rng_seed")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--resume", action="store_true",
                       help="reuse completed per-cell checkpoints in --out")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rc = resolve_config(load_config(args.config), seed_override=args.seed)
        artifact = _COMMANDS[args.command](rc, Path(args.out), resume=args.resume)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports and exits
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(artifact)
    return 0


if __name__ == "__main__":
    sys.exit(main())
