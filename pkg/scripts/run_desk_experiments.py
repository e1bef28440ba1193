#!/usr/bin/env python3
"""Run the four experiment families at desk scale.

Each family maps to one CLI command and one config under configs/.
Results land under the chosen output root, one directory per family,
with results.csv, config_used.yaml, and per-generation traces where
the command produces them. A fixed seed makes the whole sweep
reproducible; pass --seed to try another one.

Usage:
    python3 scripts/run_desk_experiments.py [--out runs] [--seed N] [--resume]
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from abem.cli import main as cli_main

REPO = Path(__file__).resolve().parent.parent

FAMILIES = (
    ("convergence", "convergence_small.yaml"),
    ("static", "static_small.yaml"),
    ("sweep", "sweep_small.yaml"),
    ("dynamic", "dynamic_small.yaml"),
    ("gen-synthetic", "gen_synthetic.yaml"),
)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="runs", help="output root (default: runs)")
    parser.add_argument("--seed", type=int, default=None, help="override rng_seed")
    parser.add_argument("--resume", action="store_true",
                        help="reuse finished cells from a previous run")
    args = parser.parse_args(argv)

    out_root = Path(args.out)
    for command, config_name in FAMILIES:
        config = REPO / "configs" / config_name
        out_dir = out_root / command.replace("-", "_")
        cli_args = ["--config", str(config), "--out", str(out_dir)]
        if args.seed is not None:
            cli_args += ["--seed", str(args.seed)]
        if args.resume:
            cli_args.append("--resume")
        print(f"== {command} -> {out_dir}", flush=True)
        t0 = time.perf_counter()
        code = cli_main([command, *cli_args])
        print(f"   done in {time.perf_counter() - t0:.1f}s", flush=True)
        if code != 0:
            print(f"{command} failed with exit code {code}", file=sys.stderr)
            return code
    print(f"all families complete under {out_root}/")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
