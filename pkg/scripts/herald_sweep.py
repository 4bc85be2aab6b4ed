"""Heralding probability and single-phonon infidelity over pulse length.

Runs the herald sweep in configs/herald_sweep.toml and writes CSV plus an SVG
(log pulse length against P and 1-F).

    python scripts/herald_sweep.py [outdir] [--jobs N]
"""
import argparse
from pathlib import Path

from spinomech.cli import main as cli_main

HERE = Path(__file__).resolve().parent


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("outdir", nargs="?", default="results/herald_sweep")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--config", default=str(HERE / "configs" / "herald_sweep.toml"))
    args = p.parse_args(argv)
    return cli_main(["herald-sweep", "--config", args.config, "--out", args.outdir,
                     "--format", "svg+csv", "--jobs", str(args.jobs)])


if __name__ == "__main__":
    raise SystemExit(main())
