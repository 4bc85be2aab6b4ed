"""Mechanical quality factor against temperature, split by loss channel.

Writes q_temperature.csv and a log-log SVG, and prints the order in which the
clamping, Akhiezer and Landau-Rumer channels dominate.

    python scripts/q_temperature.py [outdir]
"""
import sys
from pathlib import Path

from spinomech.cli import main as cli_main

CONFIG = Path(__file__).resolve().parent / "configs" / "q_temperature.toml"


def main(outdir="results/q_temperature"):
    return cli_main(["q-temp", "--config", str(CONFIG), "--out", str(outdir), "--format", "svg+csv"])


if __name__ == "__main__":
    raise SystemExit(main(*sys.argv[1:]))
