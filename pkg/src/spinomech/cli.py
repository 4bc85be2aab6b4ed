"""Command-line front end: ``spinomech <subcommand> [options]``.

Exit codes: 0 success, 1 a validation check failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import modefields, sweeps, thermo, validation
from .config import ConfigError, load_config
from .results import FORMATS

EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2

INPUT_ERRORS = (ConfigError, thermo.MaterialFormatError, modefields.FieldFormatError,
                FileNotFoundError, IsADirectoryError)


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML run configuration")
    common.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    common.add_argument("--format", choices=FORMATS, default="csv")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    common.add_argument("--tolerance", type=float, default=None,
                        help="relative tolerance (integrator for sweeps, pass threshold for validate)")

    p = argparse.ArgumentParser(prog="spinomech", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("herald-sweep", parents=[common], help="heralding probability and infidelity grid")
    sub.add_parser("q-temp", parents=[common], help="mechanical Q against temperature")
    sub.add_parser("validate", parents=[common], help="closed form vs. numerics cross-checks")
    c = sub.add_parser("couplings", parents=[common], help="coupling rates from field exports")
    c.add_argument("--volume", help="volume field export (overrides the config)")
    c.add_argument("--surface", help="surface field export (overrides the config)")
    sub.add_parser("geometry", parents=[common], help="concentrator taper outline and cell schedule")
    return p


def _run(args) -> int:
    if args.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    if args.tolerance is not None and not args.tolerance >= 0:
        raise ConfigError("--tolerance must be >= 0")
    cfg = load_config(args.config)
    digest = cfg.digest(command=args.command, tolerance=args.tolerance)
    meta = sweeps.make_metadata(args.command, digest)
    svg = args.format == "svg+csv"

    if args.command == "herald-sweep":
        spec = cfg.sweep_spec(tol=args.tolerance or 1e-7)
        table = sweeps.run_herald_sweep(spec, jobs=args.jobs, metadata=meta)
        paths = table.write(args.out, "herald_sweep", args.format, sweeps.plot_herald)
        bad = sum(1 for r in table.column("reason") if r)
        print(f"{len(table)} grid points, {bad} failed")
    elif args.command == "q-temp":
        table = sweeps.run_q_temperature(cfg.q_temp_spec(), metadata=meta)
        paths = table.write(args.out, "q_temperature", args.format, sweeps.plot_q_temperature)
        print("dominant loss: " + " -> ".join(sweeps.dominant_transitions(table.column("dominant"))))
    elif args.command == "validate":
        table = validation.run_validation(args.tolerance, metadata=meta)
        paths = table.write(args.out, "validation", args.format)
        for rec in table.records():
            status = "PASS" if rec["passed"] else "FAIL"
            print(f"{status} {rec['check']}: error {rec['error']:.3g} (tolerance {rec['tolerance']:.3g})")
        ok = validation.all_passed(table)
        print(f"{sum(table.column('passed'))}/{len(table)} checks passed")
        for p in paths:
            print(f"wrote {p}")
        return EXIT_OK if ok else EXIT_FAILED
    elif args.command == "couplings":
        spec = cfg.couplings
        if args.volume or args.surface:
            import dataclasses
            spec = dataclasses.replace(spec, volume=args.volume or spec.volume,
                                       surface=args.surface or spec.surface)
        table = sweeps.run_couplings(spec, cfg.material.table, metadata=meta)
        paths = table.write(args.out, "couplings", args.format)
    else:
        paths = sweeps.run_geometry(cfg.geometry, args.out, metadata=meta, svg=svg)
    for p in paths:
        print(f"wrote {p}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return _run(args)
    except INPUT_ERRORS as exc:
        print(f"spinomech: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
