"""Regenerate the bundled synthetic Gaussian-mode field export.

The fixture is analytic (see spinomech.modefields.gaussian_fixture): a
25 x 20 x 20 grid at 40 nm spacing with sigma = 100 nm, plus a 500-sample
top facet. Output is byte-stable, so re-running it must not change git status.

    python scripts/make_gaussian_fixture.py [outdir]
"""
import sys
from pathlib import Path

from spinomech.modefields import gaussian_fixture, write_field_export

DEFAULT_DIR = Path(__file__).resolve().parents[1] / "src" / "spinomech" / "data"


def main(outdir=DEFAULT_DIR):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    write_field_export(gaussian_fixture(), outdir / "gaussian_volume.csv",
                       outdir / "gaussian_surface.csv")
    print(f"wrote {outdir / 'gaussian_volume.csv'} and {outdir / 'gaussian_surface.csv'}")


if __name__ == "__main__":
    main(*sys.argv[1:])
