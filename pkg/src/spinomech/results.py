"""Self-describing result tables with deterministic CSV, JSON and SVG output."""
from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path


FORMATS = ("csv", "json", "svg+csv")


def timestamp() -> str:
    """UTC time from SOURCE_DATE_EPOCH, or "unset"; wall-clock time would break reproducibility."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if not epoch:
        return "unset"
    return datetime.fromtimestamp(int(epoch), tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _plain(v):
    """numpy scalars -> Python scalars so that repr() is stable."""
    return v.item() if hasattr(v, "item") and not isinstance(v, str) else v


def _cell(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def _json_cell(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None if math.isnan(v) else repr(v)
    return v


@dataclass
class ResultTable:
    columns: tuple[str, ...]
    units: tuple[str, ...]
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = tuple(self.columns)
        self.units = tuple(self.units)
        if len(self.units) != len(self.columns):
            raise ValueError("one unit per column")

    def add(self, row: dict) -> None:
        missing = set(self.columns) - set(row)
        extra = set(row) - set(self.columns)
        if missing or extra:
            raise ValueError(f"row mismatch: missing {sorted(missing)}, extra {sorted(extra)}")
        self.rows.append(tuple(_plain(row[c]) for c in self.columns))

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def records(self) -> list[dict]:
        return [dict(zip(self.columns, r)) for r in self.rows]

    def __len__(self):
        return len(self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k, v in self.metadata.items():
            buf.write(f"# {k} = {v}\n")
        buf.write("# units = " + ",".join(self.units) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_cell(v) for v in r])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "metadata": self.metadata,
            "columns": list(self.columns),
            "units": list(self.units),
            "rows": [[_json_cell(v) for v in r] for r in self.rows],
        }
        return json.dumps(doc, indent=1, sort_keys=True, allow_nan=False) + "\n"

    def write(self, outdir, stem: str, fmt: str = "csv", plot=None) -> list[Path]:
        """Write `stem`.csv / .json (and .svg via `plot(table, path)` for svg+csv)."""
        if fmt not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}")
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        written = []
        if fmt in ("csv", "svg+csv"):
            p = outdir / f"{stem}.csv"
            p.write_text(self.to_csv(), encoding="utf-8")
            written.append(p)
        if fmt == "json":
            p = outdir / f"{stem}.json"
            p.write_text(self.to_json(), encoding="utf-8")
            written.append(p)
        if fmt == "svg+csv" and plot is not None:
            p = outdir / f"{stem}.svg"
            plot(self, p)
            written.append(p)
        return written


def read_csv(path) -> ResultTable:
    """Parse a table written by :meth:`ResultTable.to_csv` (cells come back as strings)."""
    meta, units, lines = {}, (), []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("# "):
            k, _, v = line[2:].partition(" = ")
            if k == "units":
                units = tuple(v.split(","))
            else:
                meta[k] = v
        else:
            lines.append(line)
    reader = csv.reader(lines)
    columns = next(reader)
    return ResultTable(columns, units or ("",) * len(columns), [tuple(r) for r in reader], meta)


# ---------------------------------------------------------------------- SVG

def save_svg(fig, path) -> None:
    """Deterministic SVG: fixed id salt and no creation date."""
    import matplotlib

    with matplotlib.rc_context({"svg.hashsalt": "spinomech", "svg.fonttype": "none"}):
        fig.savefig(path, format="svg", metadata={"Date": None})


def line_plot(series, path, xlabel, ylabel, title, logx=True, logy=True) -> None:
    """`series`: iterable of (label, xs, ys). NaNs and non-positive log values are dropped."""
    from matplotlib.figure import Figure

    fig = Figure(figsize=(6.4, 4.4))
    ax = fig.add_subplot()
    for label, xs, ys in series:
        pts = [(x, y) for x, y in zip(xs, ys)
               if math.isfinite(x) and math.isfinite(y) and (not logy or y > 0) and (not logx or x > 0)]
        if pts:
            ax.plot(*zip(*pts), marker=".", label=label)
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    if ax.lines:
        ax.legend(fontsize="small")
    fig.tight_layout()
    save_svg(fig, path)
