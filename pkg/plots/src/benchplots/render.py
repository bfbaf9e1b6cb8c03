"""Parse benchmark CSVs and render one throughput chart per workload.

The input contract is the benchmark tool's fixed column set; anything else
is rejected with the offending line number.  Each workload found in the CSV
becomes one line chart of mean throughput against thread count, one series
per backend.  Rendering is deterministic for a given input so that vector
output can be byte-compared across runs.
"""

from __future__ import annotations

import csv
import io
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

CSV_COLUMNS = [
    "backend", "workload", "threads", "duration_s", "initial_vertices",
    "key_range", "die", "acyclic", "seed", "total_ops",
    "throughput_ops_per_s",
]

_INT_FIELDS = ("threads", "initial_vertices", "key_range", "seed", "total_ops")
_FLOAT_FIELDS = ("duration_s", "throughput_ops_per_s")
_BOOL_FIELDS = ("die", "acyclic")

# fixed salt so SVG element ids do not vary run to run
matplotlib.rcParams["svg.hashsalt"] = "benchplots"


class SchemaError(ValueError):
    """The CSV does not match the benchmark schema; carries a line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class PlotJob:
    csv_path: Path
    out_dir: Path
    fmt: str = "png"
    whiskers: bool = False  # add min/max whiskers across repeated rows

    def __post_init__(self):
        if self.fmt not in ("png", "svg"):
            raise ValueError(f"unsupported image format {self.fmt!r}")


def parse_csv(path) -> list[dict]:
    """Read a benchmark CSV, validating the exact column set and row types."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("empty file, expected header", 1) from None
        if header != CSV_COLUMNS:
            raise SchemaError(
                f"header {header!r} does not match {CSV_COLUMNS!r}", 1)
        rows = []
        for lineno, raw in enumerate(reader, start=2):
            if not raw:
                continue
            if len(raw) != len(CSV_COLUMNS):
                raise SchemaError(
                    f"expected {len(CSV_COLUMNS)} fields, got {len(raw)}",
                    lineno)
            row = dict(zip(CSV_COLUMNS, raw))
            try:
                for name in _INT_FIELDS:
                    row[name] = int(row[name])
                for name in _FLOAT_FIELDS:
                    row[name] = float(row[name])
            except ValueError as exc:
                raise SchemaError(str(exc), lineno) from None
            for name in _BOOL_FIELDS:
                if row[name] not in ("true", "false"):
                    raise SchemaError(
                        f"field {name} must be true/false, got {row[name]!r}",
                        lineno)
                row[name] = row[name] == "true"
            rows.append(row)
    return rows


def rows_to_csv_text(rows) -> str:
    """Serialize parsed rows back to the exact on-disk representation."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")  # csv module default
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([
            row["backend"], row["workload"], row["threads"],
            repr(row["duration_s"]), row["initial_vertices"],
            row["key_range"],
            "true" if row["die"] else "false",
            "true" if row["acyclic"] else "false",
            row["seed"], row["total_ops"],
            repr(row["throughput_ops_per_s"]),
        ])
    return buf.getvalue()


def collect_series(rows) -> dict:
    """Group rows into plottable series.

    Returns {workload: {backend: [(threads, mean, lo, hi), ...]}} with the
    per-point statistics taken over every row sharing (workload, backend,
    threads); points are sorted by thread count.
    """
    buckets: dict = {}
    for row in rows:
        key = (row["workload"], row["backend"], row["threads"])
        buckets.setdefault(key, []).append(row["throughput_ops_per_s"])
    series: dict = {}
    for (workload, backend, threads), values in sorted(buckets.items()):
        point = (threads, sum(values) / len(values), min(values), max(values))
        series.setdefault(workload, {}).setdefault(backend, []).append(point)
    return series


def _slug(text: str) -> str:
    return "".join(c if c.isalnum() else "-" for c in text).strip("-")


def render(job: PlotJob) -> list[Path]:
    """Render one image per workload; returns the written paths."""
    rows = parse_csv(job.csv_path)
    series = collect_series(rows)
    if not series:
        print(f"warning: {job.csv_path} holds no data rows; nothing to plot",
              file=sys.stderr)
        return []
    job.out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for workload, backends in series.items():
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        for backend, points in sorted(backends.items()):
            threads = [p[0] for p in points]
            means = [p[1] for p in points]
            if job.whiskers:
                lower = [m - lo for (_, m, lo, _) in points]
                upper = [hi - m for (_, m, _, hi) in points]
                ax.errorbar(threads, means, yerr=[lower, upper],
                            marker="o", capsize=3, label=backend)
            else:
                ax.plot(threads, means, marker="o", label=backend)
        ax.set_xlabel("No of threads")
        ax.set_ylabel("Throughput ops/sec")
        ax.set_title(f"workload: {workload}")
        ax.set_xticks(sorted({p[0] for pts in backends.values() for p in pts}))
        ax.legend()
        ax.grid(True, alpha=0.3)
        out = job.out_dir / f"throughput-{_slug(workload)}.{job.fmt}"
        fig.savefig(out, format=job.fmt, metadata=_stable_metadata(job.fmt))
        plt.close(fig)
        written.append(out)
    return written


def _stable_metadata(fmt: str):
    # strip timestamps so identical inputs give identical bytes
    if fmt == "svg":
        return {"Date": None}
    if fmt == "png":
        return {"Software": None}
    return None
