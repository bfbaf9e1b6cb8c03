"""Throughput benchmark: threads drive a workload mix over a shared graph.

A run pre-populates a complete graph, spawns a fixed number of worker
threads, lets each perform randomly drawn operations until a deadline, and
reports completed operations per second.  Op streams are deterministic given
the seed (each worker draws from its own seeded generator); wall-clock
throughput of course is not.  Results can be appended to a CSV consumed by
the plotting frontend.
"""

from __future__ import annotations

import argparse
import csv
import os
import random
import sys
import time
from dataclasses import dataclass, field
from threading import Event, Thread

from . import core
from .acyclic import AcyclicGraph
from .backends import BackendKind
from .core import abg_snapshot, is_acyclic
from .graph import ConcurrentGraph
from .history import HistoryRecorder, RecordingGraph

METHOD_ORDER = (
    core.ADD_VERTEX,
    core.REMOVE_VERTEX,
    core.CONTAINS_VERTEX,
    core.ADD_EDGE,
    core.REMOVE_EDGE,
    core.CONTAINS_EDGE,
)

CSV_COLUMNS = [
    "backend", "workload", "threads", "duration_s", "initial_vertices",
    "key_range", "die", "acyclic", "seed", "total_ops",
    "throughput_ops_per_s",
]


@dataclass(frozen=True)
class WorkloadSpec:
    """Percentages for the six graph methods; must sum to exactly 100."""

    add_vertex: int
    remove_vertex: int
    contains_vertex: int
    add_edge: int
    remove_edge: int
    contains_edge: int

    def __post_init__(self):
        pcts = self.percentages()
        if any(p < 0 for p in pcts):
            raise ValueError("workload percentages must be non-negative")
        if sum(pcts) != 100:
            raise ValueError(f"workload percentages sum to {sum(pcts)}, not 100")

    def percentages(self) -> tuple:
        return (self.add_vertex, self.remove_vertex, self.contains_vertex,
                self.add_edge, self.remove_edge, self.contains_edge)

    def cumulative(self) -> list:
        out, acc = [], 0
        for p in self.percentages():
            acc += p
            out.append(acc)
        return out


NAMED_WORKLOADS = {
    # update-dominated: heavy vertex/edge insertion with some lookups
    "update": WorkloadSpec(25, 10, 15, 25, 10, 15),
    # contains-dominated: 80% lookups
    "contains": WorkloadSpec(7, 3, 40, 7, 3, 40),
    # edge-updates: nothing but edge insertion/removal
    "edges": WorkloadSpec(0, 0, 0, 50, 50, 0),
}


def parse_workload(text: str) -> tuple[str, WorkloadSpec]:
    """Parse a named workload or ``custom:a,b,c,d,e,f``."""
    if text in NAMED_WORKLOADS:
        return text, NAMED_WORKLOADS[text]
    if text.startswith("custom:"):
        parts = text[len("custom:"):].split(",")
        if len(parts) != 6:
            raise ValueError("custom workload needs 6 comma-separated percentages")
        return text, WorkloadSpec(*(int(p) for p in parts))
    raise ValueError(f"unknown workload {text!r}")


def sample_op(spec: WorkloadSpec, rng: random.Random, key_range: int):
    """Draw one (method, args) pair per the workload distribution."""
    roll = rng.random() * 100.0
    cum = spec.cumulative()
    idx = 0
    while roll >= cum[idx]:
        idx += 1
    method = METHOD_ORDER[idx]
    if idx < 3:
        return method, (rng.randint(1, key_range),)
    return method, (rng.randint(1, key_range), rng.randint(1, key_range))


@dataclass(frozen=True)
class BenchConfig:
    backend: BackendKind = BackendKind.LAZY
    workload_name: str = "update"
    workload: WorkloadSpec = NAMED_WORKLOADS["update"]
    threads: int = 4
    duration: float = 2.0
    initial_vertices: int = 32
    key_range: int = 64
    die: bool = False
    acyclic: bool = False
    seed: int = 1
    repeats: int = 3

    def validate(self) -> None:
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        if not 0 <= self.initial_vertices <= self.key_range:
            raise ValueError("initial_vertices must lie within the key range")
        if self.acyclic and BackendKind(self.backend) is not BackendKind.LAZY:
            raise ValueError("the acyclic variant is built on the lazy backend")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")


@dataclass
class BenchResult:
    config: BenchConfig
    total_ops: int  # mean completed ops per repeat
    throughput: float  # mean ops per second across repeats
    per_method: dict = field(default_factory=dict)

    def csv_row(self) -> dict:
        cfg = self.config
        return {
            "backend": BackendKind(cfg.backend).value,
            "workload": cfg.workload_name,
            "threads": cfg.threads,
            "duration_s": repr(float(cfg.duration)),
            "initial_vertices": cfg.initial_vertices,
            "key_range": cfg.key_range,
            "die": "true" if cfg.die else "false",
            "acyclic": "true" if cfg.acyclic else "false",
            "seed": cfg.seed,
            "total_ops": self.total_ops,
            "throughput_ops_per_s": repr(float(self.throughput)),
        }


def make_graph(cfg: BenchConfig):
    if cfg.acyclic:
        return AcyclicGraph(delete_incoming_edges=cfg.die)
    return ConcurrentGraph(cfg.backend, delete_incoming_edges=cfg.die)


def prepopulate(graph, cfg: BenchConfig) -> None:
    """Build the initial complete graph on keys 1..initial_vertices.

    The acyclic variant gets every forward pair (i -> j for i < j), the
    densest graph it can hold without cycles.
    """
    n = cfg.initial_vertices
    for k in range(1, n + 1):
        graph.add_vertex(k)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                continue
            if cfg.acyclic:
                if i < j:
                    graph.acyclic_add_edge(i, j)
            else:
                graph.add_edge(i, j)


def _dispatch_table(graph, acyclic: bool) -> dict:
    if acyclic:
        return {
            core.ADD_VERTEX: graph.add_vertex,
            core.REMOVE_VERTEX: graph.remove_vertex,
            core.CONTAINS_VERTEX: graph.contains_vertex,
            core.ADD_EDGE: graph.acyclic_add_edge,
            core.REMOVE_EDGE: graph.acyclic_remove_edge,
            core.CONTAINS_EDGE: graph.acyclic_contains_edge,
        }
    return {
        core.ADD_VERTEX: graph.add_vertex,
        core.REMOVE_VERTEX: graph.remove_vertex,
        core.CONTAINS_VERTEX: graph.contains_vertex,
        core.ADD_EDGE: graph.add_edge,
        core.REMOVE_EDGE: graph.remove_edge,
        core.CONTAINS_EDGE: graph.contains_edge,
    }


def _run_once(cfg: BenchConfig, repeat_index: int):
    graph = make_graph(cfg)
    prepopulate(graph, cfg)
    dispatch = _dispatch_table(graph, cfg.acyclic)
    counts = [dict.fromkeys(METHOD_ORDER, 0) for _ in range(cfg.threads)]
    start = Event()

    def worker(widx: int) -> None:
        rng = random.Random(cfg.seed * 1_000_003 + repeat_index * 1009 + widx)
        mine = counts[widx]
        spec = cfg.workload
        key_range = cfg.key_range
        start.wait()
        deadline = time.monotonic() + cfg.duration
        while time.monotonic() < deadline:
            method, args = sample_op(spec, rng, key_range)
            dispatch[method](*args)
            mine[method] += 1

    threads = [Thread(target=worker, args=(w,)) for w in range(cfg.threads)]
    for t in threads:
        t.start()
    start.set()
    for t in threads:
        t.join()
    graph.validate()  # post-run quiescent structural check
    if cfg.acyclic:
        assert is_acyclic(graph.added_edges_physical()), "cycle in committed edges"
        assert is_acyclic(abg_snapshot(graph).edges), "cycle in abstract edges"
    merged = dict.fromkeys(METHOD_ORDER, 0)
    for c in counts:
        for m, v in c.items():
            merged[m] += v
    return merged


def run_bench(cfg: BenchConfig) -> BenchResult:
    """Run the configured benchmark, averaging over ``cfg.repeats`` runs."""
    cfg.validate()
    totals = []
    merged_counts = dict.fromkeys(METHOD_ORDER, 0)
    for rep in range(cfg.repeats):
        counts = _run_once(cfg, rep)
        totals.append(sum(counts.values()))
        for m, v in counts.items():
            merged_counts[m] += v
    mean_ops = sum(totals) / len(totals)
    per_method = {m: v / cfg.repeats for m, v in merged_counts.items()}
    return BenchResult(
        config=cfg,
        total_ops=int(round(mean_ops)),
        throughput=mean_ops / cfg.duration,
        per_method=per_method,
    )


def record_history_run(cfg: BenchConfig, ops_per_thread: int = 4):
    """Short recorded run for linearizability checking.

    Returns the merged history; op counts are deliberately tiny because the
    checker's search is exponential in history length.  The pre-population is
    recorded too (as a sequential "setup" thread), so the history replays
    from the empty graph and the file is self-contained.
    """
    cfg.validate()
    graph = make_graph(cfg)
    recorder = HistoryRecorder()
    recording = RecordingGraph(graph, recorder, acyclic=cfg.acyclic)
    n = cfg.initial_vertices
    for k in range(1, n + 1):
        recording.add_vertex(k, thread="setup")
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j and (not cfg.acyclic or i < j):
                recording.add_edge(i, j, thread="setup")
    # RecordingGraph exposes the plain method names for both variants.
    dispatch = _dispatch_table(recording, acyclic=False)

    def worker(widx: int) -> None:
        rng = random.Random(cfg.seed * 999_983 + widx)
        for _ in range(ops_per_thread):
            method, args = sample_op(cfg.workload, rng, cfg.key_range)
            dispatch[method](*args)

    threads = [Thread(target=worker, args=(w,), name=f"T{w}")
               for w in range(cfg.threads)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    return recorder.history()


def emit_csv(results, path) -> None:
    """Write results as CSV with the fixed column set."""
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
            writer.writeheader()
            for res in results:
                writer.writerow(res.csv_row())
    except OSError as exc:
        raise OSError(f"cannot write benchmark CSV to {path}: {exc}") from exc


def append_csv(result: BenchResult, path) -> None:
    """Append one result, writing the header only when the file is new.

    This is what the CLI uses so that shell-driven sweeps can accumulate
    rows into a single file.
    """
    fresh = not os.path.exists(path) or os.path.getsize(path) == 0
    try:
        with open(path, "a", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
            if fresh:
                writer.writeheader()
            writer.writerow(result.csv_row())
    except OSError as exc:
        raise OSError(f"cannot write benchmark CSV to {path}: {exc}") from exc


def parse_csv(path):
    """Read back rows written by :func:`emit_csv` with typed fields."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV columns in {path}: {reader.fieldnames}")
        for row in reader:
            rows.append({
                "backend": row["backend"],
                "workload": row["workload"],
                "threads": int(row["threads"]),
                "duration_s": float(row["duration_s"]),
                "initial_vertices": int(row["initial_vertices"]),
                "key_range": int(row["key_range"]),
                "die": row["die"] == "true",
                "acyclic": row["acyclic"] == "true",
                "seed": int(row["seed"]),
                "total_ops": int(row["total_ops"]),
                "throughput_ops_per_s": float(row["throughput_ops_per_s"]),
            })
    return rows


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="concgraph-bench",
        description="Throughput benchmark for the concurrent graph backends.",
    )
    parser.add_argument("--backend", choices=[k.value for k in BackendKind],
                        default="lazy")
    parser.add_argument("--workload", default="update",
                        help="update | contains | edges | custom:a,b,c,d,e,f")
    parser.add_argument("--threads", type=int, default=4)
    parser.add_argument("--duration", type=float, default=2.0,
                        help="seconds per repeat")
    parser.add_argument("--initial-vertices", type=int, default=32)
    parser.add_argument("--key-range", type=int, default=64)
    parser.add_argument("--die", action="store_true",
                        help="delete incoming edges on vertex removal")
    parser.add_argument("--acyclic", action="store_true",
                        help="benchmark the acyclicity-preserving variant")
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--csv", metavar="PATH",
                        help="append-style CSV output path")
    parser.add_argument("--record-history", metavar="PATH",
                        help="record a short history instead of a timed run")
    args = parser.parse_args(argv)

    try:
        name, workload = parse_workload(args.workload)
        initial = args.initial_vertices
        if args.record_history:
            # recorded histories must stay small enough to check
            reduced = min(initial, 6, args.key_range)
            if reduced != initial:
                print(f"note: initial vertices reduced to {reduced} "
                      "for history recording")
            initial = reduced
        cfg = BenchConfig(
            backend=BackendKind(args.backend),
            workload_name=name,
            workload=workload,
            threads=args.threads,
            duration=args.duration,
            initial_vertices=initial,
            key_range=args.key_range,
            die=args.die,
            acyclic=args.acyclic,
            seed=args.seed,
            repeats=args.repeats,
        )
        cfg.validate()
    except ValueError as exc:
        parser.error(str(exc))

    if args.record_history:
        history = record_history_run(cfg)
        history.dump(args.record_history)
        print(f"recorded {len(history.ops())} ops to {args.record_history}")
        return 0

    result = run_bench(cfg)
    print(f"backend={cfg.backend.value} workload={cfg.workload_name} "
          f"threads={cfg.threads} duration={cfg.duration}s "
          f"ops={result.total_ops} throughput={result.throughput:.0f} ops/s")
    if args.csv:
        append_csv(result, args.csv)
        print(f"wrote {args.csv}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
