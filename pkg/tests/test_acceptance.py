"""Acceptance criteria, one test per criterion, with a printed verdict line.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
PASS/FAIL lines as they complete.
"""

import itertools
import os
import random
import threading
import time

from concgraph import (
    AcyclicGraph,
    BackendKind,
    ConcurrentGraph,
    History,
    HistoryRecorder,
    RecordingGraph,
    SeqGraphOracle,
    abg_snapshot,
    instrument,
    is_acyclic,
)
from concgraph import core
from concgraph.bench import (
    METHOD_ORDER,
    NAMED_WORKLOADS,
    BenchConfig,
    run_bench,
    sample_op,
)
from concgraph.history import Event
from concgraph.lincheck import (
    NOT_LINEARIZABLE,
    SPEC_GRAPH,
    brute_force_check,
    check_linearizable,
)

from conftest import StepScheduler

GRAPH_CALLS = {
    core.ADD_VERTEX: lambda g, a: g.add_vertex(*a),
    core.REMOVE_VERTEX: lambda g, a: g.remove_vertex(*a),
    core.CONTAINS_VERTEX: lambda g, a: g.contains_vertex(*a),
    core.ADD_EDGE: lambda g, a: g.add_edge(*a),
    core.REMOVE_EDGE: lambda g, a: g.remove_edge(*a),
    core.CONTAINS_EDGE: lambda g, a: g.contains_edge(*a),
}


def report(name: str, ok: bool, detail: str = "") -> None:
    verdict = "PASS" if ok else "FAIL"
    line = f"[ACCEPTANCE] {name}: {verdict}"
    if detail:
        line += f" ({detail})"
    print(line, flush=True)
    assert ok, line


# ---------------------------------------------------------------------------
# 1. Sequential conformance: 1e5 randomized ops vs the oracle, all backends.
# ---------------------------------------------------------------------------


def test_sequential_conformance():
    n_ops, key_range, seed = 100_000, 64, 20_240_901
    rng = random.Random(seed)
    spec = NAMED_WORKLOADS["update"]
    ops = [sample_op(spec, rng, key_range) for _ in range(n_ops)]

    started = time.monotonic()
    mismatches = 0
    for backend in BackendKind:
        g = ConcurrentGraph(backend)
        oracle = SeqGraphOracle()
        for method, args in ops:
            got = GRAPH_CALLS[method](g, args)
            want = oracle.apply(method, args)
            if got != want:
                mismatches += 1
        if abg_snapshot(g) != oracle.snapshot():
            mismatches += 1
        g.validate()
    elapsed = time.monotonic() - started
    report(
        "sequential-conformance",
        mismatches == 0 and elapsed < 30.0,
        f"{n_ops} ops x {len(BackendKind)} backends, "
        f"{mismatches} mismatches, {elapsed:.1f}s",
    )


# ---------------------------------------------------------------------------
# 2. Linearizability: >=1000 recorded histories per backend, plus brute-force
#    agreement on a fixed fixture set of >=200 small histories.
# ---------------------------------------------------------------------------


def _record_mixed_history(backend: str, seed: int) -> History:
    rng = random.Random(seed)
    n_threads = rng.randint(2, 4)
    ops_per_thread = 12 // n_threads
    recorder = HistoryRecorder()
    g = RecordingGraph(ConcurrentGraph(backend), recorder)
    for k in (1, 2, 3):
        g.add_vertex(k, thread="setup")
    g.add_edge(1, 2, thread="setup")
    barrier = threading.Barrier(n_threads)

    def worker(wseed):
        wrng = random.Random(wseed)
        barrier.wait()
        for _ in range(ops_per_thread):
            u = wrng.randint(1, 6)
            v = wrng.randint(1, 6)
            roll = wrng.random()
            if roll < 0.2:
                g.add_vertex(u)
            elif roll < 0.35:
                g.remove_vertex(u)
            elif roll < 0.5:
                g.contains_vertex(u)
            elif roll < 0.7:
                g.add_edge(u, v)
            elif roll < 0.85:
                g.remove_edge(u, v)
            else:
                g.contains_edge(u, v)

    threads = [
        threading.Thread(target=worker, args=(seed * 131 + i,), name=f"T{i}")
        for i in range(n_threads)
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    return recorder.history()


def _synthetic_fixture(seed: int) -> History:
    """Deterministic small history with randomly chosen results."""
    rng = random.Random(seed)
    n_threads = rng.randint(2, 3)
    n_ops = rng.randint(2, 6)
    methods = [core.ADD_VERTEX, core.REMOVE_VERTEX, core.CONTAINS_VERTEX,
               core.ADD_EDGE, core.REMOVE_EDGE, core.CONTAINS_EDGE]
    pending: dict[int, tuple] = {}
    events, seq, issued = [], 0, 0
    while issued < n_ops or pending:
        seq += 1
        can_invoke = issued < n_ops and len(pending) < n_threads
        if can_invoke and (not pending or rng.random() < 0.55):
            free = [t for t in range(n_threads) if t not in pending]
            t = rng.choice(free)
            m = rng.choice(methods)
            if m in (core.ADD_VERTEX, core.REMOVE_VERTEX, core.CONTAINS_VERTEX):
                args = (rng.randint(1, 3),)
            else:
                args = (rng.randint(1, 3), rng.randint(1, 3))
            pending[t] = (m, args)
            issued += 1
            events.append(Event(seq, f"T{t}", "inv", m, args, None))
        else:
            t = rng.choice(list(pending))
            m, args = pending.pop(t)
            result = True if m == core.ADD_VERTEX else rng.random() < 0.5
            events.append(Event(seq, f"T{t}", "resp", m, args, result))
    return History(events)


def test_linearizability_bulk():
    started = time.monotonic()
    per_backend = 1000
    rejected = []
    for backend in BackendKind:
        for i in range(per_backend):
            h = _record_mixed_history(backend.value, seed=i * 7 + 1)
            res = check_linearizable(h, SPEC_GRAPH)
            if not res.ok:
                rejected.append((backend.value, i, res.status))
                if len(rejected) > 3:
                    break
    elapsed = time.monotonic() - started
    report(
        "linearizability-volume",
        not rejected and elapsed < 300.0,
        f"{per_backend} histories x {len(BackendKind)} backends, "
        f"rejected={rejected[:3]}, {elapsed:.1f}s",
    )


def test_linearizability_checker_vs_brute_force():
    started = time.monotonic()
    disagreements = []
    n_fixtures = 220
    for seed in range(n_fixtures):
        h = _synthetic_fixture(seed)
        assert len(h.ops()) <= 6
        fast = check_linearizable(h, SPEC_GRAPH).ok
        slow = brute_force_check(h, SPEC_GRAPH)
        if fast != slow:
            disagreements.append(seed)
    elapsed = time.monotonic() - started
    report(
        "linearizability-brute-force-agreement",
        not disagreements and elapsed < 300.0,
        f"{n_fixtures} fixtures, disagreements={disagreements[:5]}, "
        f"{elapsed:.1f}s",
    )


# ---------------------------------------------------------------------------
# 3. The deletion-between-checks regression.
# ---------------------------------------------------------------------------


def _delete_between_checks_schedule(skip_recheck: bool):
    g = ConcurrentGraph("lazy", _skip_edge_recheck=skip_recheck)
    recorder = HistoryRecorder()
    rg = RecordingGraph(g, recorder)
    rg.add_vertex(1, thread="T0")
    fired = []

    def hook(point):
        if point == "after-contains-u" and not fired:
            fired.append(point)
            rg.remove_vertex(1, thread="T2")
            rg.add_vertex(2, thread="T3")

    g._pause_hook = hook
    result = rg.add_edge(1, 2, thread="T1")
    g._pause_hook = None
    return result, recorder.history()


def test_delete_between_checks_regression():
    # synthetic fixture: AddEdge=true overlapping a completed vertex delete
    events = [
        Event(1, "T0", "inv", core.ADD_VERTEX, (1,), None),
        Event(2, "T0", "resp", core.ADD_VERTEX, (1,), True),
        Event(3, "T1", "inv", core.ADD_EDGE, (1, 2), None),
        Event(4, "T2", "inv", core.REMOVE_VERTEX, (1,), None),
        Event(5, "T2", "resp", core.REMOVE_VERTEX, (1,), True),
        Event(6, "T3", "inv", core.ADD_VERTEX, (2,), None),
        Event(7, "T3", "resp", core.ADD_VERTEX, (2,), True),
        Event(8, "T1", "resp", core.ADD_EDGE, (1, 2), True),
    ]
    synthetic_rejected = (
        check_linearizable(History(events), SPEC_GRAPH).status == NOT_LINEARIZABLE
    )

    # the unchecked build produces that bogus history under the race schedule
    result, history = _delete_between_checks_schedule(skip_recheck=True)
    unchecked_reproduces = (
        result is True
        and check_linearizable(history, SPEC_GRAPH).status == NOT_LINEARIZABLE
    )

    # the default build never does, across 1e4 trials of the same schedule
    violations = 0
    for _ in range(10_000):
        result, history = _delete_between_checks_schedule(skip_recheck=False)
        if result or not check_linearizable(history, SPEC_GRAPH).ok:
            violations += 1
    report(
        "double-check-regression",
        synthetic_rejected and unchecked_reproduces and violations == 0,
        f"synthetic rejected={synthetic_rejected}, "
        f"unchecked reproduces={unchecked_reproduces}, "
        f"violations={violations}/10000",
    )


# ---------------------------------------------------------------------------
# 4. Acyclicity under stress with quiescent checkpoints.
# ---------------------------------------------------------------------------


def _acyclic_stress_run(n_threads: int, seed: int, duration: float = 2.0,
                        checkpoints: int = 10) -> int:
    g = AcyclicGraph()
    key_range = 12
    for k in range(1, key_range + 1):
        g.add_vertex(k)
    pause = threading.Event()
    resume_barrier = threading.Barrier(n_threads + 1)
    stop = threading.Event()
    violations = 0

    def worker(wseed):
        rng = random.Random(wseed)
        while not stop.is_set():
            if pause.is_set():
                resume_barrier.wait()  # quiescent
                resume_barrier.wait()  # released
                continue
            u = rng.randint(1, key_range)
            v = rng.randint(1, key_range)
            if rng.random() < 0.5:
                g.acyclic_add_edge(u, v)
            else:
                g.acyclic_remove_edge(u, v)

    threads = [
        threading.Thread(target=worker, args=(seed * 977 + i,))
        for i in range(n_threads)
    ]
    for t in threads:
        t.start()
    for _ in range(checkpoints):
        time.sleep(duration / checkpoints)
        pause.set()
        resume_barrier.wait()  # all workers parked
        if not is_acyclic(g.added_edges_physical()):
            violations += 1
        if not is_acyclic(abg_snapshot(g).edges):
            violations += 1
        pause.clear()
        resume_barrier.wait()  # let them loose again
    stop.set()
    for t in threads:
        t.join()
    g.validate()
    if not is_acyclic(g.added_edges_physical()):
        violations += 1
    return violations


def test_acyclicity_stress():
    started = time.monotonic()
    total_violations = 0
    runs = 0
    for n_threads in (4, 8):
        for seed in range(10):
            total_violations += _acyclic_stress_run(n_threads, seed)
            runs += 1
    elapsed = time.monotonic() - started
    report(
        "acyclicity-stress",
        total_violations == 0 and runs == 20,
        f"{runs} runs (4 and 8 threads, 10 checkpoints each), "
        f"{total_violations} violations, {elapsed:.0f}s",
    )


# ---------------------------------------------------------------------------
# 5. Never-both-succeed for jointly cycle-closing insertions.
# ---------------------------------------------------------------------------


def test_never_both_succeed():
    outcomes = {}
    orders = sorted(set(itertools.permutations("AAABBB")))
    assert len(orders) == 20
    for order in orders:
        g = AcyclicGraph()
        for k in (1, 2, 3):
            g.add_vertex(k)
        assert g.acyclic_add_edge(1, 2) is True
        sched = StepScheduler()
        sched.add_worker("A", lambda: g.acyclic_add_edge(2, 3))
        sched.add_worker("B", lambda: g.acyclic_add_edge(3, 1))
        g._pause_hook = sched.hook
        for name in order:
            sched.step(name)
        g._pause_hook = None
        res = (sched.result("A"), sched.result("B"))
        if not is_acyclic(abg_snapshot(g).edges):
            res = ("cycle", "cycle")
        outcomes["".join(order)] = res
    both_succeed = [o for o, r in outcomes.items() if r == (True, True)]
    both_fail = [o for o, r in outcomes.items() if r == (False, False)]
    legal = set(outcomes.values()) <= {(True, False), (False, True),
                                       (False, False)}
    report(
        "never-both-succeed",
        not both_succeed and both_fail and legal,
        f"20 schedules, TT={len(both_succeed)}, FF={len(both_fail)} "
        f"(false positives observed)",
    )


# ---------------------------------------------------------------------------
# 6. Wait-freedom of readers while a mutator sleeps on its locks.
# ---------------------------------------------------------------------------


def _count_nodes(g) -> int:
    total = 0
    node = g._vlist.head
    while node is not None:
        total += 1
        elist_head = getattr(node, "enext", None)
        if elist_head is not None and not isinstance(elist_head, int):
            e = elist_head
            while e is not None:
                total += 1
                e = e.enext
        node = node.vnext
    return total


def test_reader_wait_freedom():
    trials, failures = 100, []
    for trial in range(trials):
        rng = random.Random(trial)
        g = AcyclicGraph()
        keys = list(range(1, 13))
        for k in keys:
            g.add_vertex(k)
        for u in keys:
            for v in keys:
                if u < v and rng.random() < 0.25:
                    g.acyclic_add_edge(u, v)

        # Suspend a "mutator" mid-operation: lock a random vertex window the
        # way a stalled locate would, plus an in-flight insert linked into
        # one edge list whose locks are still held.
        victim = rng.choice(keys)
        _, vnode = g._vlist.contains(victim)
        pred = g._vlist.head
        while pred.vnext is not vnode:
            pred = pred.vnext
        pred.lock.acquire()
        vnode.lock.acquire()
        e1 = vnode.enext
        e2 = e1.enext
        e1.lock.acquire()
        e2.lock.acquire()
        in_flight = 0
        if e2.val != 0:
            from concgraph import AcyclicEdgeNode
            fresh = AcyclicEdgeNode(0)  # stalled insert, locks still held
            fresh.enext = e2
            e1.enext = fresh
            in_flight = 1

        node_budget = _count_nodes(g) + in_flight
        try:
            a, b = rng.choice(keys), rng.choice(keys)
            with instrument.recording() as rec:
                g.contains_vertex(a)
            if rec.lock_acquires or rec.shared_writes or rec.steps > node_budget:
                failures.append((trial, "contains_vertex", rec.steps))
            with instrument.recording() as rec:
                g.acyclic_contains_edge(a, b)
            if rec.lock_acquires or rec.shared_writes or rec.steps > node_budget:
                failures.append((trial, "acyclic_contains_edge", rec.steps))
            with instrument.recording() as rec:
                g.path_exists(a, b)
            if rec.lock_acquires or rec.shared_writes:
                failures.append((trial, "path_exists-locks", rec.lock_acquires))
            if rec.steps > node_budget * (len(keys) + 2):
                failures.append((trial, "path_exists-steps", rec.steps))
        finally:
            if in_flight:
                fresh.set_status(core.EdgeStatus.ADDED)
            e2.lock.release()
            e1.lock.release()
            vnode.lock.release()
            pred.lock.release()
    report(
        "reader-wait-freedom",
        not failures,
        f"{trials - len(failures)}/{trials} trials clean "
        f"(readers ran against held locks), failures={failures[:3]}",
    )


# ---------------------------------------------------------------------------
# 7. Relative throughput (soft; needs >= 8 hardware threads to be binding).
# ---------------------------------------------------------------------------


def test_relative_throughput_contains_dominated():
    def throughput(backend, threads):
        cfg = BenchConfig(
            backend=backend, workload_name="contains",
            workload=NAMED_WORKLOADS["contains"], threads=threads,
            duration=1.0, repeats=1, initial_vertices=24, key_range=48, seed=3,
        )
        return run_bench(cfg).throughput

    coarse = throughput("coarse", 8)
    lazy = throughput("lazy", 8)
    lockfree = throughput("lockfree", 8)
    lazy_ratio = lazy / coarse
    lockfree_ratio = lockfree / coarse
    # thread-scaling sanity: wait-free readers shouldn't lose throughput
    # going from 1 to 8 threads on a read-dominated mix
    lazy_scale = lazy / throughput("lazy", 1)
    lockfree_scale = lockfree / throughput("lockfree", 1)
    hw = os.cpu_count() or 1
    binding = hw >= 8
    ok = True
    if binding:
        ok = (lazy_ratio >= 2.0 and lockfree_ratio >= 2.0
              and lazy_scale >= 1.0 and lockfree_scale >= 1.0)
    report(
        "relative-throughput (soft)",
        ok,
        f"lazy/coarse={lazy_ratio:.2f}x, lockfree/coarse={lockfree_ratio:.2f}x, "
        f"8t/1t lazy={lazy_scale:.2f}, lockfree={lockfree_scale:.2f}, "
        f"hw_threads={hw}{'' if binding else ' -> report-only'}",
    )


# ---------------------------------------------------------------------------
# 8. Workload generator frequencies.
# ---------------------------------------------------------------------------


def test_workload_generator_frequencies():
    n = 1_000_000
    worst = 0.0
    for name, spec in NAMED_WORKLOADS.items():
        rng = random.Random(hash(name) & 0xFFFF)
        counts = dict.fromkeys(METHOD_ORDER, 0)
        for _ in range(n):
            method, _ = sample_op(spec, rng, 32)
            counts[method] += 1
        for method, pct in zip(METHOD_ORDER, spec.percentages()):
            delta = abs(counts[method] / n * 100.0 - pct)
            worst = max(worst, delta)
    report(
        "workload-generator-frequencies",
        worst < 0.5,
        f"3 workloads x {n} samples, worst deviation {worst:.3f} pct-points",
    )
