"""Linearizability checking of recorded histories against sequential specs.

The checker searches for a total order of the completed operations that (a)
respects real-time precedence (an operation that finished before another
began must come first) and (b) replays legally through the sequential
specification.  The search is a depth-first walk over the frontier of
minimal operations with memoization of failed (done-set, state) pairs, the
classic Wing & Gong strategy; it is practical for histories up to roughly 14
operations.

Three specifications are supported: the plain graph, the acyclic graph, and
the raw ordered set.  For the acyclic graph, a failed edge insertion is
admissible not only when an endpoint is missing but also when a
cycle-completing edge set existed at some point in the operation's interval,
counting the transit windows of overlapping insertions; this reflects the
documented false-positive behaviour of the cycle check.
"""

from __future__ import annotations

import argparse
import itertools
import sys
from dataclasses import dataclass

from .core import (
    ACYCLIC_ADD_EDGE,
    SeqGraphOracle,
)
from .history import History, OpRecord

SPEC_GRAPH = "graph"
SPEC_ACYCLIC = "acyclic"
SPEC_SET = "set"

LINEARIZABLE = "linearizable"
NOT_LINEARIZABLE = "not-linearizable"
BUDGET_EXHAUSTED = "budget-exhausted"


@dataclass
class CheckResult:
    status: str
    witness: list | None = None  # OpRecords in linearization order
    explored: int = 0

    @property
    def ok(self) -> bool:
        return self.status == LINEARIZABLE


class _Budget(Exception):
    pass


# -- sequential state engines ---------------------------------------------------


class _SetState:
    """Ordered-set spec: add true iff absent, remove true iff present."""

    __slots__ = ("keys",)

    def __init__(self, keys=frozenset()):
        self.keys = keys

    def key(self):
        return self.keys

    def try_apply(self, op: OpRecord):
        k = op.args[0]
        present = k in self.keys
        if op.method == "Add":
            if op.result == (not present):
                return _SetState(self.keys | {k}) if not present else self
            return None
        if op.method == "Remove":
            if op.result == present:
                return _SetState(self.keys - {k}) if present else self
            return None
        if op.method == "Contains":
            return self if op.result == present else None
        raise ValueError(f"unknown set method {op.method!r}")


class _GraphState:
    """Graph spec driven by the sequential reference oracle."""

    __slots__ = ("oracle", "transit_extras")

    def __init__(self, oracle: SeqGraphOracle, transit_extras=None):
        self.oracle = oracle
        # op index -> frozenset of (u, v) transit edges from overlapping
        # AcyclicAddEdge calls by other threads
        self.transit_extras = transit_extras or {}

    def key(self):
        return self.oracle.state_key()

    def _acyclic_add_false_ok(self, op: OpRecord) -> bool:
        u, v = op.args
        oracle = self.oracle
        if u not in oracle.vertices or v not in oracle.vertices:
            return True
        if u == v:
            return True  # self-loops always roll back
        extras = self.transit_extras.get(op.index, frozenset())
        return oracle.has_path(v, u, extra_edges=extras)

    def try_apply(self, op: OpRecord):
        if op.method == ACYCLIC_ADD_EDGE and op.result is False:
            if self._acyclic_add_false_ok(op):
                return self  # state unchanged
            return None
        nxt = self.oracle.copy()
        if nxt.apply(op.method, op.args) != op.result:
            return None
        return _GraphState(nxt, self.transit_extras)


def _initial_state(ops, spec: str, die: bool):
    if spec == SPEC_SET:
        return _SetState()
    if spec not in (SPEC_GRAPH, SPEC_ACYCLIC):
        raise ValueError(f"unknown spec {spec!r}")
    extras = {}
    if spec == SPEC_ACYCLIC:
        adds = [o for o in ops if o.method == ACYCLIC_ADD_EDGE]
        for op in adds:
            overlapping = frozenset(
                other.args
                for other in adds
                if other.index != op.index
                and other.inv_seq < op.resp_seq
                and op.inv_seq < other.resp_seq
            )
            if overlapping:
                extras[op.index] = overlapping
    oracle = SeqGraphOracle(acyclic=spec == SPEC_ACYCLIC, die=die)
    return _GraphState(oracle, extras)


# -- the checker ------------------------------------------------------------------


def check_linearizable(history: History, spec: str = SPEC_GRAPH, *,
                       die: bool = False,
                       max_states: int = 2_000_000) -> CheckResult:
    """Decide whether ``history`` linearizes under ``spec``.

    Pending invocations are discarded.  ``max_states`` bounds the number of
    search nodes; running out is reported as budget exhaustion, distinct from
    a genuine non-linearizability verdict.
    """
    ops = history.ops()
    n = len(ops)
    if n == 0:
        return CheckResult(LINEARIZABLE, witness=[])
    state0 = _initial_state(ops, spec, die)
    full = (1 << n) - 1
    failed: set = set()
    explored = 0

    def search(mask: int, state):
        nonlocal explored
        if mask == full:
            return []
        key = (mask, state.key())
        if key in failed:
            return None
        explored += 1
        if explored > max_states:
            raise _Budget
        # minimal ops: nothing still undone responded before they began
        min_resp = min(op.resp_seq for op in ops if not mask & (1 << op.index))
        for op in ops:
            bit = 1 << op.index
            if mask & bit or op.inv_seq > min_resp:
                continue
            nxt = state.try_apply(op)
            if nxt is not None:
                rest = search(mask | bit, nxt)
                if rest is not None:
                    return [op] + rest
        failed.add(key)
        return None

    try:
        witness = search(0, state0)
    except _Budget:
        return CheckResult(BUDGET_EXHAUSTED, explored=explored)
    if witness is None:
        return CheckResult(NOT_LINEARIZABLE, explored=explored)
    return CheckResult(LINEARIZABLE, witness=witness, explored=explored)


def brute_force_check(history: History, spec: str = SPEC_GRAPH, *,
                      die: bool = False) -> bool:
    """Independent oracle: enumerate every real-time-consistent permutation.

    Exponential; only usable for small histories (<= ~7 ops).
    """
    ops = history.ops()
    state0 = _initial_state(ops, spec, die)
    for perm in itertools.permutations(ops):
        ok = True
        for i, earlier in enumerate(perm):
            for later in perm[i + 1:]:
                if later.resp_seq < earlier.inv_seq:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        state = state0
        for op in perm:
            state = state.try_apply(op)
            if state is None:
                break
        if state is not None:
            return True
    return False


# -- CLI ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="concgraph-lincheck",
        description="Check a recorded history file for linearizability.",
    )
    parser.add_argument("history", help="history file (tab-separated events)")
    parser.add_argument("--spec", choices=[SPEC_GRAPH, SPEC_ACYCLIC, SPEC_SET],
                        default=SPEC_GRAPH)
    parser.add_argument("--die", action="store_true",
                        help="check against delete-incoming-edges semantics")
    parser.add_argument("--budget", type=int, default=2_000_000,
                        help="search-node budget before giving up")
    parser.add_argument("--witness", action="store_true",
                        help="print a witness linearization order on success")
    args = parser.parse_args(argv)

    history = History.load(args.history)
    result = check_linearizable(history, args.spec, die=args.die,
                                max_states=args.budget)
    print(f"{result.status} ({len(history.ops())} ops, "
          f"{result.explored} states explored)")
    if args.witness and result.witness is not None:
        for op in result.witness:
            arglist = ",".join(str(a) for a in op.args)
            print(f"  {op.thread} {op.method}({arglist}) -> "
                  f"{'true' if op.result else 'false'}")
    if result.status == LINEARIZABLE:
        return 0
    if result.status == NOT_LINEARIZABLE:
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
