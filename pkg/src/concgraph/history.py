"""Globally ordered invocation/response histories of concurrent runs.

Every recorded method call contributes two events: an invocation drawn from a
global atomic counter immediately before the call touches shared memory, and a
response drawn immediately after it returns.  Threads append to private
buffers, so recording adds no synchronization beyond the counter itself; the
buffers are merged into one totally ordered history once the run is quiescent.

Histories round-trip through a line-oriented text format::

    seq<TAB>thread<TAB>phase<TAB>method<TAB>arg1[,arg2]<TAB>result|-
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass

from . import core
from .backends import AddOutcome


@dataclass(frozen=True)
class Event:
    seq: int
    thread: str
    phase: str  # "inv" or "resp"
    method: str
    args: tuple
    result: bool | None

    def line(self) -> str:
        args = ",".join(str(a) for a in self.args)
        if self.result is None:
            res = "-"
        else:
            res = "true" if self.result else "false"
        return f"{self.seq}\t{self.thread}\t{self.phase}\t{self.method}\t{args}\t{res}"


@dataclass(frozen=True)
class OpRecord:
    """A completed operation: one inv event paired with its resp event."""

    index: int
    thread: str
    method: str
    args: tuple
    result: bool
    inv_seq: int
    resp_seq: int


class History:
    """A totally ordered list of events."""

    def __init__(self, events=()):
        self.events = sorted(events, key=lambda e: e.seq)

    def __len__(self):
        return len(self.events)

    def validate_wellformed(self) -> None:
        """Per-thread events must alternate inv/resp with matching methods."""
        open_inv: dict[str, Event] = {}
        for ev in self.events:
            if ev.phase == "inv":
                if ev.thread in open_inv:
                    raise ValueError(f"thread {ev.thread} has nested invocation")
                open_inv[ev.thread] = ev
            elif ev.phase == "resp":
                inv = open_inv.pop(ev.thread, None)
                if inv is None or inv.method != ev.method or inv.args != ev.args:
                    raise ValueError(f"unmatched response {ev}")
            else:
                raise ValueError(f"bad phase {ev.phase!r}")

    def ops(self) -> list[OpRecord]:
        """Completed operations in invocation order; pending invs are discarded."""
        self.validate_wellformed()
        open_inv: dict[str, Event] = {}
        out: list[OpRecord] = []
        for ev in self.events:
            if ev.phase == "inv":
                open_inv[ev.thread] = ev
            else:
                inv = open_inv.pop(ev.thread)
                out.append(
                    OpRecord(
                        index=len(out),
                        thread=ev.thread,
                        method=ev.method,
                        args=ev.args,
                        result=ev.result,
                        inv_seq=inv.seq,
                        resp_seq=ev.seq,
                    )
                )
        return out

    # -- serialization -------------------------------------------------------

    def dump(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for ev in self.events:
                fh.write(ev.line() + "\n")

    @staticmethod
    def parse_line(line: str, lineno: int = 0) -> Event:
        parts = line.rstrip("\n").split("\t")
        if len(parts) != 6:
            raise ValueError(f"line {lineno}: expected 6 tab-separated fields")
        seq, thread, phase, method, args, res = parts
        arg_tuple = tuple(int(a) for a in args.split(",")) if args else ()
        if res == "-":
            result = None
        elif res in ("true", "false"):
            result = res == "true"
        else:
            raise ValueError(f"line {lineno}: bad result field {res!r}")
        return Event(int(seq), thread, phase, method, arg_tuple, result)

    @staticmethod
    def load(path) -> "History":
        events = []
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if line.strip():
                    events.append(History.parse_line(line, lineno))
        return History(events)


class HistoryRecorder:
    """Concurrent-safe event recorder with one global sequence counter."""

    def __init__(self):
        self._seq = itertools.count(1)  # next() is atomic under the GIL
        self._buffers: dict[str, list[Event]] = {}

    def _buffer(self, thread: str) -> list:
        # setdefault is a single C call, safe without a lock
        return self._buffers.setdefault(thread, [])

    def record(self, thread: str, method: str, args: tuple, call):
        """Run ``call`` bracketed by inv/resp events; returns its result."""
        buf = self._buffer(thread)
        buf.append(Event(next(self._seq), thread, "inv", method, args, None))
        result = call()
        buf.append(Event(next(self._seq), thread, "resp", method, args, bool(result)))
        return result

    def history(self) -> History:
        """Merge all buffers; only meaningful once recording threads are done."""
        events = [ev for buf in self._buffers.values() for ev in buf]
        return History(events)


def _thread_label() -> str:
    return threading.current_thread().name


class RecordingGraph:
    """Graph wrapper recording every method call into a shared recorder.

    Works for both graph variants; the method names recorded for edge
    operations follow the variant (AddEdge vs AcyclicAddEdge, etc.).
    ``thread`` overrides the event's thread label, which controlled-schedule
    tests use to attribute inline calls to logical threads.
    """

    def __init__(self, graph, recorder: HistoryRecorder, *, acyclic: bool = False):
        self.graph = graph
        self.recorder = recorder
        self.acyclic = acyclic

    def add_vertex(self, u, thread=None):
        return self.recorder.record(
            thread or _thread_label(), core.ADD_VERTEX, (u,),
            lambda: self.graph.add_vertex(u),
        )

    def remove_vertex(self, u, thread=None):
        return self.recorder.record(
            thread or _thread_label(), core.REMOVE_VERTEX, (u,),
            lambda: self.graph.remove_vertex(u),
        )

    def contains_vertex(self, u, thread=None):
        return self.recorder.record(
            thread or _thread_label(), core.CONTAINS_VERTEX, (u,),
            lambda: self.graph.contains_vertex(u),
        )

    def add_edge(self, u, v, thread=None):
        if self.acyclic:
            return self.recorder.record(
                thread or _thread_label(), core.ACYCLIC_ADD_EDGE, (u, v),
                lambda: self.graph.acyclic_add_edge(u, v),
            )
        return self.recorder.record(
            thread or _thread_label(), core.ADD_EDGE, (u, v),
            lambda: self.graph.add_edge(u, v),
        )

    def remove_edge(self, u, v, thread=None):
        if self.acyclic:
            return self.recorder.record(
                thread or _thread_label(), core.ACYCLIC_REMOVE_EDGE, (u, v),
                lambda: self.graph.acyclic_remove_edge(u, v),
            )
        return self.recorder.record(
            thread or _thread_label(), core.REMOVE_EDGE, (u, v),
            lambda: self.graph.remove_edge(u, v),
        )

    def contains_edge(self, u, v, thread=None):
        if self.acyclic:
            return self.recorder.record(
                thread or _thread_label(), core.ACYCLIC_CONTAINS_EDGE, (u, v),
                lambda: self.graph.acyclic_contains_edge(u, v),
            )
        return self.recorder.record(
            thread or _thread_label(), core.CONTAINS_EDGE, (u, v),
            lambda: self.graph.contains_edge(u, v),
        )


class RecordingSet:
    """Ordered-set wrapper recording Add/Remove/Contains calls.

    Add outcomes are recorded as booleans: inserted -> true, already present
    -> false, which is exactly the ordered-set sequential specification.
    """

    def __init__(self, setlist, recorder: HistoryRecorder):
        self.setlist = setlist
        self.recorder = recorder

    def add(self, key, thread=None):
        return self.recorder.record(
            thread or _thread_label(), "Add", (key,),
            lambda: self.setlist.add(key) is AddOutcome.INSERTED,
        )

    def remove(self, key, thread=None):
        return self.recorder.record(
            thread or _thread_label(), "Remove", (key,),
            lambda: self.setlist.remove(key),
        )

    def contains(self, key, thread=None):
        return self.recorder.record(
            thread or _thread_label(), "Contains", (key,),
            lambda: self.setlist.contains(key)[0],
        )
