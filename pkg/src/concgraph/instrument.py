"""Opt-in counters for concurrency assertions in tests.

A thread installs a :class:`Recorder` to count lock acquisitions, shared-memory
writes and traversal steps performed by the calling thread.  Recording is
per-thread and off by default, so the hot paths only pay for a thread-local
lookup.  A global event clock orders mark/unlink events so tests can assert
that logical deletion happens before physical unlinking.
"""

from __future__ import annotations

import itertools
import threading
from contextlib import contextmanager

_tls = threading.local()

# Global monotone clock.  next() on a C-level iterator is atomic under the GIL.
_event_clock = itertools.count(1)


class Recorder:
    """Per-thread operation counters."""

    __slots__ = ("lock_acquires", "shared_writes", "steps")

    def __init__(self) -> None:
        self.lock_acquires = 0
        self.shared_writes = 0
        self.steps = 0


def recorder() -> Recorder | None:
    """The calling thread's active recorder, if any."""
    return getattr(_tls, "rec", None)


@contextmanager
def recording():
    """Install a fresh recorder for the calling thread."""
    rec = Recorder()
    _tls.rec = rec
    try:
        yield rec
    finally:
        _tls.rec = None


def tick() -> int:
    """Draw the next value from the global event clock."""
    return next(_event_clock)


def acquire(lock) -> None:
    """Acquire ``lock``, counting the acquisition if recording."""
    rec = getattr(_tls, "rec", None)
    if rec is not None:
        rec.lock_acquires += 1
    lock.acquire()


def count_write(n: int = 1) -> None:
    """Count ``n`` shared-memory writes if recording."""
    rec = getattr(_tls, "rec", None)
    if rec is not None:
        rec.shared_writes += n


def count_steps(n: int) -> None:
    """Count ``n`` traversal steps if recording."""
    rec = getattr(_tls, "rec", None)
    if rec is not None:
        rec.steps += n
