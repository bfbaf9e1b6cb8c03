"""Shared test helpers: backend parametrization and a step scheduler."""

from __future__ import annotations

import queue
import threading

import pytest

from concgraph import BackendKind

ALL_BACKENDS = [k.value for k in BackendKind]


@pytest.fixture(params=ALL_BACKENDS)
def backend(request):
    return request.param


class StepScheduler:
    """Drive threads through the graphs' pause hooks one segment at a time.

    Install :attr:`hook` as a graph's pause hook; it blocks registered worker
    threads at every pause point (and once before they start) until granted a
    step, and ignores all other threads.  A grant lets one worker run to its
    next pause point or to completion while the scheduler waits for the
    acknowledgement, so execution is deterministic: exactly one worker makes
    progress at any moment.
    """

    def __init__(self):
        self._workers = {}

    def hook(self, _point: str) -> None:
        state = self._workers.get(threading.current_thread().name)
        if state is None:
            return
        state["ack"].put("paused")
        state["resume"].wait()
        state["resume"].clear()

    def add_worker(self, name: str, fn) -> None:
        state = {
            "ack": queue.Queue(),
            "resume": threading.Event(),
            "result": None,
        }

        def run():
            state["resume"].wait()
            state["resume"].clear()
            state["result"] = fn()
            state["ack"].put("done")

        thread = threading.Thread(target=run, name=name, daemon=True)
        state["thread"] = thread
        self._workers[name] = state
        thread.start()

    def step(self, name: str, timeout: float = 10.0) -> str:
        """Let ``name`` run to its next pause point; returns "paused" or "done"."""
        state = self._workers[name]
        state["resume"].set()
        return state["ack"].get(timeout=timeout)

    def run_to_completion(self, name: str, timeout: float = 10.0) -> None:
        while self.step(name, timeout) != "done":
            pass

    def result(self, name: str):
        state = self._workers[name]
        state["thread"].join(timeout=10.0)
        assert not state["thread"].is_alive(), f"worker {name} did not finish"
        return state["result"]
