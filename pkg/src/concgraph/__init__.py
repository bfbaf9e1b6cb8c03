"""Concurrent directed graph composed from interchangeable list-based sets."""

from .acyclic import AcyclicGraph
from .backends import AddOutcome, BackendKind, new_set_list
from .core import (
    SENTINEL_MAX,
    SENTINEL_MIN,
    AbstractGraph,
    AcyclicEdgeNode,
    EdgeStatus,
    GNode,
    SeqGraphOracle,
    abg_snapshot,
    is_acyclic,
)
from .graph import ConcurrentGraph
from .history import History, HistoryRecorder, RecordingGraph, RecordingSet
from .lincheck import brute_force_check, check_linearizable

__all__ = [
    "AbstractGraph",
    "AcyclicEdgeNode",
    "AcyclicGraph",
    "AddOutcome",
    "BackendKind",
    "ConcurrentGraph",
    "EdgeStatus",
    "GNode",
    "History",
    "HistoryRecorder",
    "RecordingGraph",
    "RecordingSet",
    "SENTINEL_MAX",
    "SENTINEL_MIN",
    "SeqGraphOracle",
    "abg_snapshot",
    "brute_force_check",
    "check_linearizable",
    "is_acyclic",
    "new_set_list",
]
