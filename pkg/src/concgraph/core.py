"""Node structures, sentinel conventions, and the sequential reference oracle.

The concrete graph is an adjacency "list of lists": a sorted vertex list whose
nodes each own a sorted edge list.  Everything here is single-threaded support
code: the node classes shared by the locking backends, the abstract-graph
snapshot taken at quiescent points, and :class:`SeqGraphOracle`, the sequential
specification that concurrent runs are checked against.
"""

from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass, field

# Head/tail sentinel keys.  User keys must lie strictly between them, which
# keeps every comparison in the sorted lists total.
SENTINEL_MIN = -(2**63)
SENTINEL_MAX = 2**63 - 1

ADD_VERTEX = "AddVertex"
REMOVE_VERTEX = "RemoveVertex"
CONTAINS_VERTEX = "ContainsVertex"
ADD_EDGE = "AddEdge"
REMOVE_EDGE = "RemoveEdge"
CONTAINS_EDGE = "ContainsEdge"
ACYCLIC_ADD_EDGE = "AcyclicAddEdge"
ACYCLIC_REMOVE_EDGE = "AcyclicRemoveEdge"
ACYCLIC_CONTAINS_EDGE = "AcyclicContainsEdge"

VERTEX_METHODS = (ADD_VERTEX, REMOVE_VERTEX, CONTAINS_VERTEX)
EDGE_METHODS = (ADD_EDGE, REMOVE_EDGE, CONTAINS_EDGE, ACYCLIC_ADD_EDGE)

# Remove/contains behave identically in both variants; the oracle folds the
# acyclic names onto the plain ones.
_METHOD_ALIASES = {
    ACYCLIC_REMOVE_EDGE: REMOVE_EDGE,
    ACYCLIC_CONTAINS_EDGE: CONTAINS_EDGE,
}


def check_key(key: int) -> int:
    """Validate a user-supplied vertex key (non-sentinel integer)."""
    if not isinstance(key, int) or isinstance(key, bool):
        raise ValueError(f"vertex key must be an int, got {key!r}")
    if key <= SENTINEL_MIN or key >= SENTINEL_MAX:
        raise ValueError(f"vertex key {key} collides with a sentinel value")
    return key


class GNode:
    """A node of the composed graph structure.

    A GNode plays exactly one of two roles.  A vertex node is linked into the
    vertex list through ``vnext`` and points at its edge list's head sentinel
    through ``enext``.  An edge node is linked into one edge list through
    ``enext`` and leaves ``vnext`` unused.  ``val`` never changes after
    construction and ``marked`` only ever flips False -> True.
    """

    __slots__ = ("val", "marked", "vnext", "enext", "lock", "elist",
                 "_mark_tick", "_unlink_tick")

    def __init__(self, key: int):
        self.val = key
        self.marked = False
        self.vnext = None
        self.enext = None
        self.lock = threading.Lock()
        self.elist = None  # set on vertex nodes: handle to their edge list
        self._mark_tick = None
        self._unlink_tick = None

    def __repr__(self):  # debugging aid only
        return f"GNode({self.val}{'*' if self.marked else ''})"


class EdgeStatus:
    """Lifecycle states of an edge node in the acyclicity-preserving variant.

    Legal transitions: TRANSIT -> ADDED, TRANSIT -> MARKED, ADDED -> MARKED.
    """

    TRANSIT = "transit"
    ADDED = "added"
    MARKED = "marked"


_LEGAL_STATUS_MOVES = {
    (EdgeStatus.TRANSIT, EdgeStatus.ADDED),
    (EdgeStatus.TRANSIT, EdgeStatus.MARKED),
    (EdgeStatus.ADDED, EdgeStatus.MARKED),
}

# Optional transition log installed by tests: a plain list collecting
# (node, old_status, new_status) tuples.  list.append is atomic under the GIL.
status_log: list | None = None


class AcyclicEdgeNode:
    """Edge node for the acyclic variant; newly created nodes are in transit."""

    __slots__ = ("val", "enext", "status", "lock")

    def __init__(self, key: int, status: str = EdgeStatus.TRANSIT):
        self.val = key
        self.enext = None
        self.status = status
        self.lock = threading.Lock()

    def set_status(self, new: str) -> None:
        """Move to ``new``, enforcing the one-way lifecycle."""
        old = self.status
        if (old, new) not in _LEGAL_STATUS_MOVES:
            raise AssertionError(f"illegal edge status move {old} -> {new}")
        self.status = new
        log = status_log
        if log is not None:
            log.append((self, old, new))

    def __repr__(self):
        return f"AcyclicEdgeNode({self.val},{self.status})"


@dataclass(frozen=True)
class AbstractGraph:
    """Snapshot of the graph's abstract state: live vertices and live edges.

    A vertex is live when its node is reachable from the vertex head and not
    marked.  An edge (u, v) is live when u's edge list reachably holds an
    unmarked node keyed v (status "added" in the acyclic variant) and both u
    and v are live vertices.
    """

    vertices: frozenset = field(default_factory=frozenset)
    edges: frozenset = field(default_factory=frozenset)

    @staticmethod
    def of(vertices, edges) -> "AbstractGraph":
        return AbstractGraph(frozenset(vertices), frozenset(edges))


def abg_snapshot(graph) -> AbstractGraph:
    """Abstract-graph snapshot of a quiescent concrete graph.

    Walks every node reachable from the vertex head and applies the liveness
    filters directly, so it is independent of the bookkeeping the operations
    themselves do.  Only meaningful with no concurrent mutators.
    """
    live = {}
    for key, node in graph._vertex_nodes():
        live[key] = node
    edges = set()
    for key, node in live.items():
        for target in graph._edge_keys(node):
            if target in live:
                edges.add((key, target))
    return AbstractGraph.of(live.keys(), edges)


def is_acyclic(edges) -> bool:
    """True iff the directed graph given as (u, v) pairs has no cycle.

    Kahn's algorithm; self-loops count as cycles.
    """
    succs: dict[int, list[int]] = {}
    indeg: dict[int, int] = {}
    for u, v in edges:
        succs.setdefault(u, []).append(v)
        indeg.setdefault(u, indeg.get(u, 0))
        indeg[v] = indeg.get(v, 0) + 1
    ready = deque(k for k, d in indeg.items() if d == 0)
    seen = 0
    while ready:
        u = ready.popleft()
        seen += 1
        for v in succs.get(u, ()):
            indeg[v] -= 1
            if indeg[v] == 0:
                ready.append(v)
    return seen == len(indeg)


class SeqGraphOracle:
    """Single-threaded reference implementation of the graph's sequential spec.

    Tracks the live vertex set and the set of physically present edge nodes
    (``edges_phys``).  An edge node persists in its source vertex's list even
    after its *target* vertex is removed (unless ``die`` sweeps it), so it
    reappears in the abstract graph if a vertex with that key is re-added;
    removing the *source* vertex discards its whole edge list.  This mirrors
    exactly what the concrete structure does, resurrection quirks included.

    In acyclic mode ``AcyclicAddEdge`` refuses edges that would close a cycle,
    checking paths over physically present edges the same way the wait-free
    reachability scan does: any edge can be followed out of a live vertex.
    """

    __slots__ = ("vertices", "edges_phys", "acyclic", "die")

    def __init__(self, *, acyclic: bool = False, die: bool = False):
        self.vertices: set[int] = set()
        self.edges_phys: set[tuple[int, int]] = set()
        self.acyclic = acyclic
        self.die = die

    def copy(self) -> "SeqGraphOracle":
        other = SeqGraphOracle(acyclic=self.acyclic, die=self.die)
        other.vertices = set(self.vertices)
        other.edges_phys = set(self.edges_phys)
        return other

    def state_key(self):
        """Hashable canonical form of the current state (for memoization)."""
        return (frozenset(self.vertices), frozenset(self.edges_phys))

    def snapshot(self) -> AbstractGraph:
        live = self.vertices
        return AbstractGraph.of(
            live, {(u, v) for (u, v) in self.edges_phys if v in live}
        )

    def has_path(self, src: int, dst: int, extra_edges=()) -> bool:
        """Path from ``src`` to ``dst``, exploring onward only from live keys."""
        if src not in self.vertices:
            return False
        succs: dict[int, set[int]] = {}
        for u, v in self.edges_phys:
            succs.setdefault(u, set()).add(v)
        for u, v in extra_edges:
            succs.setdefault(u, set()).add(v)
        reached: set[int] = set(succs.get(src, ()))
        if dst in reached:
            return True
        frontier = deque(reached)
        while frontier:
            k = frontier.popleft()
            if k not in self.vertices:
                continue  # edge list of a dead key is unreachable
            for nxt in succs.get(k, ()):
                if nxt == dst:
                    return True
                if nxt not in reached:
                    reached.add(nxt)
                    frontier.append(nxt)
        return False

    def apply(self, method: str, args: tuple) -> bool:
        """Apply one graph method, returning its specified boolean result."""
        method = _METHOD_ALIASES.get(method, method)
        verts = self.vertices
        if method == ADD_VERTEX:
            (u,) = args
            verts.add(u)
            return True
        if method == REMOVE_VERTEX:
            (u,) = args
            if u not in verts:
                return False
            verts.discard(u)
            self.edges_phys = {e for e in self.edges_phys if e[0] != u}
            if self.die:
                self.edges_phys = {e for e in self.edges_phys if e[1] != u}
            return True
        if method == CONTAINS_VERTEX:
            (u,) = args
            return u in verts
        u, v = args
        if method == ADD_EDGE:
            if u not in verts or v not in verts:
                return False
            self.edges_phys.add((u, v))
            return True
        if method == ACYCLIC_ADD_EDGE:
            if u not in verts or v not in verts:
                return False
            if (u, v) in self.edges_phys:
                return True
            if u == v or self.has_path(v, u):
                return False  # would close a cycle; edge rolled back
            self.edges_phys.add((u, v))
            return True
        if method == REMOVE_EDGE:
            if u not in verts or v not in verts:
                return False
            self.edges_phys.discard((u, v))
            return True  # true even when the edge was absent
        if method == CONTAINS_EDGE:
            return u in verts and v in verts and (u, v) in self.edges_phys
        raise ValueError(f"unknown graph method {method!r}")
