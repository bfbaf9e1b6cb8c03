"""Concurrent directed graph composed from list-based sets.

A sorted vertex list holds one node per vertex; every vertex node owns a
sorted edge list recording its outgoing edges by target key.  All six graph
methods reduce to add / remove / contains calls on those lists, so the graph
inherits whatever progress guarantee the chosen backend provides.

Edge updates check both endpoints and then re-check the source vertex before
touching its edge list: without the re-check, a vertex deletion sliding
between the two contains calls lets an edge insertion succeed although no
sequential ordering of the involved methods could justify it.
"""

from __future__ import annotations

import threading

from .backends import BackendKind, new_set_list, node_class
from .core import check_key


class ConcurrentGraph:
    """Directed graph over integer keys, safe for concurrent use.

    ``backend`` picks the list implementation (coarse, hoh, lazy, lockfree).
    ``delete_incoming_edges`` additionally sweeps stale incoming-edge nodes
    out of every edge list after a successful vertex removal; correctness
    does not depend on it, the abstract graph filters stale nodes either way.
    """

    def __init__(self, backend=BackendKind.LAZY, *,
                 delete_incoming_edges: bool = False,
                 _skip_edge_recheck: bool = False):
        self.backend = BackendKind(backend)
        self.die_enabled = delete_incoming_edges
        # Test-only switch: drop the second source-vertex check in edge
        # updates to demonstrate why it is needed.
        self._recheck = not _skip_edge_recheck
        self._pause_hook = None  # test seam for controlled schedules
        self._coarse_lock = (
            threading.Lock() if self.backend is BackendKind.COARSE else None
        )
        self._node_class = node_class(self.backend)
        self._vlist = new_set_list(
            self.backend, "vnext", factory=self._new_vertex_node,
            lock=self._coarse_lock,
        )

    def _new_vertex_node(self, key):
        """Vertex nodes own an empty edge list before they become reachable."""
        node = self._node_class(key)
        elist = new_set_list(self.backend, "enext", lock=self._coarse_lock)
        node.enext = elist.head
        node.elist = elist
        return node

    def _pause(self, point: str) -> None:
        hook = self._pause_hook
        if hook is not None:
            hook(point)

    # -- vertex methods ------------------------------------------------------

    def add_vertex(self, u: int) -> bool:
        """Add vertex ``u``; always true (re-adding an existing key is a no-op)."""
        check_key(u)
        self._vlist.add(u)
        return True

    def remove_vertex(self, u: int) -> bool:
        """Remove vertex ``u``; true iff it was present."""
        check_key(u)
        ok = self._vlist.remove(u)
        if ok and self.die_enabled:
            self.remove_incoming_edges(u)
        return ok

    def contains_vertex(self, u: int) -> bool:
        check_key(u)
        return self._vlist.contains(u)[0]

    def remove_incoming_edges(self, u: int) -> None:
        """Sweep edge nodes keyed ``u`` out of every vertex's edge list.

        Not atomic with the vertex removal; a racing edge insertion may leave
        a stale node behind, which the abstract graph ignores.
        """
        vlist = self._vlist
        node = vlist.head
        while node is not vlist.tail:
            elist = node.elist
            if elist is not None:
                elist.remove(u)
            node = vlist.successor(node)

    # -- edge methods --------------------------------------------------------

    def add_edge(self, u: int, v: int) -> bool:
        """Add edge (u, v); false iff either endpoint is missing."""
        check_key(u)
        check_key(v)
        ok1, unode = self._vlist.contains(u)
        self._pause("after-contains-u")
        ok2, _ = self._vlist.contains(v)
        if not ok1 or not ok2:
            return False
        if self._recheck:
            ok1, unode = self._vlist.contains(u)
            if not ok1:
                return False
        unode.elist.add(v)
        return True

    def remove_edge(self, u: int, v: int) -> bool:
        """Remove edge (u, v); true whenever both endpoints are present."""
        check_key(u)
        check_key(v)
        ok1, unode = self._vlist.contains(u)
        ok2, _ = self._vlist.contains(v)
        if not ok1 or not ok2:
            return False
        if self._recheck:
            ok1, unode = self._vlist.contains(u)
            if not ok1:
                return False
        unode.elist.remove(v)
        return True  # per the sequential specification, even if absent

    def contains_edge(self, u: int, v: int) -> bool:
        check_key(u)
        check_key(v)
        ok1, unode = self._vlist.contains(u)
        ok2, _ = self._vlist.contains(v)
        if not ok1 or not ok2:
            return False
        return unode.elist.contains(v)[0]

    # -- quiescent inspection --------------------------------------------------

    def _vertex_nodes(self):
        """Yield (key, node) for unmarked vertex nodes reachable from the head."""
        vlist = self._vlist
        node = vlist.successor(vlist.head)
        while node is not vlist.tail:
            if not vlist.is_marked(node):
                yield node.val, node
            node = vlist.successor(node)

    def _edge_keys(self, node):
        """Yield target keys of unmarked edge nodes in ``node``'s edge list."""
        elist = node.elist
        enode = elist.successor(elist.head)
        while enode is not elist.tail:
            if not elist.is_marked(enode):
                yield enode.val
            enode = elist.successor(enode)

    def validate(self) -> None:
        """Assert structural well-formedness (quiescent points only)."""
        self._vlist.assert_wellformed()
        vlist = self._vlist
        node = vlist.successor(vlist.head)
        while node is not vlist.tail:
            node.elist.assert_wellformed()
            node = vlist.successor(node)
