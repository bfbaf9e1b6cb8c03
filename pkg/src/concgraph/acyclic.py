"""Acyclicity-preserving graph variant with a wait-free reachability check.

Vertices live in a lazy list exactly as in the base graph.  Edge nodes carry a
three-state lifecycle instead of a plain mark: a new edge is linked in
``transit``, then the inserting thread runs a lock-free reachability scan; if
the new edge would close a cycle the thread demotes it to ``marked`` and
unlinks it (the insertion fails), otherwise it promotes it to ``added``.  The
invariant is that the set of added edges never contains a cycle.

Transit edges are private to their creator: removal only touches added edges,
so a transit node can never be deleted out from under the thread deciding its
fate.  Reachability, however, sees transit and added edges alike, which is
what makes concurrent insertions safe; the price is the occasional false
positive where two inserts that would jointly close a cycle both back out.
"""

from __future__ import annotations

from collections import deque

from . import instrument
from .backends import LazySetList
from .core import (
    SENTINEL_MAX,
    SENTINEL_MIN,
    AcyclicEdgeNode,
    EdgeStatus,
    GNode,
    check_key,
)


def modified_validate_edge(e1: AcyclicEdgeNode, e2: AcyclicEdgeNode) -> bool:
    """Window check for insertion paths: adjacent and neither logically deleted.

    Transit nodes validate successfully, so inserts may land next to an edge
    whose fate is still being decided.
    """
    return (
        e1.status != EdgeStatus.MARKED
        and e2.status != EdgeStatus.MARKED
        and e1.enext is e2
    )


def acyclic_validate_edge(e1: AcyclicEdgeNode, e2: AcyclicEdgeNode) -> bool:
    """Window check for removal paths: adjacent and both committed (added)."""
    return (
        e1.status == EdgeStatus.ADDED
        and e2.status == EdgeStatus.ADDED
        and e1.enext is e2
    )


class AcyclicGraph:
    """Directed graph whose committed edge set is kept acyclic.

    Built on the lazy locking list; the edge algorithms are status-aware
    variants of the lazy protocol.  ``delete_incoming_edges`` works as in the
    base graph.
    """

    def __init__(self, *, delete_incoming_edges: bool = False):
        self.die_enabled = delete_incoming_edges
        self._pause_hook = None  # test seam for controlled schedules
        self._vlist = LazySetList("vnext", factory=self._new_vertex_node)

    @staticmethod
    def _new_vertex_node(key):
        node = GNode(key)
        # Edge sentinels hold status "added" permanently so both validators
        # accept windows at the ends of the list.
        ehead = AcyclicEdgeNode(SENTINEL_MIN, status=EdgeStatus.ADDED)
        etail = AcyclicEdgeNode(SENTINEL_MAX, status=EdgeStatus.ADDED)
        ehead.enext = etail
        node.enext = ehead
        return node

    def _pause(self, point: str) -> None:
        hook = self._pause_hook
        if hook is not None:
            hook(point)

    # -- vertex methods (unchanged from the base graph) -----------------------

    def add_vertex(self, u: int) -> bool:
        check_key(u)
        self._vlist.add(u)
        return True

    def remove_vertex(self, u: int) -> bool:
        check_key(u)
        ok = self._vlist.remove(u)
        if ok and self.die_enabled:
            self.remove_incoming_edges(u)
        return ok

    def contains_vertex(self, u: int) -> bool:
        check_key(u)
        return self._vlist.contains(u)[0]

    def remove_incoming_edges(self, u: int) -> None:
        vlist = self._vlist
        node = vlist.head
        while node is not vlist.tail:
            if node.enext is not None:
                self._remove_from_edge_list(node, u)
            node = node.vnext

    # -- internal edge-list machinery ------------------------------------------

    def _find_vertex(self, key):
        """Wait-free vertex lookup; None when absent or marked."""
        steps = 0
        node = self._vlist.head
        while node.val < key:
            node = node.vnext
            steps += 1
        instrument.count_steps(steps)
        if node.val == key and not node.marked:
            return node
        return None

    def _help_search_edge(self, key1: int, key2: int):
        """Locate both endpoint vertex nodes without locks.

        Returns (v1, v2) or None when either vertex is absent or marked.
        """
        v1 = self._find_vertex(key1)
        if v1 is None:
            return None
        v2 = self._find_vertex(key2)
        if v2 is None:
            return None
        return v1, v2

    @staticmethod
    def _locate_window(ehead, key, validate):
        """Lock and return a validated (e1, e2) window for ``key``.

        Scans without locks, locks the candidate pair, validates with the
        caller's predicate, and retries until validation succeeds.
        """
        while True:
            e1 = ehead
            e2 = e1.enext
            while e2.val < key:
                e1 = e2
                e2 = e2.enext
            instrument.acquire(e1.lock)
            instrument.acquire(e2.lock)
            if validate(e1, e2):
                return e1, e2
            e1.lock.release()
            e2.lock.release()

    def _acyclic_locate_edge(self, key1, key2, *, for_update: bool):
        """Vertex checks plus a locked, validated edge window.

        ``for_update`` selects the insertion validator (transit tolerated);
        otherwise the removal validator (added only).  Returns
        (v1, v2, e1, e2) or None when a vertex check fails.
        """
        found = self._help_search_edge(key1, key2)
        if found is None:
            return None
        v1, v2 = found
        # Both vertices must still be live once they have been located.
        if v1.marked or v2.marked:
            return None
        validate = modified_validate_edge if for_update else acyclic_validate_edge
        e1, e2 = self._locate_window(v1.enext, key2, validate)
        return v1, v2, e1, e2

    def _new_locate_edge(self, v1, key2):
        """Relocate the caller's own transit node for rollback.

        Scans ``v1``'s edge list directly; the transit node cannot have been
        removed by anyone else, so the window always closes on it.
        """
        return self._locate_window(v1.enext, key2, modified_validate_edge)

    def _remove_from_edge_list(self, vnode, key) -> bool:
        e1, e2 = self._locate_window(vnode.enext, key, acyclic_validate_edge)
        try:
            if e2.val != key:
                return False
            e2.set_status(EdgeStatus.MARKED)
            e1.enext = e2.enext
            instrument.count_write(2)
            return True
        finally:
            e1.lock.release()
            e2.lock.release()

    # -- edge methods ------------------------------------------------------------

    def acyclic_add_edge(self, u: int, v: int) -> bool:
        """Add edge (u, v) unless it would close a cycle.

        False when an endpoint is missing or when reachability finds a path
        from v back to u (counting transit edges, hence possible false
        positives).  Re-adding an existing edge is a no-op returning true.
        """
        check_key(u)
        check_key(v)
        while True:
            located = self._acyclic_locate_edge(u, v, for_update=True)
            if located is None:
                return False
            v1, v2, e1, e2 = located
            if e2.val != v:
                break
            status = e2.status
            e1.lock.release()
            e2.lock.release()
            if status == EdgeStatus.TRANSIT:
                # Another thread's insert is still deciding its fate; wait
                # for it to resolve rather than report a phantom duplicate.
                continue
            return True  # already present and committed
        e3 = AcyclicEdgeNode(v)  # born in transit
        e3.enext = e2
        e1.enext = e3
        instrument.count_write(2)
        e1.lock.release()
        e2.lock.release()
        self._pause("transit-linked")
        cycle = self.path_exists(v, u)
        self._pause("cycle-checked")
        if cycle:
            ne1, ne2 = self._new_locate_edge(v1, v)
            assert ne2 is e3, "transit node vanished before rollback"
            e3.set_status(EdgeStatus.MARKED)
            ne1.enext = e3.enext
            instrument.count_write(2)
            ne1.lock.release()
            ne2.lock.release()
            return False
        e3.set_status(EdgeStatus.ADDED)
        instrument.count_write()
        return True

    def acyclic_remove_edge(self, u: int, v: int) -> bool:
        """Remove edge (u, v); true whenever both endpoints are present.

        Only committed (added) edges are removable: the locate loop waits out
        any transit node occupying the window.
        """
        check_key(u)
        check_key(v)
        located = self._acyclic_locate_edge(u, v, for_update=False)
        if located is None:
            return False
        v1, v2, e1, e2 = located
        try:
            if e2.val == v:
                e2.set_status(EdgeStatus.MARKED)  # logical removal
                e1.enext = e2.enext  # physical removal
                instrument.count_write(2)
            return True
        finally:
            e1.lock.release()
            e2.lock.release()

    def acyclic_contains_edge(self, u: int, v: int) -> bool:
        """True iff both vertices are live and (u, v) is committed (added)."""
        check_key(u)
        check_key(v)
        found = self._help_search_edge(u, v)
        if found is None:
            return False
        v1, _v2 = found
        steps = 0
        e = v1.enext.enext
        while e.val < v:
            e = e.enext
            steps += 1
        instrument.count_steps(steps)
        return e.val == v and e.status == EdgeStatus.ADDED

    # -- reachability ---------------------------------------------------------------

    def path_exists(self, frm: int, to: int) -> bool:
        """Lock-free reachability from ``frm`` to ``to``.

        Explores a thread-local reach set in FIFO insertion order, following
        unmarked edge nodes (transit and added alike) out of live vertices.
        Takes no locks and performs no shared writes; the finite key space
        bounds the exploration.
        """
        check_key(frm)
        check_key(to)
        v1 = self._find_vertex(frm)
        if v1 is None:
            return False
        reached: set[int] = set()
        queue: deque[int] = deque()
        explored = {frm}

        def scan(vnode) -> None:
            steps = 0
            e = vnode.enext.enext
            while e.val < SENTINEL_MAX:
                if e.status != EdgeStatus.MARKED:
                    k = e.val
                    if k not in reached:
                        reached.add(k)
                        queue.append(k)
                e = e.enext
                steps += 1
            instrument.count_steps(steps)

        scan(v1)
        if to in reached:
            return True
        while queue:
            k = queue.popleft()
            if k in explored:
                continue
            explored.add(k)
            vnode = self._find_vertex(k)
            if vnode is None:
                continue  # absent or marked: nothing to explore through
            scan(vnode)
            if to in reached:
                return True
        return False

    # -- quiescent inspection -----------------------------------------------------

    def _vertex_nodes(self):
        vlist = self._vlist
        node = vlist.successor(vlist.head)
        while node is not vlist.tail:
            if not vlist.is_marked(node):
                yield node.val, node
            node = vlist.successor(node)

    def _edge_keys(self, node):
        e = node.enext.enext
        while e.val < SENTINEL_MAX:
            if e.status == EdgeStatus.ADDED:
                yield e.val
            e = e.enext

    def added_edges_physical(self) -> set:
        """All (u, v) pairs backed by an added edge node of a live vertex.

        Unlike the abstract snapshot this does not filter on the target being
        live; the committed edge set is acyclic even counting stale targets.
        """
        out = set()
        for key, node in self._vertex_nodes():
            for target in self._edge_keys(node):
                out.add((key, target))
        return out

    def validate(self) -> None:
        """Assert structural well-formedness (quiescent points only)."""
        self._vlist.assert_wellformed()
        node = self._vlist.successor(self._vlist.head)
        while node is not self._vlist.tail:
            e = node.enext
            assert e.val == SENTINEL_MIN and e.status == EdgeStatus.ADDED
            while e.enext is not None:
                assert e.val < e.enext.val, "edge keys out of order"
                e = e.enext
            assert e.val == SENTINEL_MAX and e.status == EdgeStatus.ADDED
            node = self._vlist.successor(node)
