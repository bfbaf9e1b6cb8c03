"""Interchangeable concurrent ordered-set backends over sentinel-bounded lists.

Each backend keeps keys in a sorted singly linked list between a head sentinel
(minimum key) and a tail sentinel (maximum key) and exports add / remove /
contains.  The same structure serves both the vertex list and the per-vertex
edge lists; ``axis`` selects which link field ("vnext" or "enext") a given
list traverses, so one vertex node can sit in the vertex list while owning an
edge list through its other link.

Backends:

* coarse   - every operation runs under one lock shared by the whole graph.
* hoh      - hand-over-hand lock coupling during traversal.
* lazy     - optimistic traversal, lock-and-validate, logical marks before
             unlinking; contains takes no locks.
* lockfree - Harris-style list: mark and successor share one atomically
             swapped cell, updates use CAS, traversals snip marked nodes;
             contains takes no locks and writes nothing.

CPython has no hardware CAS on attributes, so the lock-free backend stores
each (successor, marked) pair as a tuple replaced under a tiny internal lock;
reads are single attribute loads and therefore see consistent pairs.  The
internal lock belongs to the CAS primitive, not to the algorithm, and is not
counted as a lock acquisition by the instrumentation.
"""

from __future__ import annotations

import threading
from enum import Enum

from . import instrument
from .core import SENTINEL_MAX, SENTINEL_MIN, GNode


class AddOutcome(Enum):
    """Whether an add linked a new node or found the key already present."""

    INSERTED = "inserted"
    ALREADY_PRESENT = "already_present"


class BackendKind(str, Enum):
    COARSE = "coarse"
    HOH = "hoh"
    LAZY = "lazy"
    LOCKFREE = "lockfree"


class _Cell:
    """Atomically updatable (successor, marked) pair for the lock-free list."""

    __slots__ = ("pair", "_lock")

    def __init__(self, ref=None):
        self.pair = (ref, False)
        self._lock = threading.Lock()

    def cas(self, exp_ref, exp_mark, new_ref, new_mark) -> bool:
        with self._lock:
            ref, mark = self.pair
            if ref is exp_ref and mark == exp_mark:
                self.pair = (new_ref, new_mark)
                return True
            return False


class LFNode:
    """Node of the lock-free backend.

    The link cell on the node's own list axis carries both its successor and
    its logical-deletion mark, so the two can be read and CASed together.
    """

    __slots__ = ("val", "vcell", "ecell", "enext", "elist",
                 "_mark_tick", "_unlink_tick")

    def __init__(self, key: int):
        self.val = key
        self.vcell = None
        self.ecell = None
        self.enext = None  # vertex nodes: edge-list head sentinel
        self.elist = None  # vertex nodes: handle to their edge list
        self._mark_tick = None
        self._unlink_tick = None

    def __repr__(self):
        return f"LFNode({self.val})"


class SetList:
    """Common surface of the four backends: one sorted set of keys.

    ``axis`` is "vnext" for the vertex list and "enext" for edge lists.
    ``factory`` builds new member nodes; the graph layer passes a factory that
    equips vertex nodes with their own empty edge list before they become
    reachable.
    """

    node_class = GNode

    def __init__(self, axis: str = "vnext", factory=None):
        if axis not in ("vnext", "enext"):
            raise ValueError(f"bad link axis {axis!r}")
        self._vaxis = axis == "vnext"
        self.axis = axis
        self._factory = factory or self.node_class
        self.head, self.tail = self._make_sentinels()

    # -- structure helpers -------------------------------------------------

    def _make_sentinels(self):
        head = self.node_class(SENTINEL_MIN)
        tail = self.node_class(SENTINEL_MAX)
        self._link_initial(head, tail)
        return head, tail

    def _link_initial(self, head, tail):
        if self._vaxis:
            head.vnext = tail
        else:
            head.enext = tail

    def successor(self, node):
        return node.vnext if self._vaxis else node.enext

    def is_marked(self, node) -> bool:
        return node.marked

    def items(self) -> list:
        """Sorted member keys at a quiescent point."""
        out = []
        node = self.successor(self.head)
        while node is not self.tail:
            if not self.is_marked(node):
                out.append(node.val)
            node = self.successor(node)
        return out

    def assert_wellformed(self) -> None:
        """Sentinels intact and keys strictly increasing head -> tail."""
        assert self.head.val == SENTINEL_MIN and self.tail.val == SENTINEL_MAX
        assert not self.is_marked(self.head) and not self.is_marked(self.tail)
        node = self.head
        seen_tail = False
        while node is not None:
            nxt = self.successor(node)
            if nxt is not None:
                assert node.val < nxt.val, "keys out of order"
            if node is self.tail:
                seen_tail = True
            node = nxt
        assert seen_tail, "tail not reachable from head"

    # -- operations (per backend) ------------------------------------------

    def add(self, key: int) -> AddOutcome:
        raise NotImplementedError

    def remove(self, key: int) -> bool:
        raise NotImplementedError

    def contains(self, key: int):
        """Return (present, node-handle or None)."""
        raise NotImplementedError


class CoarseSetList(SetList):
    """Every operation runs under one lock shared graph-wide."""

    def __init__(self, axis="vnext", factory=None, lock=None):
        super().__init__(axis, factory)
        self._lock = lock if lock is not None else threading.Lock()

    def _scan(self, key):
        vax = self._vaxis
        pred = self.head
        curr = pred.vnext if vax else pred.enext
        while curr.val < key:
            pred = curr
            curr = curr.vnext if vax else curr.enext
        return pred, curr

    def add(self, key):
        instrument.acquire(self._lock)
        try:
            pred, curr = self._scan(key)
            if curr.val == key:
                return AddOutcome.ALREADY_PRESENT
            node = self._factory(key)
            if self._vaxis:
                node.vnext = curr
                pred.vnext = node
            else:
                node.enext = curr
                pred.enext = node
            instrument.count_write(2)
            return AddOutcome.INSERTED
        finally:
            self._lock.release()

    def remove(self, key):
        instrument.acquire(self._lock)
        try:
            pred, curr = self._scan(key)
            if curr.val != key:
                return False
            curr.marked = True
            curr._mark_tick = instrument.tick()
            if self._vaxis:
                pred.vnext = curr.vnext
            else:
                pred.enext = curr.enext
            curr._unlink_tick = instrument.tick()
            instrument.count_write(2)
            return True
        finally:
            self._lock.release()

    def contains(self, key):
        instrument.acquire(self._lock)
        try:
            _, curr = self._scan(key)
            if curr.val == key and not curr.marked:
                return True, curr
            return False, None
        finally:
            self._lock.release()


class HohSetList(SetList):
    """Hand-over-hand lock coupling: at most two adjacent node locks held."""

    def _locate(self, key):
        """Return (pred, curr) with both locks held and pred.val < key <= curr.val."""
        vax = self._vaxis
        pred = self.head
        instrument.acquire(pred.lock)
        curr = pred.vnext if vax else pred.enext
        instrument.acquire(curr.lock)
        while curr.val < key:
            pred.lock.release()
            pred = curr
            curr = curr.vnext if vax else curr.enext
            instrument.acquire(curr.lock)
        return pred, curr

    def add(self, key):
        pred, curr = self._locate(key)
        try:
            if curr.val == key:
                return AddOutcome.ALREADY_PRESENT
            node = self._factory(key)
            if self._vaxis:
                node.vnext = curr
                pred.vnext = node
            else:
                node.enext = curr
                pred.enext = node
            instrument.count_write(2)
            return AddOutcome.INSERTED
        finally:
            pred.lock.release()
            curr.lock.release()

    def remove(self, key):
        pred, curr = self._locate(key)
        try:
            if curr.val != key:
                return False
            curr.marked = True
            curr._mark_tick = instrument.tick()
            if self._vaxis:
                pred.vnext = curr.vnext
            else:
                pred.enext = curr.enext
            curr._unlink_tick = instrument.tick()
            instrument.count_write(2)
            return True
        finally:
            pred.lock.release()
            curr.lock.release()

    def contains(self, key):
        pred, curr = self._locate(key)
        try:
            if curr.val == key and not curr.marked:
                return True, curr
            return False, None
        finally:
            pred.lock.release()
            curr.lock.release()


class LazySetList(SetList):
    """Optimistic traversal with lock-and-validate; marks before unlinking."""

    @staticmethod
    def _validate(pred, curr, vax) -> bool:
        nxt = pred.vnext if vax else pred.enext
        return (not pred.marked) and (not curr.marked) and nxt is curr

    def _locate(self, key):
        """Lock and return a validated (pred, curr) window around ``key``.

        Retries until validation succeeds; both node locks are held on return.
        """
        vax = self._vaxis
        while True:
            pred = self.head
            curr = pred.vnext if vax else pred.enext
            while curr.val < key:
                pred = curr
                curr = curr.vnext if vax else curr.enext
            instrument.acquire(pred.lock)
            instrument.acquire(curr.lock)
            if self._validate(pred, curr, vax):
                return pred, curr
            pred.lock.release()
            curr.lock.release()

    def add(self, key):
        pred, curr = self._locate(key)
        try:
            if curr.val == key:
                return AddOutcome.ALREADY_PRESENT
            node = self._factory(key)
            if self._vaxis:
                node.vnext = curr
                pred.vnext = node
            else:
                node.enext = curr
                pred.enext = node
            instrument.count_write(2)
            return AddOutcome.INSERTED
        finally:
            pred.lock.release()
            curr.lock.release()

    def remove(self, key):
        pred, curr = self._locate(key)
        try:
            if curr.val != key:
                return False
            curr.marked = True  # logical removal
            curr._mark_tick = instrument.tick()
            instrument.count_write()
            if self._vaxis:
                pred.vnext = curr.vnext
            else:
                pred.enext = curr.enext
            curr._unlink_tick = instrument.tick()
            instrument.count_write()
            return True
        finally:
            pred.lock.release()
            curr.lock.release()

    def contains(self, key):
        # Wait-free scan: no locks, no writes.
        vax = self._vaxis
        steps = 0
        node = self.head
        while node.val < key:
            node = node.vnext if vax else node.enext
            steps += 1
        instrument.count_steps(steps)
        if node.val == key and not node.marked:
            return True, node
        return False, None


class LockFreeSetList(SetList):
    """Harris-style lock-free list over CASable (successor, marked) cells."""

    node_class = LFNode

    def _link_initial(self, head, tail):
        if self._vaxis:
            tail.vcell = _Cell(None)
            head.vcell = _Cell(tail)
        else:
            tail.ecell = _Cell(None)
            head.ecell = _Cell(tail)

    def _cell(self, node) -> _Cell:
        return node.vcell if self._vaxis else node.ecell

    def successor(self, node):
        return self._cell(node).pair[0]

    def is_marked(self, node) -> bool:
        return self._cell(node).pair[1]

    def _locate(self, key):
        """Return (pred, pred_cell, curr); marked nodes met on the way are snipped."""
        vax = self._vaxis
        while True:
            pred = self.head
            pred_cell = pred.vcell if vax else pred.ecell
            curr = pred_cell.pair[0]
            restart = False
            while True:
                curr_cell = curr.vcell if vax else curr.ecell
                succ, cmark = curr_cell.pair
                while cmark:
                    # curr is logically deleted: unlink it before moving on
                    if not pred_cell.cas(curr, False, succ, False):
                        restart = True
                        break
                    instrument.count_write()
                    if curr._unlink_tick is None:
                        curr._unlink_tick = instrument.tick()
                    curr = succ
                    curr_cell = curr.vcell if vax else curr.ecell
                    succ, cmark = curr_cell.pair
                if restart:
                    break
                if curr.val >= key:
                    return pred, pred_cell, curr
                pred, pred_cell = curr, curr_cell
                curr = succ

    def add(self, key):
        vax = self._vaxis
        node = None
        while True:
            _, pred_cell, curr = self._locate(key)
            if curr.val == key:
                return AddOutcome.ALREADY_PRESENT
            if node is None:
                node = self._factory(key)
            cell = _Cell(curr)
            if vax:
                node.vcell = cell
            else:
                node.ecell = cell
            if pred_cell.cas(curr, False, node, False):
                instrument.count_write()
                return AddOutcome.INSERTED

    def remove(self, key):
        vax = self._vaxis
        while True:
            _, pred_cell, curr = self._locate(key)
            if curr.val != key:
                return False
            curr_cell = curr.vcell if vax else curr.ecell
            succ, cmark = curr_cell.pair
            if cmark:
                continue  # another remover got here first; re-locate
            # Draw the tick before the CAS: any unlink tick is drawn strictly
            # after a successful mark CAS, so mark tick < unlink tick holds
            # even if another traversal snips the node immediately.
            tick = instrument.tick()
            if not curr_cell.cas(succ, False, succ, True):
                continue  # raced with an insert-after or another remover
            curr._mark_tick = tick
            instrument.count_write()
            # best effort physical unlink; losers leave it to later traversals
            if pred_cell.cas(curr, False, succ, False):
                instrument.count_write()
                if curr._unlink_tick is None:
                    curr._unlink_tick = instrument.tick()
            return True

    def contains(self, key):
        # Wait-free: a pure read of the list, no CAS, no snipping.
        vax = self._vaxis
        steps = 0
        node = self.head
        while node.val < key:
            node = (node.vcell if vax else node.ecell).pair[0]
            steps += 1
        instrument.count_steps(steps)
        if node.val == key and not (node.vcell if vax else node.ecell).pair[1]:
            return True, node
        return False, None


_BACKENDS = {
    BackendKind.COARSE: CoarseSetList,
    BackendKind.HOH: HohSetList,
    BackendKind.LAZY: LazySetList,
    BackendKind.LOCKFREE: LockFreeSetList,
}


def node_class(kind: BackendKind):
    return _BACKENDS[BackendKind(kind)].node_class


def new_set_list(kind: BackendKind, axis: str, factory=None, lock=None) -> SetList:
    """Build a list of the given backend kind.

    ``lock`` is only meaningful for the coarse backend, where every list of a
    graph shares the one graph-wide lock.
    """
    kind = BackendKind(kind)
    cls = _BACKENDS[kind]
    if cls is CoarseSetList:
        return CoarseSetList(axis, factory, lock=lock)
    return cls(axis, factory)
