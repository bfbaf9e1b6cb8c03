"""Sequential oracle, snapshot semantics, and the acyclicity check."""

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from concgraph import (
    AbstractGraph,
    ConcurrentGraph,
    SeqGraphOracle,
    abg_snapshot,
    is_acyclic,
)
from concgraph.core import (
    ADD_EDGE,
    ADD_VERTEX,
    CONTAINS_EDGE,
    CONTAINS_VERTEX,
    REMOVE_EDGE,
    REMOVE_VERTEX,
    SENTINEL_MAX,
    SENTINEL_MIN,
    check_key,
)


def test_check_key_rejects_sentinels():
    with pytest.raises(ValueError):
        check_key(SENTINEL_MIN)
    with pytest.raises(ValueError):
        check_key(SENTINEL_MAX)
    with pytest.raises(ValueError):
        check_key("5")
    assert check_key(0) == 0
    assert check_key(-7) == -7


class TestOracleTable:
    """The sequential-specification rows, one by one."""

    def test_add_vertex_always_true(self):
        o = SeqGraphOracle()
        assert o.apply(ADD_VERTEX, (5,)) is True
        assert o.apply(ADD_VERTEX, (5,)) is True  # duplicate: idempotent true
        assert o.snapshot() == AbstractGraph.of({5}, set())

    def test_remove_vertex_rows(self):
        o = SeqGraphOracle()
        assert o.apply(REMOVE_VERTEX, (7,)) is False  # empty graph
        o.apply(ADD_VERTEX, (5,))
        assert o.apply(REMOVE_VERTEX, (5,)) is True
        assert o.apply(REMOVE_VERTEX, (5,)) is False

    def test_add_edge_missing_vertex_is_false(self):
        o = SeqGraphOracle()
        o.apply(ADD_VERTEX, (1,))
        assert o.apply(ADD_EDGE, (1, 2)) is False
        assert o.snapshot() == AbstractGraph.of({1}, set())

    def test_add_edge_duplicate_is_true_unchanged(self):
        o = SeqGraphOracle()
        o.apply(ADD_VERTEX, (1,))
        o.apply(ADD_VERTEX, (2,))
        assert o.apply(ADD_EDGE, (1, 2)) is True
        before = o.snapshot()
        assert o.apply(ADD_EDGE, (1, 2)) is True
        assert o.snapshot() == before

    def test_remove_edge_true_even_when_absent(self):
        o = SeqGraphOracle()
        o.apply(ADD_VERTEX, (1,))
        o.apply(ADD_VERTEX, (2,))
        assert o.apply(REMOVE_EDGE, (1, 2)) is True  # edge absent, verts present
        assert o.apply(REMOVE_EDGE, (2, 3)) is False  # vertex missing
        o.apply(ADD_EDGE, (1, 2))
        assert o.apply(REMOVE_EDGE, (1, 2)) is True
        assert o.snapshot().edges == frozenset()

    def test_contains_rows(self):
        o = SeqGraphOracle()
        assert o.apply(CONTAINS_VERTEX, (3,)) is False
        o.apply(ADD_VERTEX, (3,))
        assert o.apply(CONTAINS_VERTEX, (3,)) is True
        assert o.apply(CONTAINS_EDGE, (3, 4)) is False  # vertex 4 missing
        o.apply(ADD_VERTEX, (4,))
        assert o.apply(CONTAINS_EDGE, (3, 4)) is False  # edge missing
        o.apply(ADD_EDGE, (3, 4))
        assert o.apply(CONTAINS_EDGE, (3, 4)) is True

    def test_remove_vertex_drops_incident_edges_from_view(self):
        o = SeqGraphOracle()
        for k in (1, 2):
            o.apply(ADD_VERTEX, (k,))
        o.apply(ADD_EDGE, (1, 2))
        o.apply(ADD_EDGE, (2, 1))
        o.apply(REMOVE_VERTEX, (1,))
        assert o.snapshot() == AbstractGraph.of({2}, set())

    def test_stale_incoming_edge_resurrects_without_die(self):
        # Physical edge nodes aimed at a removed vertex linger (die off) and
        # count again once a vertex with that key is re-added.
        o = SeqGraphOracle(die=False)
        for k in (1, 2):
            o.apply(ADD_VERTEX, (k,))
        o.apply(ADD_EDGE, (1, 2))
        o.apply(REMOVE_VERTEX, (2,))
        assert o.snapshot().edges == frozenset()
        o.apply(ADD_VERTEX, (2,))
        assert o.snapshot().edges == frozenset({(1, 2)})
        assert o.apply(CONTAINS_EDGE, (1, 2)) is True

    def test_die_sweeps_incoming_edges_for_good(self):
        o = SeqGraphOracle(die=True)
        for k in (1, 2):
            o.apply(ADD_VERTEX, (k,))
        o.apply(ADD_EDGE, (1, 2))
        o.apply(REMOVE_VERTEX, (2,))
        o.apply(ADD_VERTEX, (2,))
        assert o.snapshot().edges == frozenset()

    def test_removed_source_loses_outgoing_edges_for_good(self):
        o = SeqGraphOracle()
        for k in (1, 2):
            o.apply(ADD_VERTEX, (k,))
        o.apply(ADD_EDGE, (1, 2))
        o.apply(REMOVE_VERTEX, (1,))
        o.apply(ADD_VERTEX, (1,))  # fresh node, fresh empty edge list
        assert o.snapshot().edges == frozenset()


def _random_ops(rng, n, key_range=8):
    ops = []
    for _ in range(n):
        method = rng.choice(
            [ADD_VERTEX, REMOVE_VERTEX, CONTAINS_VERTEX,
             ADD_EDGE, REMOVE_EDGE, CONTAINS_EDGE]
        )
        if method in (ADD_VERTEX, REMOVE_VERTEX, CONTAINS_VERTEX):
            args = (rng.randint(1, key_range),)
        else:
            args = (rng.randint(1, key_range), rng.randint(1, key_range))
        ops.append((method, args))
    return ops


def test_oracle_replay_is_deterministic():
    ops = _random_ops(random.Random(7), 400)
    a, b = SeqGraphOracle(), SeqGraphOracle()
    results_a = [a.apply(m, args) for m, args in ops]
    results_b = [b.apply(m, args) for m, args in ops]
    assert results_a == results_b
    assert a.state_key() == b.state_key()


def test_acyclic_oracle_stays_acyclic():
    from concgraph.core import ACYCLIC_ADD_EDGE

    rng = random.Random(13)
    o = SeqGraphOracle(acyclic=True)
    for _ in range(600):
        method, args = _random_ops(rng, 1, key_range=6)[0]
        if method == ADD_EDGE:
            method = ACYCLIC_ADD_EDGE
        o.apply(method, args)
        assert is_acyclic(o.edges_phys)


class TestSnapshot:
    def test_empty_structure(self, backend):
        g = ConcurrentGraph(backend)
        assert abg_snapshot(g) == AbstractGraph.of(set(), set())

    def test_marked_but_linked_vertex_is_excluded(self):
        g = ConcurrentGraph("lazy")
        g.add_vertex(5)
        _, node = g._vlist.contains(5)
        node.marked = True  # marked but still physically linked
        assert abg_snapshot(g).vertices == frozenset()

    def test_stale_edge_node_filtered(self, backend):
        g = ConcurrentGraph(backend)
        for k in (1, 2, 9):
            g.add_vertex(k)
        g.add_edge(1, 2)
        g.add_edge(1, 9)
        g.remove_vertex(9)  # die off: edge node 9 stays linked in 1's list
        assert abg_snapshot(g) == AbstractGraph.of({1, 2}, {(1, 2)})


def _topo_order_exists(vertices, edges):
    """Independent acyclicity oracle: some permutation orients all edges forward."""
    verts = sorted(vertices)
    for perm in itertools.permutations(verts):
        pos = {v: i for i, v in enumerate(perm)}
        if all(pos[u] < pos[v] for u, v in edges):
            return True
    return False


def test_is_acyclic_basics():
    assert is_acyclic(set()) is True
    assert is_acyclic({(1, 2), (2, 3), (3, 1)}) is False
    assert is_acyclic({(1, 2), (2, 3), (1, 3)}) is True
    assert is_acyclic({(4, 4)}) is False  # self-loop


def test_is_acyclic_matches_permutation_oracle():
    rng = random.Random(42)
    for _ in range(60):
        n = rng.randint(2, 6)
        verts = range(1, n + 1)
        pairs = [(u, v) for u in verts for v in verts if u != v]
        edges = set(rng.sample(pairs, k=rng.randint(0, min(len(pairs), 9))))
        assert is_acyclic(edges) == _topo_order_exists(verts, edges), edges
    # a few larger instances at the 8-vertex limit of the brute force
    for seed in range(5):
        rng = random.Random(100 + seed)
        verts = range(1, 9)
        pairs = [(u, v) for u in verts for v in verts if u != v]
        edges = set(rng.sample(pairs, k=10))
        assert is_acyclic(edges) == _topo_order_exists(verts, edges), edges


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), max_size=14))
def test_is_acyclic_agrees_with_topo_oracle_property(pairs):
    edges = set(pairs)
    verts = {u for u, _ in edges} | {v for _, v in edges}
    assert is_acyclic(edges) == _topo_order_exists(verts, edges)
