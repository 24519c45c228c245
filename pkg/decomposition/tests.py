import itertools

import networkx as nx
import numpy as np
from django.conf import settings
from django.test import SimpleTestCase
from networkx.algorithms.isomorphism import GraphMatcher

from decomposition.services import (
    LEAF,
    PARALLEL,
    PRIME,
    SERIES,
    is_module,
    maximal_modules_without,
    maximal_strong_modules,
    md_tree,
    minimal_strong_module,
    module_closure,
    quotient_of,
    strong_modules_oracle,
    top_decomposition,
)
from graphs.exceptions import GraphError, GraphTooLargeError, NotAModuleError
from graphs.services import Graph, build_graph, induced, is_clique, is_connected


def to_networkx(g):
    nxg = nx.Graph()
    nxg.add_nodes_from(g.vertices())
    nxg.add_edges_from(g.edges())
    return nxg


def random_graph(rng, n, p):
    pairs = [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]
    return Graph.from_edge_ids(n, pairs)


def has_nontrivial_module(g):
    for size in range(2, g.n):
        for s in itertools.combinations(range(g.n), size):
            if is_module(g, s) is None:
                return True
    return False


def top_quotient(g):
    return quotient_of(g, maximal_strong_modules(g)).qgraph


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in set_partitions(rest):
        yield [[first]] + partition
        for i in range(len(partition)):
            yield partition[:i] + [[first] + partition[i]] + partition[i + 1:]


def embeds_induced(host, pattern):
    return GraphMatcher(to_networkx(host), to_networkx(pattern)).subgraph_is_isomorphic()


FULL_ACCEPTANCE = getattr(settings, 'FULL_ACCEPTANCE', False)

P4 = build_graph([('a', 'b'), ('b', 'c'), ('c', 'd')])
P3 = build_graph([('a', 'b'), ('b', 'c')])
DIAMOND = build_graph([('a', 'b'), ('a', 'c'), ('a', 'd'), ('b', 'c'), ('b', 'd')])


class MDTreeTests(SimpleTestCase):
    """Test cases for md_tree and top_decomposition"""

    def test_p4_is_prime(self):
        """Test a P4 decomposes into a prime root over four leaves"""
        tree = md_tree(P4)
        self.assertEqual(tree.kind, PRIME)
        self.assertEqual([c.kind for c in tree.children], [LEAF] * 4)

    def test_triangle_is_series(self):
        """Test a triangle decomposes into a series root over three leaves"""
        tree = md_tree(build_graph([(0, 1), (1, 2), (0, 2)]))
        self.assertEqual(tree.kind, SERIES)
        self.assertEqual(len(tree.children), 3)

    def test_p3_children(self):
        """Test P3 is series over the center and a parallel node on the ends"""
        tree = md_tree(P3)
        self.assertEqual(tree.kind, SERIES)
        self.assertEqual(tree.child_parts(), [frozenset({0, 2}), frozenset({1})])
        self.assertEqual(tree.children[0].kind, PARALLEL)

    def test_single_vertex(self):
        """Test a single vertex is a leaf and the empty graph is rejected"""
        self.assertEqual(md_tree(build_graph([], vertices=['x'])).kind, LEAF)
        with self.assertRaises(GraphError):
            md_tree(Graph([]))

    def test_deep_cograph_is_built_iteratively(self):
        """Test a threshold graph decomposes into a tree one level per vertex pair"""
        n = 400
        pairs = [(u, v) for v in range(1, n, 2) for u in range(v)]
        tree = md_tree(Graph.from_edge_ids(n, pairs))
        depth, node = 0, tree
        while not node.is_leaf:
            node = max(node.children, key=lambda c: len(c.vertices))
            depth += 1
        self.assertGreater(depth, 300)

    def test_children_partition_parent(self):
        """Test children partition their parent and are sorted by smallest id"""
        rng = np.random.default_rng(11)
        for _ in range(50):
            tree = md_tree(random_graph(rng, 9, 0.4))
            for node in tree.internal_nodes():
                parts = node.child_parts()
                self.assertEqual(frozenset().union(*parts), node.vertices)
                self.assertEqual(sum(len(p) for p in parts), len(node.vertices))
                self.assertEqual([min(p) for p in parts], sorted(min(p) for p in parts))

    def test_tree_nodes_equal_oracle(self):
        """Test tree nodes are exactly the strong modules on random small graphs"""
        samples = 2000 if FULL_ACCEPTANCE else 300
        rng = np.random.default_rng(2024)
        for _ in range(samples):
            n = int(rng.integers(1, 10 if FULL_ACCEPTANCE else 8))
            g = random_graph(rng, n, float(rng.random()))
            self.assertEqual(md_tree(g).as_sets(), set(strong_modules_oracle(g)))

    def test_prime_kind_on_random_graphs(self):
        """Test node kinds agree with connectivity of the node's subgraph"""
        rng = np.random.default_rng(5)
        for _ in range(100):
            g = random_graph(rng, 8, 0.5)
            for node in md_tree(g).internal_nodes():
                sub = induced(g, node.vertices).graph
                if node.kind == PARALLEL:
                    self.assertFalse(is_connected(sub))
                else:
                    self.assertTrue(is_connected(sub))


class MaximalStrongModulesTests(SimpleTestCase):
    """Test cases for maximal_strong_modules and module helpers"""

    def test_examples(self):
        """Test the P3, P4 and diamond examples"""
        self.assertEqual(maximal_strong_modules(P3), [frozenset({0, 2}), frozenset({1})])
        self.assertEqual(maximal_strong_modules(P4), [frozenset({v}) for v in range(4)])
        self.assertEqual(
            maximal_strong_modules(DIAMOND),
            [frozenset({0}), frozenset({1}), frozenset({2, 3})],
        )

    def test_too_small_rejected(self):
        """Test a single vertex has no nontrivial partition"""
        with self.assertRaises(GraphError):
            maximal_strong_modules(build_graph([], vertices=['x']))

    def test_top_quotient_is_clique_or_prime(self):
        """Test the top quotient of a connected graph is a clique or prime"""
        samples = 2000 if FULL_ACCEPTANCE else 300
        rng = np.random.default_rng(7)
        checked = 0
        while checked < samples:
            g = random_graph(rng, int(rng.integers(2, 8)), float(rng.random()))
            if not is_connected(g):
                continue
            checked += 1
            q = top_quotient(g)
            if not is_clique(q):
                self.assertGreaterEqual(q.n, 4)
                self.assertFalse(has_nontrivial_module(q))
                self.assertEqual(top_decomposition(g)[0], PRIME)

    def test_module_closure(self):
        """Test closures are the smallest modules containing the seed"""
        self.assertEqual(module_closure(P4, {0, 1}), frozenset(range(4)))
        self.assertEqual(module_closure(DIAMOND, {2, 3}), frozenset({2, 3}))
        self.assertEqual(module_closure(P3, {0}), frozenset({0}))
        rng = np.random.default_rng(3)
        for _ in range(200):
            g = random_graph(rng, 7, 0.5)
            seed = {int(x) for x in rng.choice(7, size=2, replace=False)}
            closure = module_closure(g, seed)
            self.assertIsNone(is_module(g, closure))
            for size in range(2, len(closure)):
                for s in itertools.combinations(sorted(closure), size):
                    if seed <= set(s):
                        self.assertIsNotNone(is_module(g, s))

    def test_maximal_modules_without_vertex(self):
        """Test the modules avoiding a vertex partition the rest and are modules"""
        rng = np.random.default_rng(9)
        for _ in range(100):
            g = random_graph(rng, 7, 0.5)
            parts = maximal_modules_without(g, 0)
            self.assertEqual(frozenset().union(*parts), frozenset(range(1, 7)))
            for part in parts:
                self.assertIsNone(is_module(g, part))

    def test_minimal_strong_module(self):
        """Test the deepest node containing a vertex set"""
        tree = md_tree(P3)
        self.assertEqual(minimal_strong_module(tree, {0, 2}).vertices, frozenset({0, 2}))
        self.assertEqual(minimal_strong_module(tree, {0, 1}).vertices, frozenset({0, 1, 2}))


class QuotientTests(SimpleTestCase):
    """Test cases for quotient_of"""

    def test_p3_quotient(self):
        """Test the P3 quotient over its maximal strong modules is a weighted edge"""
        q = quotient_of(P3, [{0, 2}, {1}])
        self.assertEqual(q.qgraph.m, 1)
        self.assertEqual(q.part_weight, (2, 1))
        self.assertEqual(q.part_of(2), 0)

    def test_singleton_parts(self):
        """Test the trivial partition reproduces the graph"""
        q = quotient_of(DIAMOND, [{v} for v in DIAMOND.vertices()])
        self.assertTrue(nx.is_isomorphic(to_networkx(q.qgraph), to_networkx(DIAMOND)))

    def test_not_a_module(self):
        """Test a part split by an outside vertex is rejected with the splitter"""
        with self.assertRaises(NotAModuleError) as ctx:
            quotient_of(P3, [{0, 1}, {2}])
        self.assertEqual(ctx.exception.splitter, 2)
        self.assertEqual(ctx.exception.inside_pair, (1, 0))

    def test_fast_path_certifies_without_full_check(self):
        """Test edge counts alone reject a non-module partition"""
        with self.settings(CLUSTERKIT={'CERTIFY_QUOTIENTS': False}):
            with self.assertRaises(NotAModuleError):
                quotient_of(P4, [{0, 1}, {2, 3}])

    def test_overlapping_parts_rejected(self):
        """Test overlapping parts are rejected"""
        with self.assertRaises(GraphError):
            quotient_of(P3, [{0, 1}, {1, 2}])

    def test_alive_view(self):
        """Test the alive view ignores removed vertices and follows later deletions"""
        removed = {1, 2}
        view = quotient_of(P3, [{0, 2}, {1}]).alive_view(removed)
        self.assertTrue(view.is_alive(0))
        self.assertFalse(view.is_alive(1))
        self.assertEqual(view.alive_vertices(0), [0])
        removed.add(0)
        self.assertFalse(view.is_alive(0))
        self.assertEqual(view.alive_vertices(0), [])


class OracleTests(SimpleTestCase):
    """Test cases for strong_modules_oracle"""

    def test_examples(self):
        """Test the K2, P4 and P3 examples"""
        k2 = build_graph([('a', 'b')])
        self.assertEqual(strong_modules_oracle(k2), [frozenset({0}), frozenset({1}), frozenset({0, 1})])
        self.assertEqual(
            strong_modules_oracle(P4),
            [frozenset({v}) for v in range(4)] + [frozenset(range(4))],
        )
        self.assertEqual(
            strong_modules_oracle(P3),
            [frozenset({0}), frozenset({1}), frozenset({2}), frozenset({0, 2}), frozenset({0, 1, 2})],
        )

    def test_too_large_rejected(self):
        """Test the oracle refuses graphs over its size limit"""
        with self.assertRaises(GraphTooLargeError):
            strong_modules_oracle(Graph.from_edge_ids(13, []))


class PrimeQuotientTests(SimpleTestCase):
    """Test cases for prime quotient minimality and the embedding of sub-quotients"""

    def test_prime_quotient_embeds_in_every_module_partition(self):
        """Test a prime top quotient is induced in the quotient of every module partition"""
        rng = np.random.default_rng(17)
        checked = 0
        while checked < 25:
            n = int(rng.integers(4, 7))
            g = random_graph(rng, n, 0.5)
            if not is_connected(g) or top_decomposition(g)[0] != PRIME:
                continue
            checked += 1
            q_top = top_quotient(g)
            for partition in set_partitions(list(range(n))):
                if len(partition) < 2:
                    continue
                if any(is_module(g, part) is not None for part in partition):
                    continue
                q = quotient_of(g, partition).qgraph
                self.assertTrue(embeds_induced(q, q_top))

    def test_prime_sub_quotient_embeds(self):
        """Test a prime quotient of G[U] embeds in the quotient of the U-intersecting children"""
        samples = 500 if FULL_ACCEPTANCE else 150
        rng = np.random.default_rng(29)
        checked = 0
        while checked < samples:
            n = int(rng.integers(4, 10))
            g = random_graph(rng, n, float(rng.uniform(0.2, 0.8)))
            size = int(rng.integers(4, n + 1))
            u = frozenset(int(x) for x in rng.choice(n, size=size, replace=False))
            sub = induced(g, u)
            if not is_connected(sub.graph) or top_decomposition(sub.graph)[0] != PRIME:
                continue
            checked += 1
            m = minimal_strong_module(md_tree(g), u)
            self.assertEqual(m.kind, PRIME)
            touched = [c.vertices for c in m.children if c.vertices & u]
            host = quotient_of(g, touched).qgraph
            self.assertTrue(embeds_induced(host, top_quotient(sub.graph)))

    def test_clique_sub_quotient_need_not_embed(self):
        """Test a clique sub-quotient of P4 joined with P4 does not embed in its edge quotient"""
        g = build_graph([
            ('v1', 'v2'), ('v2', 'v3'), ('v3', 'v4'),
            ('u1', 'u2'), ('u2', 'u3'), ('u3', 'u4'),
        ] + [(f'v{i}', f'u{j}') for i in range(1, 5) for j in range(1, 5)])
        u = g.ids_of(['v2', 'v3', 'u2', 'u3'])
        self.assertTrue(is_clique(g, u))
        kind, parts = top_decomposition(g)
        self.assertEqual(kind, SERIES)
        self.assertEqual(len(parts), 2)
        self.assertEqual(minimal_strong_module(md_tree(g), u).vertices, frozenset(g.vertices()))
        host = quotient_of(g, [p for p in parts if p & u]).qgraph
        self.assertFalse(embeds_induced(host, top_quotient(induced(g, u).graph)))

    def test_independent_sub_quotient_need_not_embed(self):
        """Test an independent sub-quotient does not embed in the P4 quotient"""
        g = build_graph([('v1', 'v3'), ('v2', 'v3'), ('v3', 'v4'), ('v4', 'v5'), ('v4', 'v6')])
        u = g.ids_of(['v1', 'v2', 'v5', 'v6'])
        q = top_quotient(g)
        self.assertTrue(nx.is_isomorphic(to_networkx(q), nx.path_graph(4)))
        tree = md_tree(g)
        self.assertEqual(minimal_strong_module(tree, u).vertices, frozenset(g.vertices()))
        host = quotient_of(g, [c.vertices for c in tree.children if c.vertices & u]).qgraph
        sub_quotient = top_quotient(induced(g, u).graph)
        self.assertEqual(sub_quotient.n, 4)
        self.assertFalse(embeds_induced(host, sub_quotient))
