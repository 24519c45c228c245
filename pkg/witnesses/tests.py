import itertools

import networkx as nx
import numpy as np
from django.test import SimpleTestCase

from graphs.exceptions import CertificationError, GraphError
from graphs.services import Graph, build_graph, is_cluster
from witnesses.patterns import BULL, C4, DART, FORBIDDEN, FOX, GEM, KINDS, P4, pattern_graph, pattern_networkx
from witnesses.services import (
    canonical_order,
    certify,
    classify,
    connected_subsets,
    find_forbidden_bruteforce,
    find_forbidden_in,
    find_p3,
    is_trivially_perfect,
    tp_check,
)

ALL_PAIRS_5 = list(itertools.combinations(range(5), 2))


def to_networkx(g):
    nxg = nx.Graph()
    nxg.add_nodes_from(g.vertices())
    nxg.add_edges_from(g.edges())
    return nxg


def random_graph(rng, n, p):
    pairs = [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]
    return Graph.from_edge_ids(n, pairs)


def has_induced(g, patterns):
    host = to_networkx(g)
    return any(
        nx.algorithms.isomorphism.GraphMatcher(host, pattern).subgraph_is_isomorphic()
        for pattern in patterns
    )


def cycle(n):
    return build_graph([(i, (i + 1) % n) for i in range(n)])


class ClassifyTests(SimpleTestCase):
    """Test cases for classify and canonical ordering"""

    def test_dart_example(self):
        """Test the edges ab bc ca da ae ec classify as a dart in that order"""
        g = build_graph([('a', 'b'), ('b', 'c'), ('c', 'a'), ('d', 'a'), ('a', 'e'), ('e', 'c')])
        self.assertEqual(classify(g, g.vertices()), DART)
        order = canonical_order(g, DART, g.vertices())
        self.assertEqual([g.labels[v] for v in order], ['a', 'b', 'c', 'd', 'e'])

    def test_fox_example(self):
        """Test an edge joined to three independent vertices is a fox"""
        g = build_graph([(x, y) for x in ('a', 'c') for y in ('b', 'd', 'e')] + [('a', 'c')])
        self.assertEqual(classify(g, g.vertices()), FOX)
        order = canonical_order(g, FOX, g.vertices())
        self.assertEqual({g.labels[v] for v in order[:2]}, {'a', 'c'})

    def test_clique_subsets_are_nothing(self):
        """Test four vertices of K5 match no pattern"""
        k5 = Graph.from_edge_ids(5, ALL_PAIRS_5)
        self.assertIsNone(classify(k5, {0, 1, 2, 3}))

    def test_wrong_cardinality_rejected(self):
        """Test classify rejects sets outside three to five vertices"""
        with self.assertRaises(GraphError):
            classify(cycle(6), range(6))
        with self.assertRaises(GraphError):
            classify(cycle(6), {0, 1})

    def test_patterns_classify_as_themselves(self):
        """Test each pattern graph classifies as its own kind in canonical order"""
        for kind in KINDS:
            g = pattern_graph(kind)
            self.assertEqual(classify(g, g.vertices()), kind)
            self.assertEqual(canonical_order(g, kind, g.vertices()), tuple(g.vertices()))

    def test_exhaustive_five_vertex_graphs(self):
        """Test classify agrees with networkx isomorphism on all labelled 5-vertex graphs"""
        forbidden = {kind: pattern_networkx(kind) for kind in FORBIDDEN if kind != C4}
        for mask in range(1 << 10):
            g = Graph.from_edge_ids(5, [p for i, p in enumerate(ALL_PAIRS_5) if mask >> i & 1])
            nxg = to_networkx(g)
            expected = next((k for k, pattern in forbidden.items() if nx.is_isomorphic(nxg, pattern)), None)
            kind = classify(g, g.vertices())
            self.assertEqual(kind, expected)
            if kind is not None:
                certified = certify(g, kind, canonical_order(g, kind, g.vertices()))
                self.assertTrue(certified.certified)


class CertifyTests(SimpleTestCase):
    """Test cases for witness certification"""

    def setUp(self):
        self.gem = pattern_graph(GEM)

    def test_canonical_gem(self):
        """Test the canonical gem order certifies"""
        witness = certify(self.gem, GEM, (0, 1, 2, 3, 4))
        self.assertTrue(witness.certified)
        self.assertTrue(witness.is_forbidden)

    def test_wrong_order_fails(self):
        """Test a permuted gem tuple fails with the step name"""
        with self.assertRaises(CertificationError) as ctx:
            certify(self.gem, GEM, (4, 1, 2, 3, 0), step='series-gem')
        self.assertEqual(ctx.exception.step, 'series-gem')

    def test_wrong_kind_fails(self):
        """Test a gem does not certify as a fox"""
        with self.assertRaises(CertificationError):
            certify(self.gem, FOX, (0, 1, 2, 3, 4))

    def test_repeated_vertices_fail(self):
        """Test repeated vertices never certify"""
        with self.assertRaises(CertificationError):
            certify(self.gem, C4, (0, 1, 1, 0))


class FindP3Tests(SimpleTestCase):
    """Test cases for find_p3"""

    def test_cluster_graph(self):
        """Test a cluster graph has no P3"""
        g = build_graph([(0, 1), (1, 2), (0, 2), (3, 4)])
        self.assertIsNone(find_p3(g))

    def test_star(self):
        """Test the P3 of a star passes through its center"""
        g = build_graph([('c', 'x'), ('c', 'y'), ('c', 'z')])
        witness = find_p3(g)
        self.assertEqual(witness.vertices[1], g.id_of('c'))
        self.assertTrue(witness.certified)

    def test_c5(self):
        """Test a C5 P3 is three consecutive vertices"""
        witness = find_p3(cycle(5))
        a, b, c = witness.vertices
        self.assertIn((b - a) % 5, (1, 4))
        self.assertIn((c - b) % 5, (1, 4))

    def test_agrees_with_is_cluster(self):
        """Test find_p3 finds nothing exactly on cluster graphs"""
        rng = np.random.default_rng(1)
        for _ in range(200):
            g = random_graph(rng, 7, float(rng.random()))
            self.assertEqual(find_p3(g) is None, bool(is_cluster(g)))


class TrivialPerfectTests(SimpleTestCase):
    """Test cases for tp_check"""

    def test_cluster_with_universal_vertices(self):
        """Test cliques plus one universal vertex per component are trivially perfect"""
        g = build_graph([('u', 'a'), ('u', 'b'), ('a', 'b'), ('u', 'c'), ('w', 'x'), ('w', 'y')])
        self.assertIsNone(tp_check(g))
        self.assertTrue(is_trivially_perfect(g))

    def test_p4_and_c4(self):
        """Test P4 and C4 are reported as themselves"""
        self.assertEqual(tp_check(pattern_graph(P4)).kind, P4)
        self.assertEqual(tp_check(pattern_graph(C4)).kind, C4)

    def test_distance_three_path(self):
        """Test a long path is rejected with an induced P4"""
        witness = tp_check(build_graph([(i, i + 1) for i in range(7)]))
        self.assertEqual(witness.kind, P4)

    def test_agrees_with_bruteforce(self):
        """Test acceptance matches absence of induced P4 and C4 on small graphs"""
        patterns = [pattern_networkx(P4), pattern_networkx(C4)]
        for mask in range(1 << 10):
            g = Graph.from_edge_ids(5, [p for i, p in enumerate(ALL_PAIRS_5) if mask >> i & 1])
            witness = tp_check(g)
            self.assertEqual(witness is None, not has_induced(g, patterns))
        rng = np.random.default_rng(8)
        for _ in range(300):
            g = random_graph(rng, 6, float(rng.random()))
            witness = tp_check(g)
            self.assertEqual(witness is None, not has_induced(g, patterns))
            if witness is not None:
                self.assertTrue(witness.certified)
                certify(g, witness.kind, witness.vertices)


class ForbiddenSearchTests(SimpleTestCase):
    """Test cases for find_forbidden_bruteforce and find_forbidden_in"""

    def test_c5_is_free(self):
        """Test a C5 contains no forbidden graph"""
        self.assertIsNone(find_forbidden_bruteforce(cycle(5)))

    def test_gem_found(self):
        """Test a gem with a pendant still yields a gem"""
        g = build_graph([('p1', 'p2'), ('p2', 'p3'), ('p3', 'p4')]
                        + [(p, 'x') for p in ('p1', 'p2', 'p3', 'p4')] + [('x', 'y'), ('y', 'z')])
        witness = find_forbidden_bruteforce(g)
        self.assertIsNotNone(witness)
        self.assertTrue(witness.certified)

    def test_cluster_is_free(self):
        """Test cluster graphs contain no forbidden graph"""
        g = build_graph([(0, 1), (1, 2), (0, 2), (3, 4), (5, 6), (5, 7), (6, 7), (7, 8), (5, 8), (6, 8)])
        self.assertIsNone(find_forbidden_bruteforce(g))

    def test_agrees_with_networkx(self):
        """Test the search finds something exactly when networkx finds a forbidden subgraph"""
        patterns = [pattern_networkx(kind) for kind in FORBIDDEN]
        rng = np.random.default_rng(21)
        for _ in range(150):
            g = random_graph(rng, 7, float(rng.random()))
            witness = find_forbidden_bruteforce(g)
            self.assertEqual(witness is not None, has_induced(g, patterns))

    def test_connected_subsets_are_complete(self):
        """Test the enumeration yields every connected k-subset once"""
        rng = np.random.default_rng(4)
        for _ in range(30):
            g = random_graph(rng, 8, 0.35)
            nxg = to_networkx(g)
            for k in (4, 5):
                found = list(connected_subsets(g, k))
                self.assertEqual(len(found), len(set(found)))
                expected = {s for s in itertools.combinations(range(8), k) if nx.is_connected(nxg.subgraph(s))}
                self.assertEqual(set(found), expected)

    def test_find_forbidden_in_prefers_five_vertices(self):
        """Test a bull inside a small vertex set is found"""
        bull = pattern_graph(BULL)
        witness = find_forbidden_in(bull, bull.vertices())
        self.assertEqual(witness.kind, BULL)
        self.assertEqual(witness.vertices, (0, 1, 2, 3, 4))
        self.assertIsNone(find_forbidden_in(pattern_graph(P4), range(4)))
