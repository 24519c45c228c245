import itertools

import networkx as nx
from django.test import SimpleTestCase

from graphs.exceptions import NegativeWeightError, SelfLoopError, VertexRangeError
from graphs.services import (
    ASSOCIATION,
    DISSOCIATION,
    Graph,
    build_graph,
    co_components,
    complement,
    components,
    induced,
    is_clique,
    is_cluster,
    is_triangle_free,
    list_triangles,
    validate_solution,
)


def to_networkx(g):
    nxg = nx.Graph()
    nxg.add_nodes_from(g.vertices())
    nxg.add_edges_from(g.edges())
    return nxg


def cycle(n):
    return build_graph([(i, (i + 1) % n) for i in range(n)])


def clique(n):
    return build_graph(itertools.combinations(range(n), 2), vertices=range(n))


GEM_EDGES = [('p1', 'p2'), ('p2', 'p3'), ('p3', 'p4')] + [(p, 'x') for p in ('p1', 'p2', 'p3', 'p4')]
BULL_EDGES = [('t1', 't2'), ('t2', 't3'), ('t3', 't1'), ('t1', 'p1'), ('t2', 'p2')]


class BuildGraphTests(SimpleTestCase):
    """Test cases for build_graph"""

    def test_path_from_labels(self):
        """Test two labelled edges give a P3"""
        g = build_graph([('a', 'b'), ('b', 'c')])
        self.assertEqual(g.n, 3)
        self.assertEqual(g.m, 2)
        self.assertEqual(g.labels, ('a', 'b', 'c'))
        self.assertEqual(g.adjacency, ((1,), (0, 2), (1,)))

    def test_repeated_pairs_collapse(self):
        """Test repeated and reversed pairs are deduplicated"""
        g = build_graph([('a', 'b'), ('a', 'b'), ('b', 'a')])
        self.assertEqual(g.n, 2)
        self.assertEqual(g.m, 1)

    def test_self_loop_rejected(self):
        """Test a self-loop is rejected with the offending pair"""
        with self.assertRaises(SelfLoopError) as ctx:
            build_graph([('a', 'a')])
        self.assertEqual(ctx.exception.pair, ('a', 'a'))

    def test_negative_weight_rejected(self):
        """Test negative and non-finite weights are rejected"""
        with self.assertRaises(NegativeWeightError):
            build_graph([('a', 'b')], weights={'a': -1})
        with self.assertRaises(NegativeWeightError):
            build_graph([('a', 'b')], weights={'a': float('inf')})

    def test_weights_and_isolated_labels(self):
        """Test weights default to 1 and weight-only labels become isolated vertices"""
        g = build_graph([('a', 'b')], weights={'b': 5, 'z': 2}, vertices=['y'])
        self.assertEqual(g.labels, ('a', 'b', 'y', 'z'))
        self.assertEqual(g.weights, (1, 5, 1, 2))
        self.assertEqual(g.degree(2), 0)
        self.assertEqual(g.degree(3), 0)

    def test_has_edge_matches_both_representations(self):
        """Test the matrix and binary-search adjacency tests agree"""
        with self.settings(CLUSTERKIT={'ADJACENCY_MATRIX_THRESHOLD': 0}):
            g = cycle(7)
            sparse = {(u, v) for u in g.vertices() for v in g.vertices() if g.has_edge(u, v)}
        with self.settings(CLUSTERKIT={'ADJACENCY_MATRIX_THRESHOLD': 1000}):
            g = cycle(7)
            dense = {(u, v) for u in g.vertices() for v in g.vertices() if g.has_edge(u, v)}
        self.assertEqual(sparse, dense)
        self.assertEqual(len(sparse), 14)

    def test_label_lookup(self):
        """Test labels map to ids and back"""
        g = build_graph([('x', 'y'), ('y', 'z')])
        self.assertEqual(g.id_of('z'), 2)
        self.assertEqual(g.ids_of(['x', 'z']), frozenset({0, 2}))
        self.assertEqual(g.labels_of({2, 0}), ['x', 'z'])

    def test_from_edge_ids_rejects_out_of_range(self):
        """Test edge ids outside 0..n-1 are rejected"""
        with self.assertRaises(VertexRangeError):
            Graph.from_edge_ids(2, [(0, 2)])


class InducedTests(SimpleTestCase):
    """Test cases for induced subgraphs"""

    def test_consecutive_cycle_vertices_give_path(self):
        """Test three consecutive vertices of C5 induce a P3"""
        sub = induced(cycle(5), {0, 1, 2})
        self.assertEqual(sub.graph.m, 2)
        self.assertEqual(sub.origin, (0, 1, 2))

    def test_gem_path_vertices_give_p4(self):
        """Test the path vertices of a gem induce a P4"""
        g = build_graph(GEM_EDGES)
        sub = induced(g, g.ids_of(['p1', 'p2', 'p3', 'p4']))
        self.assertTrue(nx.is_isomorphic(to_networkx(sub.graph), nx.path_graph(4)))

    def test_empty_set(self):
        """Test inducing on the empty set gives the empty graph"""
        sub = induced(cycle(5), set())
        self.assertEqual(sub.graph.n, 0)
        self.assertEqual(sub.origin, ())

    def test_out_of_range_rejected(self):
        """Test an id outside the graph is rejected"""
        with self.assertRaises(VertexRangeError):
            induced(cycle(5), {0, 5})

    def test_idempotence(self):
        """Test inducing on the full vertex set of an induced graph changes nothing"""
        g = build_graph(GEM_EDGES)
        sub = induced(g, {0, 2, 3, 4}).graph
        self.assertEqual(induced(sub, sub.vertices()).graph, sub)

    def test_lift_maps_back_to_parent(self):
        """Test local ids lift to parent ids"""
        sub = induced(cycle(6), {1, 3, 5})
        self.assertEqual(sub.lift({0, 2}), frozenset({1, 5}))


class ComponentTests(SimpleTestCase):
    """Test cases for components and co-components"""

    def test_components(self):
        """Test component counts on small examples"""
        k3_k2 = build_graph([(0, 1), (1, 2), (0, 2), (3, 4)])
        self.assertEqual(sorted(len(p) for p in components(k3_k2)), [2, 3])
        self.assertEqual(len(components(cycle(5))), 1)
        self.assertEqual(len(components(build_graph([], vertices=range(4)))), 4)

    def test_co_components(self):
        """Test co-components on the P3, K4 and 2K2 examples"""
        p3 = build_graph([('a', 'b'), ('b', 'c')])
        self.assertEqual(co_components(p3), [frozenset({0, 2}), frozenset({1})])
        self.assertEqual(len(co_components(clique(4))), 4)
        self.assertEqual(len(co_components(build_graph([(0, 1), (2, 3)]))), 1)

    def test_co_components_match_complement_components(self):
        """Test co-components equal components of the explicit complement"""
        for mask in range(0, 1 << 10, 7):
            pairs = [pair for i, pair in enumerate(itertools.combinations(range(5), 2)) if mask >> i & 1]
            g = Graph.from_edge_ids(5, pairs)
            expected = sorted(frozenset(c) for c in nx.connected_components(nx.complement(to_networkx(g))))
            self.assertEqual(sorted(co_components(g)), expected)
            self.assertEqual(co_components(g), components(complement(g)))


class PredicateTests(SimpleTestCase):
    """Test cases for is_cluster, is_triangle_free and list_triangles"""

    def test_cluster(self):
        """Test two disjoint triangles form a cluster graph"""
        g = build_graph([(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
        self.assertTrue(is_cluster(g))
        self.assertIsNone(is_cluster(g).witness)

    def test_p3_witness(self):
        """Test a P3 is reported with its center in the middle"""
        result = is_cluster(build_graph([('a', 'b'), ('b', 'c')]))
        self.assertFalse(result)
        self.assertEqual(result.witness, (0, 1, 2))

    def test_every_p3_witness_is_induced(self):
        """Test returned P3 witnesses are induced on all graphs with 5 vertices"""
        pairs_all = list(itertools.combinations(range(5), 2))
        for mask in range(1 << 10):
            g = Graph.from_edge_ids(5, [p for i, p in enumerate(pairs_all) if mask >> i & 1])
            result = is_cluster(g)
            is_union_of_cliques = all(is_clique(g, part) for part in components(g))
            self.assertEqual(bool(result), is_union_of_cliques)
            if not result:
                a, b, c = result.witness
                self.assertTrue(g.has_edge(a, b) and g.has_edge(b, c))
                self.assertFalse(g.has_edge(a, c))

    def test_triangle_free(self):
        """Test triangle detection on C5 and the bull"""
        self.assertTrue(is_triangle_free(cycle(5)))
        bull = build_graph(BULL_EDGES)
        result = is_triangle_free(bull)
        self.assertFalse(result)
        self.assertEqual(set(result.witness), set(bull.ids_of(['t1', 't2', 't3'])))

    def test_list_triangles(self):
        """Test triangle listing against networkx triangle counts"""
        g = build_graph(GEM_EDGES)
        self.assertEqual(len(list_triangles(g)), sum(nx.triangles(to_networkx(g)).values()) // 3)
        self.assertEqual(len(list_triangles(clique(5))), 10)


class ValidateSolutionTests(SimpleTestCase):
    """Test cases for validate_solution"""

    def setUp(self):
        self.p3 = build_graph([('a', 'b'), ('b', 'c')])
        self.k3 = clique(3)
        self.c4 = cycle(4)

    def test_center_of_p3(self):
        """Test deleting the P3 center is valid in both modes"""
        self.assertTrue(validate_solution(self.p3, {1}, ASSOCIATION))
        self.assertTrue(validate_solution(self.p3, {1}, DISSOCIATION))

    def test_triangle(self):
        """Test an untouched triangle is an association set but not a dissociation set"""
        self.assertTrue(validate_solution(self.k3, set(), ASSOCIATION))
        result = validate_solution(self.k3, set(), DISSOCIATION)
        self.assertFalse(result)
        self.assertEqual(len(set(result.witness)), 3)

    def test_cycle_fails_both(self):
        """Test an untouched C4 fails both modes"""
        self.assertFalse(validate_solution(self.c4, set(), ASSOCIATION))
        self.assertFalse(validate_solution(self.c4, set(), DISSOCIATION))

    def test_deleting_everything_is_valid(self):
        """Test the full vertex set is always valid"""
        for g in (self.p3, self.k3, self.c4):
            for mode in (ASSOCIATION, DISSOCIATION):
                self.assertTrue(validate_solution(g, g.vertices(), mode))

    def test_dissociation_implies_association(self):
        """Test every dissociation-valid set on C5 is association-valid"""
        c5 = cycle(5)
        for size in range(6):
            for x in itertools.combinations(range(5), size):
                if validate_solution(c5, x, DISSOCIATION):
                    self.assertTrue(validate_solution(c5, x, ASSOCIATION))

    def test_unknown_mode_rejected(self):
        """Test an unknown mode raises ValueError"""
        with self.assertRaises(ValueError):
            validate_solution(self.p3, set(), 'editing')
