import itertools
from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase

from dissociation.services import (
    LocalRatioStep,
    approx_dissociation_2,
    exact_dissociation,
    is_dissociation_valid,
)
from graphs.exceptions import GraphTooLargeError
from graphs.services import Graph, build_graph


def random_graph(rng, n, p, weighted=False):
    pairs = [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]
    weights = [int(w) for w in rng.integers(1, 101, size=n)] if weighted else None
    return Graph.from_edge_ids(n, pairs, weights=weights)


def clique(n):
    return Graph.from_edge_ids(n, itertools.combinations(range(n), 2))


class ApproxDissociationTests(SimpleTestCase):
    """Test cases for approx_dissociation_2"""

    def test_edge(self):
        """Test an edge is already dissociated"""
        result = approx_dissociation_2(build_graph([('a', 'b')]))
        self.assertEqual(result.deleted, frozenset())
        self.assertEqual(result.weight, 0)
        self.assertEqual(result.lower_bound, 0)

    def test_p3(self):
        """Test the P3 center is deleted after one local-ratio step"""
        result = approx_dissociation_2(build_graph([('a', 'b'), ('b', 'c')]))
        self.assertEqual(result.deleted, frozenset({1}))
        self.assertEqual(result.weight, 1)
        self.assertEqual(result.lower_bound, 1)
        self.assertEqual(result.trace, (LocalRatioStep(1, 2, Fraction(1)),))

    def test_star(self):
        """Test a K1,3 loses only its center with a half-weight step"""
        result = approx_dissociation_2(build_graph([('c', 'x'), ('c', 'y'), ('c', 'z')]))
        self.assertEqual(result.deleted, frozenset({0}))
        self.assertEqual(result.weight, 1)
        self.assertEqual(result.lower_bound, 1)
        self.assertEqual(result.trace, (LocalRatioStep(0, 3, Fraction(1, 2)),))

    def test_zero_weight_vertices_are_free(self):
        """Test a zero-weight center is deleted at no cost"""
        g = build_graph([('c', 'x'), ('c', 'y')], weights={'c': 0})
        result = approx_dissociation_2(g)
        self.assertEqual(result.deleted, frozenset({0}))
        self.assertEqual(result.weight, 0)

    def test_certificate_and_validity_on_random_graphs(self):
        """Test validity, the self-certificate and minimality on random weighted graphs"""
        rng = np.random.default_rng(31)
        for _ in range(200):
            n = int(rng.integers(2, 30))
            g = random_graph(rng, n, float(rng.random()), weighted=True)
            result = approx_dissociation_2(g)
            self.assertTrue(is_dissociation_valid(g, result.deleted))
            self.assertLessEqual(result.weight, 2 * result.lower_bound)
            for v in result.deleted:
                self.assertFalse(is_dissociation_valid(g, result.deleted - {v}))

    def test_lower_bound_against_exact(self):
        """Test the lower bound never exceeds the optimum on small graphs"""
        rng = np.random.default_rng(37)
        for _ in range(150):
            n = int(rng.integers(3, 13))
            g = random_graph(rng, n, float(rng.random()), weighted=True)
            result = approx_dissociation_2(g)
            optimum = exact_dissociation(g).weight
            self.assertLessEqual(result.lower_bound, optimum)
            self.assertLessEqual(result.weight, 2 * optimum)

    def test_scaling_equivariance(self):
        """Test scaling all weights scales weight and bound and keeps the set"""
        rng = np.random.default_rng(41)
        for _ in range(50):
            g = random_graph(rng, 12, 0.4, weighted=True)
            scaled = g.with_weights([w * 3 for w in g.weights])
            base, tripled = approx_dissociation_2(g), approx_dissociation_2(scaled)
            self.assertEqual(base.deleted, tripled.deleted)
            self.assertEqual(3 * base.weight, tripled.weight)
            self.assertEqual(3 * base.lower_bound, tripled.lower_bound)

    def test_large_sparse_graph(self):
        """Test the certificate holds on a graph too large for the exact solver"""
        rng = np.random.default_rng(43)
        g = random_graph(rng, 400, 0.02, weighted=True)
        result = approx_dissociation_2(g)
        self.assertTrue(is_dissociation_valid(g, result.deleted))
        self.assertLessEqual(result.weight, 2 * result.lower_bound)


class ExactDissociationTests(SimpleTestCase):
    """Test cases for exact_dissociation"""

    def test_clique(self):
        """Test a clique keeps exactly one edge"""
        for n in range(2, 8):
            self.assertEqual(exact_dissociation(clique(n)).weight, n - 2)

    def test_p3(self):
        """Test a P3 costs one and the tie goes to the smallest id"""
        result = exact_dissociation(build_graph([('a', 'b'), ('b', 'c')]))
        self.assertEqual(result.weight, 1)
        self.assertEqual(result.deleted, frozenset({0}))

    def test_lexicographic_tie_break(self):
        """Test ties on a C4 resolve to the smallest sorted id tuple"""
        c4 = build_graph([(0, 1), (1, 2), (2, 3), (3, 0)])
        self.assertEqual(exact_dissociation(c4).deleted, frozenset({0, 1}))

    def test_matches_enumeration(self):
        """Test the optimum equals plain subset enumeration"""
        rng = np.random.default_rng(47)
        for _ in range(60):
            n = int(rng.integers(1, 9))
            g = random_graph(rng, n, float(rng.random()), weighted=True)
            brute = min(
                sum(g.weights[v] for v in s)
                for size in range(n + 1)
                for s in itertools.combinations(range(n), size)
                if is_dissociation_valid(g, s)
            )
            self.assertEqual(exact_dissociation(g).weight, brute)

    def test_too_large_rejected(self):
        """Test the exact solver refuses graphs over its size limit"""
        with self.assertRaises(GraphTooLargeError):
            exact_dissociation(Graph.from_edge_ids(23, []))
