import itertools
import logging
from fractions import Fraction

import networkx as nx
import numpy as np
from django.test import SimpleTestCase

from association.exact import exact_association, exact_solution
from association.reduction import (
    CROWDED_MODULE_NONTRIVIAL,
    MODULE_NOT_CLUSTER,
    NON_CLIQUE_MODULE_NEIGHBORHOOD,
    QUOTIENT_TRIANGLE,
    QuotientWorkspace,
    check_reduce_postconditions,
    shape_violations,
    reduce,
    two_cliques_shape,
)
from association.services import (
    EXACT,
    MODULE_NEIGHBOR,
    NAIVE,
    QUOTIENT_DISSOCIATION,
    TWO_CLIQUES,
    contract_to_weighted_quotient,
    lift_quotient_solution,
    module_neighbor_step,
    naive_3_approx,
    solve,
    two_cliques_solution,
)
from decomposition.services import quotient_of
from dissociation.services import DissociationResult, approx_dissociation_2, exact_dissociation
from graphs.exceptions import CertificationError, ExactUnavailable, GraphError
from graphs.services import ASSOCIATION, Graph, build_graph, is_triangle_free, validate_solution
from witnesses.patterns import BULL, C4, DART, FORBIDDEN, FOX, GEM, pattern_graph

RATIO = Fraction(5, 2)


def random_graph(rng, n, p):
    pairs = [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]
    return Graph.from_edge_ids(n, pairs)


def random_bipartite(rng, n, p):
    left = n // 2
    pairs = [(u, v) for u in range(left) for v in range(left, n) if rng.random() < p]
    return Graph.from_edge_ids(n, pairs)


def cycle(n):
    return build_graph([(i, (i + 1) % n) for i in range(n)])


def clique(labels):
    return list(itertools.combinations(labels, 2))


def universal_plus_cliques(u, a, b):
    universal = [f'u{i}' for i in range(u)]
    first = [f'a{i}' for i in range(a)]
    second = [f'b{i}' for i in range(b)]
    edges = clique(universal) + clique(first) + clique(second)
    edges += [(x, y) for x in universal for y in first + second]
    return build_graph(edges, vertices=universal + first + second)


def blown_up(kind, copies):
    """Each pattern vertex replaced by ``copies`` pairwise non-adjacent twins."""
    base = pattern_graph(kind)
    n = base.n
    pairs = [(u + i * n, v + j * n) for u, v in base.edges() for i in range(copies) for j in range(copies)]
    return Graph.from_edge_ids(n * copies, pairs)


def to_networkx(g):
    nxg = nx.Graph()
    nxg.add_nodes_from(g.vertices())
    nxg.add_edges_from(g.edges())
    return nxg


class ReduceTests(SimpleTestCase):
    """Test cases for reduce"""

    def test_cluster_graph(self):
        """Test a cluster graph needs no deletion"""
        g = build_graph(clique('abc') + [('x', 'y')], vertices=['z'])
        result = reduce(g)
        self.assertEqual(result.removed, frozenset())
        self.assertEqual(result.witnesses, ())

    def test_gem(self):
        """Test a gem is removed whole as a single gem witness"""
        result = reduce(pattern_graph(GEM))
        self.assertEqual(result.removed, frozenset(range(5)))
        self.assertEqual([w.kind for w in result.witnesses], [GEM])
        self.assertTrue(result.witnesses[0].certified)

    def test_c5_untouched(self):
        """Test a C5 already has the required shape"""
        g = cycle(5)
        result = reduce(g)
        self.assertEqual(result.removed, frozenset())
        self.assertEqual(shape_violations(g), [])

    def test_every_forbidden_graph_is_removed(self):
        """Test each forbidden graph is found and deleted as itself"""
        for kind in FORBIDDEN:
            g = pattern_graph(kind)
            result = reduce(g)
            self.assertEqual(result.removed, frozenset(g.vertices()), kind)
            self.assertEqual([w.kind for w in result.witnesses], [kind])

    def test_triangle_disposal_removes_every_copy(self):
        """Test a bull blown up into twin pairs loses two disjoint bulls at once"""
        g = blown_up(BULL, 2)
        result = reduce(g)
        self.assertEqual(result.removed, frozenset(g.vertices()))
        self.assertEqual([w.kind for w in result.witnesses], [BULL, BULL])
        first, second = result.witnesses
        self.assertFalse(set(first.vertices) & set(second.vertices))

    def test_postconditions_on_random_graphs(self):
        """Test witnesses are disjoint, certified and leave the required shape"""
        rng = np.random.default_rng(53)
        for _ in range(150):
            n = int(rng.integers(4, 11))
            g = random_graph(rng, n, float(rng.random()))
            result = reduce(g)
            self.assertEqual(check_reduce_postconditions(g, result.removed, result.witnesses), [])

    def test_postconditions_on_sparse_graph(self):
        """Test the postconditions on a larger sparse graph"""
        rng = np.random.default_rng(59)
        g = random_graph(rng, 60, 0.08)
        result = reduce(g)
        self.assertEqual(check_reduce_postconditions(g, result.removed, result.witnesses), [])


class QuotientWorkspaceTests(SimpleTestCase):
    """Test cases for QuotientWorkspace"""

    def setUp(self):
        p4 = Graph.from_edge_ids(4, [(0, 1), (1, 2), (2, 3)])
        self.removed = set()
        self.ws = QuotientWorkspace(quotient_of(p4, [{0}, {1}, {2}, {3}]), self.removed)

    def test_merge_groups_vertices(self):
        """Test merged quotient vertices share a root and pool their neighbors"""
        root = self.ws.merge(2, 0)
        self.assertEqual(root, 0)
        self.assertEqual(self.ws.find(2), 0)
        self.assertEqual(self.ws.alive_vertices(0), [0, 2])
        self.assertEqual(self.ws.closed_neighbors(0), frozenset({0, 1, 3}))

    def test_shared_removals_kill_groups(self):
        """Test deletions in the shared set show through the workspace"""
        self.ws.merge(0, 2)
        self.removed.add(0)
        self.assertTrue(self.ws.is_alive(0))
        self.assertEqual(self.ws.alive_vertices(0), [2])
        self.removed.add(2)
        self.assertFalse(self.ws.is_alive(0))
        self.assertEqual(self.ws.closed_neighbors(1), frozenset({1}))


class ShapeViolationTests(SimpleTestCase):
    """Test cases for shape_violations and check_reduce_postconditions"""

    def test_star_passes(self):
        """Test a star has an edgeless module with one neighbor"""
        self.assertEqual(shape_violations(build_graph([('c', x) for x in 'wxyz'])), [])

    def test_gem_module_not_cluster(self):
        """Test the path module of a gem is reported"""
        self.assertEqual(shape_violations(pattern_graph(GEM)), [MODULE_NOT_CLUSTER])

    def test_fox_clauses(self):
        """Test a fox has a triangle quotient and a module with two neighbors"""
        self.assertEqual(
            shape_violations(pattern_graph(FOX)),
            [QUOTIENT_TRIANGLE, NON_CLIQUE_MODULE_NEIGHBORHOOD],
        )

    def test_crowded_module(self):
        """Test a twin pair with three quotient neighbors is reported"""
        g = build_graph([('a', 'b'), ('b', 'c'), ('c', 'd'), ('d', 'e'), ('e', 'a'),
                         ('a2', 'b'), ('a2', 'e'), ('a', 'a2'), ('a', 'x'), ('a2', 'x'), ('x', 'y')])
        self.assertIn(CROWDED_MODULE_NONTRIVIAL, shape_violations(g))

    def test_unreduced_graph_fails(self):
        """Test an untouched gem fails the postcondition check"""
        problems = check_reduce_postconditions(pattern_graph(GEM), frozenset(), ())
        self.assertEqual(problems, [f"shape: {MODULE_NOT_CLUSTER}"])

    def test_overlapping_witnesses_fail(self):
        """Test a witness listed twice is reported as overlapping"""
        g = pattern_graph(C4)
        witness = reduce(g).witnesses[0]
        problems = check_reduce_postconditions(g, frozenset(g.vertices()), (witness, witness))
        self.assertTrue(any('overlaps' in problem for problem in problems))


class SolveTests(SimpleTestCase):
    """Test cases for solve"""

    def test_clique(self):
        """Test a clique needs nothing"""
        self.assertEqual(solve(build_graph(clique('abcd'))).deleted, frozenset())

    def test_p3(self):
        """Test a P3 loses its center"""
        g = build_graph([('a', 'b'), ('b', 'c')])
        solution = solve(g)
        self.assertEqual(solution.deleted, frozenset({g.id_of('b')}))
        self.assertEqual(solution.provenance, {g.id_of('b'): TWO_CLIQUES})

    def test_bowtie(self):
        """Test two triangles sharing a vertex lose only that vertex"""
        g = build_graph(clique(['v', 'a', 'b']) + clique(['v', 'c', 'd']))
        self.assertEqual(solve(g).deleted, frozenset({g.id_of('v')}))

    def test_summary_logged_at_debug(self):
        """Test solve logs its summary at DEBUG and nothing at INFO"""
        with self.assertLogs('association.services', level='DEBUG') as logs:
            solve(cycle(5))
        self.assertTrue(any(r.getMessage().startswith('solve: n=5') for r in logs.records))
        self.assertTrue(all(r.levelno == logging.DEBUG for r in logs.records))

    def test_c5(self):
        """Test a C5 is solved through its quotient with two deletions"""
        solution = solve(cycle(5))
        self.assertEqual(len(solution.deleted), 2)
        self.assertEqual(set(solution.provenance.values()), {QUOTIENT_DISSOCIATION})
        self.assertEqual(solution.quotient_lower_bound, 1)

    def test_module_neighbor_rule(self):
        """Test a pendant path behind an edgeless module is handled by its single neighbor"""
        g = build_graph([('v', 'a'), ('v', 'b'), ('v', 'c'), ('c', 'd'), ('d', 'e'), ('e', 'f'), ('f', 'c')])
        solution = solve(g)
        self.assertTrue(validate_solution(g, solution.deleted, ASSOCIATION))
        self.assertLessEqual(len(solution.deleted), RATIO * exact_association(g)[1])

    def test_forbidden_graphs(self):
        """Test no forbidden graph loses more than five vertices"""
        for kind in FORBIDDEN:
            g = pattern_graph(kind)
            self.assertLessEqual(len(solve(g).deleted), 5)
            self.assertLessEqual(len(naive_3_approx(g).deleted), 5)

    def test_blown_up_bull(self):
        """Test two disjoint bull witnesses account for all ten deletions"""
        solution = solve(blown_up(BULL, 2))
        self.assertEqual(len(solution.deleted), 10)
        self.assertEqual(solution.lower_bound, 4)
        self.assertEqual(set(solution.provenance.values()), {BULL})

    def test_ratio_against_exact(self):
        """Test validity, provenance and the 2.5 ratio on random graphs"""
        rng = np.random.default_rng(61)
        for _ in range(200):
            n = int(rng.integers(4, 11))
            g = random_graph(rng, n, float(rng.random()))
            solution = solve(g)
            _, optimum = exact_association(g)
            self.assertTrue(validate_solution(g, solution.deleted, ASSOCIATION))
            self.assertEqual(set(solution.provenance), set(solution.deleted))
            self.assertLessEqual(len(solution.deleted), RATIO * optimum)
            self.assertLessEqual(solution.lower_bound, optimum)
            self.assertLessEqual(len(solution.deleted), RATIO * solution.lower_bound)
            covered = [v for w in solution.witnesses for v in w.vertices]
            self.assertEqual(len(covered), len(set(covered)))
            self.assertTrue(all(w.certified and w.kind in FORBIDDEN for w in solution.witnesses))

    def test_large_sparse_graph(self):
        """Test a sparse graph beyond exact reach still meets its certificate"""
        rng = np.random.default_rng(67)
        g = random_graph(rng, 300, 0.02)
        solution = solve(g)
        self.assertTrue(validate_solution(g, solution.deleted, ASSOCIATION))
        self.assertLessEqual(len(solution.deleted), RATIO * solution.lower_bound)


class TwoCliquesTests(SimpleTestCase):
    """Test cases for two_cliques_shape and two_cliques_solution"""

    def test_one_universal_vertex(self):
        """Test one universal vertex beats two cliques of two"""
        g = universal_plus_cliques(1, 2, 2)
        chosen = two_cliques_solution(g)
        self.assertEqual(g.labels_of(chosen), ['u0'])

    def test_small_clique(self):
        """Test a single-vertex clique beats three universal vertices"""
        g = universal_plus_cliques(3, 1, 5)
        self.assertEqual(g.labels_of(two_cliques_solution(g)), ['a0'])

    def test_three_way_tie(self):
        """Test a three-way tie still deletes two vertices"""
        g = universal_plus_cliques(2, 2, 2)
        self.assertEqual(len(two_cliques_solution(g)), 2)

    def test_matches_exact(self):
        """Test the rule is optimal for every small shape"""
        for u, a, b in itertools.product(range(1, 4), range(1, 4), range(1, 4)):
            g = universal_plus_cliques(u, a, b)
            chosen = two_cliques_solution(g)
            self.assertTrue(validate_solution(g, chosen, ASSOCIATION))
            self.assertEqual(len(chosen), exact_association(g)[1])

    def test_shape(self):
        """Test the shape splits universal vertices from both cliques"""
        g = universal_plus_cliques(1, 2, 3)
        universal, first, second = two_cliques_shape(g)
        self.assertEqual(g.labels_of(universal), ['u0'])
        self.assertEqual(g.labels_of(first), ['a0', 'a1'])
        self.assertEqual(g.labels_of(second), ['b0', 'b1', 'b2'])
        self.assertIsNone(two_cliques_shape(cycle(5)))

    def test_wrong_shape_rejected(self):
        """Test a C5 is rejected"""
        with self.assertRaises(GraphError):
            two_cliques_solution(cycle(5))


class ModuleNeighborTests(SimpleTestCase):
    """Test cases for module_neighbor_step"""

    def test_p3(self):
        """Test the ends of a P3 have the center as their only neighbor"""
        g = build_graph([('a', 'b'), ('b', 'c')])
        v, rest = module_neighbor_step(g, g.ids_of(['a', 'c']))
        self.assertEqual(g.labels[v], 'b')
        self.assertEqual(rest, frozenset())

    def test_star(self):
        """Test the leaves of a star point at its center"""
        g = build_graph([('c', x) for x in 'wxyz'])
        v, rest = module_neighbor_step(g, g.ids_of('wxyz'))
        self.assertEqual(g.labels[v], 'c')
        self.assertEqual(rest, frozenset())

    def test_two_edges_joined_to_a_vertex(self):
        """Test 2K2 joined to one vertex leaves nothing to recurse on"""
        g = build_graph([('a', 'b'), ('c', 'd')] + [('v', x) for x in 'abcd'])
        v, rest = module_neighbor_step(g, g.ids_of('abcd'))
        self.assertEqual(g.labels[v], 'v')
        self.assertEqual(rest, frozenset())

    def test_remaining_vertices(self):
        """Test vertices beyond the neighbor are returned for recursion"""
        g = build_graph([('a', 'v'), ('c', 'v'), ('v', 'x'), ('x', 'y')])
        v, rest = module_neighbor_step(g, g.ids_of('ac'))
        self.assertEqual(g.labels[v], 'v')
        self.assertEqual(g.labels_of(rest), ['x', 'y'])

    def test_two_neighbors_rejected(self):
        """Test a module with two neighbors is a certification failure"""
        g = build_graph([('a', 'b'), ('b', 'c'), ('c', 'd')])
        with self.assertRaises(CertificationError):
            module_neighbor_step(g, g.ids_of(['b']))


class ContractTests(SimpleTestCase):
    """Test cases for contract_to_weighted_quotient and lift_quotient_solution"""

    def test_p4(self):
        """Test a P4 is its own unit-weight quotient"""
        quotient = contract_to_weighted_quotient(build_graph([('a', 'b'), ('b', 'c'), ('c', 'd')]))
        self.assertEqual(quotient.part_weight, (1, 1, 1, 1))
        self.assertTrue(nx.is_isomorphic(to_networkx(quotient.qgraph), nx.path_graph(4)))

    def test_c5_with_true_twin(self):
        """Test a doubled C5 vertex becomes a weight-two quotient vertex"""
        g = build_graph([(i, (i + 1) % 5) for i in range(5)] + [('t', 0), ('t', 1), ('t', 4)])
        quotient = contract_to_weighted_quotient(g)
        self.assertEqual(sorted(quotient.part_weight), [1, 1, 1, 1, 2])
        self.assertIn(g.ids_of([0, 't']), quotient.parts)
        self.assertTrue(nx.is_isomorphic(to_networkx(quotient.qgraph), nx.cycle_graph(5)))

    def test_clique_rejected(self):
        """Test a triangle is refused"""
        with self.assertRaises(CertificationError):
            contract_to_weighted_quotient(build_graph(clique('abc')))

    def test_non_clique_module_rejected(self):
        """Test a module that is not a clique is refused"""
        with self.assertRaises(CertificationError):
            contract_to_weighted_quotient(build_graph([('a', 'b'), ('b', 'c')]))

    def test_disconnected_rejected(self):
        """Test a disconnected graph is refused"""
        with self.assertRaises(CertificationError):
            contract_to_weighted_quotient(build_graph([('a', 'b'), ('c', 'd')]))

    def test_lift_nothing(self):
        """Test an empty dissociation lifts to nothing"""
        g = build_graph([('a', 'b'), ('c', 'd')])
        quotient = quotient_of(g, [{0, 1}, {2, 3}])
        empty = DissociationResult(frozenset(), Fraction(0), Fraction(0))
        self.assertEqual(lift_quotient_solution(quotient, empty), frozenset())

    def test_lift_weighted_p3(self):
        """Test deleting the light center of a weighted P3 quotient costs one vertex"""
        g = build_graph(clique(['a1', 'a2']) + clique(['c1', 'c2'])
                        + [(x, 'b') for x in ('a1', 'a2', 'c1', 'c2')])
        quotient = quotient_of(g, [g.ids_of(['a1', 'a2']), g.ids_of(['b']), g.ids_of(['c1', 'c2'])])
        self.assertEqual(quotient.part_weight, (2, 1, 2))
        lifted = lift_quotient_solution(quotient, approx_dissociation_2(quotient.qgraph))
        self.assertEqual(g.labels_of(lifted), ['b'])

    def test_lift_c5(self):
        """Test a unit C5 quotient lifts two deleted vertices"""
        g = cycle(5)
        quotient = contract_to_weighted_quotient(g)
        lifted = lift_quotient_solution(quotient, approx_dissociation_2(quotient.qgraph))
        self.assertEqual(len(lifted), 2)
        self.assertTrue(validate_solution(g, lifted, ASSOCIATION))


class NaiveTests(SimpleTestCase):
    """Test cases for naive_3_approx"""

    def test_cluster(self):
        """Test a cluster graph is left alone"""
        self.assertEqual(naive_3_approx(build_graph(clique('abc'))).deleted, frozenset())

    def test_p3(self):
        """Test a P3 is deleted whole"""
        solution = naive_3_approx(build_graph([('a', 'b'), ('b', 'c')]))
        self.assertEqual(solution.deleted, frozenset({0, 1, 2}))
        self.assertEqual(set(solution.provenance.values()), {NAIVE})

    def test_c5(self):
        """Test one P3 round on a C5 leaves an edge"""
        solution = naive_3_approx(cycle(5))
        self.assertEqual(len(solution.deleted), 3)
        self.assertEqual(solution.lower_bound, 1)

    def test_ratio_against_exact(self):
        """Test validity and the ratio 3 on random graphs"""
        rng = np.random.default_rng(71)
        for _ in range(150):
            n = int(rng.integers(3, 11))
            g = random_graph(rng, n, float(rng.random()))
            solution = naive_3_approx(g)
            _, optimum = exact_association(g)
            self.assertTrue(validate_solution(g, solution.deleted, ASSOCIATION))
            self.assertLessEqual(len(solution.deleted), 3 * optimum)
            self.assertLessEqual(solution.lower_bound, optimum)


class ExactAssociationTests(SimpleTestCase):
    """Test cases for exact_association"""

    def test_forbidden_graphs_need_two(self):
        """Test every forbidden graph needs exactly two deletions"""
        for kind in FORBIDDEN:
            self.assertEqual(exact_association(pattern_graph(kind))[1], 2, kind)

    def test_c5(self):
        """Test a C5 needs two deletions"""
        self.assertEqual(exact_association(cycle(5))[1], 2)

    def test_cluster(self):
        """Test a cluster graph needs none"""
        self.assertEqual(exact_association(build_graph(clique('abc') + [('x', 'y')])), (frozenset(), 0))

    def test_lexicographic_tie_break(self):
        """Test ties on a C4 resolve to the first pair in id order"""
        self.assertEqual(exact_association(cycle(4))[0], frozenset({0, 1}))

    def test_branching_matches_enumeration(self):
        """Test the branching search finds optimum sizes"""
        rng = np.random.default_rng(73)
        graphs = [random_graph(rng, int(rng.integers(3, 11)), float(rng.random())) for _ in range(80)]
        expected = [exact_association(g)[1] for g in graphs]
        with self.settings(CLUSTERKIT={'EXACT_LEXICOGRAPHIC_MAX_VERTICES': 0}):
            for g, size in zip(graphs, expected):
                deleted, found = exact_association(g)
                self.assertEqual(found, size)
                self.assertTrue(validate_solution(g, deleted, ASSOCIATION))

    def test_many_components(self):
        """Test six disjoint C5s are solved component by component"""
        g = Graph.from_edge_ids(30, [(5 * k + i, 5 * k + (i + 1) % 5) for k in range(6) for i in range(5)])
        deleted, size = exact_association(g)
        self.assertEqual(size, 12)
        self.assertTrue(validate_solution(g, deleted, ASSOCIATION))

    def test_budget_exhausted(self):
        """Test an exhausted search on an unenumerable graph is reported"""
        overrides = {
            'EXACT_LEXICOGRAPHIC_MAX_VERTICES': 0,
            'EXACT_NODE_BUDGET': 1,
            'EXACT_ENUMERATION_MAX_VERTICES': 5,
        }
        with self.settings(CLUSTERKIT=overrides):
            with self.assertRaises(ExactUnavailable):
                exact_association(cycle(7))

    def test_enumeration_fallback(self):
        """Test an exhausted search falls back to enumeration on small graphs"""
        with self.settings(CLUSTERKIT={'EXACT_LEXICOGRAPHIC_MAX_VERTICES': 0, 'EXACT_NODE_BUDGET': 1}):
            self.assertEqual(exact_association(cycle(7))[1], 3)

    def test_triangle_free_matches_dissociation(self):
        """Test association and dissociation optima agree on bipartite graphs"""
        rng = np.random.default_rng(79)
        for _ in range(60):
            g = random_bipartite(rng, int(rng.integers(2, 13)), float(rng.random()))
            self.assertTrue(is_triangle_free(g))
            self.assertEqual(exact_association(g)[1], exact_dissociation(g).weight)

    def test_exact_solution(self):
        """Test the exact solution carries its own size as bound"""
        solution = exact_solution(pattern_graph(DART))
        self.assertEqual(solution.lower_bound, 2)
        self.assertEqual(set(solution.provenance.values()), {EXACT})
