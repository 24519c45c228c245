import json
import os
import tempfile
import time
from io import StringIO
from unittest import skipUnless

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from association.services import solve
from core.cli import cli
from graphs.exceptions import GraphError, GraphFormatError, SelfLoopError
from graphs.services import build_graph, is_clique, is_cluster, remove_vertices, validate_solution

from .formats import apply_weights, parse_graph, parse_weights, read_graph, serialize_graph
from .generators import BIPARTITE, GNP, PLANTED, GenSpec, generate, random_weights
from .services import (
    DISS2,
    EXACT,
    EXHAUSTIVE_SMALL,
    NAIVE3,
    RANDOM_MEDIUM,
    REDUCE25,
    SCALING,
    TRIANGLE_FREE,
    Instance,
    SolverService,
    SuiteOptions,
    evaluate,
    run_suite,
)

FULL_ACCEPTANCE = getattr(settings, 'FULL_ACCEPTANCE', False)

GEM_TEXT = "p1 p2\np2 p3\np3 p4\np1 x\np2 x\np3 x\np4 x\n"


class ParseGraphTests(SimpleTestCase):
    """Test cases for the edge-list format"""

    def test_two_edges_make_a_path(self):
        """Test two edges sharing a vertex parse to a P3"""
        g = parse_graph("a b\nb c")
        self.assertEqual(g.labels, ('a', 'b', 'c'))
        self.assertEqual(g.m, 2)
        self.assertFalse(g.has_edge(0, 2))

    def test_comment_and_weight_line(self):
        """Test comments are skipped and weight lines set weights"""
        g = parse_graph("# comment\n1 2\nw 1 5")
        self.assertEqual(g.n, 2)
        self.assertEqual(g.m, 1)
        self.assertEqual(g.weights[g.id_of('1')], 5)
        self.assertEqual(g.weights[g.id_of('2')], 1)

    def test_self_loop_reports_line(self):
        """Test a self-loop is rejected with its line number"""
        with self.assertRaises(SelfLoopError) as ctx:
            parse_graph("a a")
        self.assertEqual(ctx.exception.line, 1)

    def test_malformed_line_reports_line(self):
        """Test a three-token edge line is rejected with its line number"""
        with self.assertRaises(GraphFormatError) as ctx:
            parse_graph("a b\n# ok\nb c d\n")
        self.assertEqual(ctx.exception.line, 3)

    def test_bad_weights(self):
        """Test non-numeric and negative weights are rejected with line numbers"""
        with self.assertRaises(GraphFormatError) as ctx:
            parse_graph("a b\nw a heavy\n")
        self.assertEqual(ctx.exception.line, 2)
        with self.assertRaises(GraphFormatError) as ctx:
            parse_graph("a b\n\nw b -3\n")
        self.assertEqual(ctx.exception.line, 3)

    def test_isolated_vertex_line(self):
        """Test a single token adds an isolated vertex"""
        g = parse_graph("a b\nc\n")
        self.assertEqual(g.n, 3)
        self.assertEqual(g.degree(g.id_of('c')), 0)

    def test_serialize_parses_back(self):
        """Test serialized text parses to the same labelled graph"""
        g = parse_graph("a b\nb c\nd\nw c 7\n")
        again = parse_graph(serialize_graph(g))
        self.assertEqual(sorted(again.labels), sorted(g.labels))
        self.assertEqual(
            {frozenset(again.labels_of(e)) for e in again.edges()},
            {frozenset(g.labels_of(e)) for e in g.edges()},
        )
        self.assertEqual(again.weights[again.id_of('c')], 7)

    def test_weights_file(self):
        """Test a weights file reweights by label and rejects unknown labels"""
        g = apply_weights(parse_graph("a b\n"), parse_weights("a 2.5\n# note\nb 4\n"))
        self.assertEqual(g.weights, (2.5, 4))
        with self.assertRaises(GraphFormatError):
            apply_weights(g, {'z': 1})
        with self.assertRaises(GraphFormatError) as ctx:
            parse_weights("a 1 2\n")
        self.assertEqual(ctx.exception.line, 1)


class GenerateTests(SimpleTestCase):
    """Test cases for the seeded generators"""

    def test_gnp_extremes(self):
        """Test G(5, 0) is edgeless and G(5, 1) is K5"""
        self.assertEqual(generate(GenSpec(GNP, n=5, p=0.0, seed=1)).graph.m, 0)
        full = generate(GenSpec(GNP, n=5, p=1.0, seed=1)).graph
        self.assertEqual(full.n, 5)
        self.assertTrue(is_clique(full))

    def test_same_seed_same_graph(self):
        """Test a spec and seed always give the same graph"""
        spec = GenSpec(GNP, n=30, p=0.2, seed=42)
        self.assertEqual(generate(spec).graph, generate(spec).graph)
        self.assertNotEqual(generate(spec).graph, generate(GenSpec(GNP, n=30, p=0.2, seed=43)).graph)

    def test_planted_noise_removal_restores_clusters(self):
        """Test deleting the planted noise vertices leaves a cluster graph"""
        generated = generate(GenSpec(PLANTED, clusters=(4, 4, 4), noise_vertices=2, noise_p=0.3, seed=7))
        self.assertEqual(generated.graph.n, 14)
        self.assertEqual(generated.planted_noise, frozenset({12, 13}))
        self.assertTrue(is_cluster(remove_vertices(generated.graph, generated.planted_noise).graph))

    def test_bipartite_is_triangle_free(self):
        """Test the bipartite model never creates a triangle"""
        for seed in range(20):
            g = generate(GenSpec(BIPARTITE, n=10, p=0.7, seed=seed)).graph
            self.assertTrue(all(not g.has_edge(u, v) for u in range(5) for v in range(5) if u != v))
            self.assertTrue(all(not g.has_edge(u, v) for u in range(5, 10) for v in range(5, 10) if u != v))

    def test_invalid_specs_rejected(self):
        """Test out-of-range parameters raise GraphError"""
        for spec in (
            GenSpec('lattice', n=4),
            GenSpec(GNP, n=4, p=1.5),
            GenSpec(GNP, n=-1, p=0.5),
            GenSpec(PLANTED, clusters=(3, 0)),
            GenSpec(PLANTED),
        ):
            with self.assertRaises(GraphError):
                generate(spec)

    def test_random_weights_in_range(self):
        """Test random weights are seeded integers in [1, 100]"""
        g = generate(GenSpec(GNP, n=40, p=0.1, seed=3)).graph
        weighted = random_weights(g, 9)
        self.assertEqual(weighted.weights, random_weights(g, 9).weights)
        self.assertTrue(all(1 <= w <= 100 for w in weighted.weights))
        self.assertEqual(weighted.adjacency, g.adjacency)

    def test_generated_graph_round_trips_through_text(self):
        """Test a generated graph serializes and parses back with the same labels and edges"""
        g = generate(GenSpec(PLANTED, clusters=(3, 3), noise_vertices=2, noise_p=0.5, seed=11)).graph
        self.assertTrue(all(isinstance(label, str) for label in g.labels))
        again = parse_graph(serialize_graph(g))
        self.assertEqual(sorted(again.labels), sorted(g.labels))
        self.assertEqual(
            {frozenset(again.labels_of(e)) for e in again.edges()},
            {frozenset(g.labels_of(e)) for e in g.edges()},
        )


class EvaluateTests(SimpleTestCase):
    """Test cases for per-instance evaluation"""

    def test_gem_records(self):
        """Test every algorithm on the gem is valid and within its bound"""
        records = evaluate(Instance('gem', parse_graph(GEM_TEXT), 0))
        by_algorithm = {record['algorithm']: record for record in records}
        self.assertEqual(set(by_algorithm), {EXACT, REDUCE25, NAIVE3, DISS2})
        self.assertEqual(by_algorithm[EXACT]['size'], 2)
        self.assertLessEqual(by_algorithm[REDUCE25]['size'], 5)
        self.assertTrue(by_algorithm[REDUCE25]['postconditions'])
        for record in records:
            self.assertTrue(record['valid'])
            self.assertFalse(record['failed'], record)

    def test_without_exact(self):
        """Test skipping the exact solver leaves ratios empty"""
        records = evaluate(Instance('p3', parse_graph("a b\nb c"), 0), with_exact=False)
        self.assertNotIn(EXACT, {record['algorithm'] for record in records})
        for record in records:
            self.assertIsNone(record['ratio'])
            self.assertFalse(record['failed'])


class RunSuiteTests(SimpleTestCase):
    """Test cases for run_suite"""

    def assertSuitePasses(self, report):
        failed = [record for record in report.records if record['failed']]
        self.assertEqual(failed, [])
        self.assertTrue(report.ok)

    def test_exhaustive_small_sample(self):
        """Test sampled labeled graphs on six vertices meet every bound"""
        report = run_suite(EXHAUSTIVE_SMALL, SuiteOptions(stride=1 if FULL_ACCEPTANCE else 97, deterministic=True))
        self.assertSuitePasses(report)
        summary = report.summary['algorithms']
        self.assertLessEqual(summary[REDUCE25]['max_ratio'], 2.5)
        self.assertLessEqual(summary[NAIVE3]['max_ratio'], 3)
        self.assertLessEqual(summary[DISS2]['max_ratio'], 2)
        self.assertEqual(summary[REDUCE25]['invalid'], 0)
        self.assertIn('reduce25_mean_ratio', report.summary['head_to_head'])

    def test_random_medium(self):
        """Test seeded G(n, p) corpora meet every bound"""
        options = SuiteOptions(seeds=None if FULL_ACCEPTANCE else 2)
        report = run_suite(RANDOM_MEDIUM, options)
        self.assertSuitePasses(report)
        self.assertEqual(report.summary['instances'], len(report.records) // 4)

    def test_triangle_free_optima_agree(self):
        """Test association and dissociation optima agree on bipartite graphs"""
        report = run_suite(TRIANGLE_FREE, SuiteOptions(seeds=200 if FULL_ACCEPTANCE else 30))
        self.assertSuitePasses(report)

    def test_scaling_records_wall_time_only(self):
        """Test the scaling suite has no exact values but times every run"""
        report = run_suite(SCALING, SuiteOptions())
        self.assertSuitePasses(report)
        for record in report.records:
            self.assertIsNone(record['exact'])
            self.assertIsNotNone(record['wall_time'])

    def test_deterministic_reports_identical(self):
        """Test deterministic runs give byte-identical reports"""
        options = SuiteOptions(seeds=1, limit=6, deterministic=True)
        first = run_suite(RANDOM_MEDIUM, options).to_json()
        second = run_suite(RANDOM_MEDIUM, options).to_json()
        self.assertEqual(first, second)
        self.assertNotIn('created', json.loads(first))

    def test_limit_caps_instances(self):
        """Test the limit option caps the corpus"""
        report = run_suite(EXHAUSTIVE_SMALL, SuiteOptions(limit=5, deterministic=True))
        self.assertEqual(report.summary['instances'], 5)

    @skipUnless(FULL_ACCEPTANCE, "large instance runs only with CLUSTERKIT_FULL_ACCEPTANCE")
    def test_large_sparse_solve(self):
        """Test solve handles G(2000, 0.01) within a minute"""
        g = generate(GenSpec(GNP, n=2000, p=0.01, seed=0)).graph
        start = time.perf_counter()
        solution = solve(g)
        self.assertLess(time.perf_counter() - start, 60)
        self.assertTrue(validate_solution(g, solution.deleted))

    def test_unknown_suite(self):
        """Test an unknown suite name raises GraphError"""
        with self.assertRaises(GraphError):
            run_suite('everything')


class SolverServiceTests(SimpleTestCase):
    """Test cases for SolverService"""

    def test_labels_in_document(self):
        """Test the P3 answer names its center by label"""
        document = SolverService(parse_graph("a b\nb c")).run(REDUCE25)
        self.assertEqual(document['deleted'], ['b'])
        self.assertTrue(document['valid'])

    def test_dissociation_document(self):
        """Test diss2 on a triangle deletes one vertex"""
        document = SolverService(build_graph([('a', 'b'), ('b', 'c'), ('a', 'c')])).run(DISS2)
        self.assertEqual(document['size'], 1)
        self.assertTrue(document['valid'])

    def test_verify_all_algorithms(self):
        """Test verification passes for every algorithm on the gem"""
        g = parse_graph(GEM_TEXT)
        for algorithm in (REDUCE25, NAIVE3, EXACT, DISS2):
            document = SolverService(g).verify(algorithm)
            self.assertEqual(document['problems'], [], algorithm)
            self.assertIsNotNone(document['optimum'])

    def test_unknown_algorithm(self):
        """Test an unknown algorithm raises GraphError"""
        with self.assertRaises(GraphError):
            SolverService(parse_graph("a b")).run('greedy')


class CommandTests(SimpleTestCase):
    """Test cases for the bench management commands and the cli entry point"""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.gem = self.write('gem.el', GEM_TEXT)

    def write(self, name, text):
        path = os.path.join(self.tmp.name, name)
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write(text)
        return path

    def write_bytes(self, name, data):
        path = os.path.join(self.tmp.name, name)
        with open(path, 'wb') as handle:
            handle.write(data)
        return path

    def run_command(self, *args, **options):
        out = StringIO()
        call_command(*args, stdout=out, **options)
        return out.getvalue()

    def test_solve_json(self):
        """Test solve --json prints a valid solution document"""
        document = json.loads(self.run_command('solve', input=self.gem, algorithm=REDUCE25, json=True))
        self.assertTrue(document['valid'])
        self.assertLessEqual(document['size'], 5)

    def test_solve_with_weights_file(self):
        """Test solve diss2 honours a weights file"""
        weights = self.write('w.txt', "a 10\nc 10\nb 1\n")
        path = self.write('p3.el', "a b\nb c\n")
        document = json.loads(self.run_command('solve', input=path, weights=weights, algorithm=DISS2, json=True))
        self.assertEqual(document['deleted'], ['b'])

    def test_exact_on_gem(self):
        """Test exact reports size 2 on the gem"""
        document = json.loads(self.run_command('exact', input=self.gem, json=True))
        self.assertEqual(document['size'], 2)
        document = json.loads(self.run_command('exact', input=self.gem, problem='dissociation', json=True))
        self.assertEqual(document['problem'], 'dissociation')

    def test_verify_passes(self):
        """Test verify succeeds on the gem"""
        output = self.run_command('verify', input=self.gem)
        self.assertIn('All checks passed', output)

    def test_bad_input_is_command_error(self):
        """Test a malformed or missing file becomes a CommandError"""
        with self.assertRaises(CommandError):
            self.run_command('solve', input=self.write('loop.el', "a a\n"))
        with self.assertRaises(CommandError):
            self.run_command('solve', input=os.path.join(self.tmp.name, 'missing.el'))

    def test_invalid_utf8_reports_line(self):
        """Test a file with bytes that are not UTF-8 fails as a format error on that line"""
        path = self.write_bytes('latin.el', b'a b\n\xff\xfe c\n')
        with self.assertRaises(GraphFormatError) as ctx:
            read_graph(path)
        self.assertEqual(ctx.exception.line, 2)
        with self.assertRaises(CommandError):
            self.run_command('solve', input=path)
        weights = self.write_bytes('w.txt', b'a 1\nb 2\n\xe9 3\n')
        with self.assertRaises(GraphFormatError) as ctx:
            read_graph(self.gem, weights)
        self.assertEqual(ctx.exception.line, 3)
        self.assertEqual(cli(['solve', '--input', path], stdout=StringIO(), stderr=StringIO()), 1)

    def test_gen_writes_edge_list(self):
        """Test gen writes a file that parses back to the generated graph"""
        out = os.path.join(self.tmp.name, 'g.el')
        self.run_command('gen', model=GNP, n=12, p=0.4, seed=5, out=out)
        with open(out, encoding='utf-8') as handle:
            g = parse_graph(handle.read())
        self.assertEqual(g.m, generate(GenSpec(GNP, n=12, p=0.4, seed=5)).graph.m)

    def test_gen_rejects_bad_spec(self):
        """Test gen turns an invalid spec into a CommandError"""
        with self.assertRaises(CommandError):
            self.run_command('gen', model=GNP, n=5, p=2.0)

    def test_bench_writes_report(self):
        """Test bench writes a JSON report to --out"""
        out = os.path.join(self.tmp.name, 'r.json')
        self.run_command('bench', suite=EXHAUSTIVE_SMALL, limit=8, deterministic=True, out=out)
        with open(out, encoding='utf-8') as handle:
            report = json.load(handle)
        self.assertEqual(report['suite'], EXHAUSTIVE_SMALL)
        self.assertEqual(report['summary']['failures'], 0)

    def test_cli_exit_codes(self):
        """Test cli returns 0 on success and nonzero on usage errors"""
        out, err = StringIO(), StringIO()
        self.assertEqual(cli(['solve', '--input', self.gem, '--json'], stdout=out, stderr=err), 0)
        self.assertTrue(json.loads(out.getvalue())['valid'])
        self.assertEqual(cli(['frobnicate'], stdout=StringIO(), stderr=err), 2)
        self.assertIn('usage', err.getvalue())
        self.assertEqual(cli(['solve', '--bogus'], stdout=StringIO(), stderr=StringIO()), 2)
        self.assertEqual(cli([], stdout=StringIO(), stderr=StringIO()), 2)

    def test_cli_command_failure(self):
        """Test cli returns 1 when the command fails"""
        err = StringIO()
        missing = os.path.join(self.tmp.name, 'missing.el')
        self.assertEqual(cli(['solve', '--input', missing], stdout=StringIO(), stderr=err), 1)
        self.assertIn('CommandError', err.getvalue())
