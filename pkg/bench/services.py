"""
Benchmark Service Module

Runs the certified algorithms over instance corpora, checks every answer
independently, and aggregates the records into a report.
"""

import itertools
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from typing import Any, Dict, Iterator, List, NamedTuple, Optional, Tuple

import pandas as pd

from association.exact import exact_association
from association.reduction import check_reduce_postconditions, reduce
from association.services import naive_3_approx, solve
from dissociation.services import approx_dissociation_2, exact_dissociation, is_dissociation_valid
from graphs.conf import get_setting
from graphs.exceptions import CertificationError, ExactUnavailable, GraphError
from graphs.services import ASSOCIATION, Graph, is_triangle_free, validate_solution

from .generators import BIPARTITE, GNP, GenSpec, generate, random_weights

logger = logging.getLogger(__name__)

EXHAUSTIVE_SMALL = 'exhaustive-small'
RANDOM_MEDIUM = 'random-medium'
SCALING = 'scaling'
TRIANGLE_FREE = 'triangle-free'
SUITES = (EXHAUSTIVE_SMALL, RANDOM_MEDIUM, SCALING, TRIANGLE_FREE)

REDUCE25 = 'reduce25'
NAIVE3 = 'naive3'
EXACT = 'exact'
DISS2 = 'diss2'
ALGORITHMS = (REDUCE25, NAIVE3, EXACT, DISS2)

RATIO_BOUNDS = {REDUCE25: Fraction(5, 2), NAIVE3: Fraction(3), DISS2: Fraction(2), EXACT: Fraction(1)}


class Instance(NamedTuple):
    id: str
    graph: Graph
    seed: int


@dataclass
class SuiteOptions:
    """Knobs of one run; ``None`` takes the ``CLUSTERKIT`` setting."""
    limit: Optional[int] = None
    stride: int = 1
    seeds: Optional[int] = None
    seed: int = 0
    deterministic: bool = False
    threads: Optional[int] = None
    postconditions: bool = True


@dataclass
class BenchReport:
    suite: str
    records: List[Dict[str, Any]]
    summary: Dict[str, Any]
    options: Dict[str, Any] = field(default_factory=dict)
    created: Optional[str] = None

    @property
    def failures(self) -> int:
        return self.summary['failures']

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def as_dict(self) -> Dict[str, Any]:
        document = {
            'suite': self.suite,
            'options': self.options,
            'summary': self.summary,
            'records': self.records,
        }
        if self.created is not None:
            document['created'] = self.created
        return document

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True) + '\n'


def _number(value) -> Optional[float]:
    if value is None:
        return None
    return round(float(value), 6)


def _ratio(size, reference) -> Optional[float]:
    if reference is None:
        return None
    if reference == 0:
        return 1.0 if size == 0 else None
    return _number(Fraction(size) / Fraction(reference))


def _record(instance: Instance, algorithm: str, **values) -> Dict[str, Any]:
    record = {
        'instance': instance.id,
        'n': instance.graph.n,
        'm': instance.graph.m,
        'seed': instance.seed,
        'algorithm': algorithm,
        'size': None,
        'valid': False,
        'exact': None,
        'ratio': None,
        'lower_bound': None,
        'lower_bound_ratio': None,
        'postconditions': None,
        'error': None,
        'failed': False,
        'wall_time': None,
    }
    record.update(values)
    return record


def _failed(record: Dict[str, Any]) -> bool:
    bound = RATIO_BOUNDS[record['algorithm']]
    if record['error'] or not record['valid'] or record['postconditions'] is False:
        return True
    if record['ratio'] is None and record['exact'] is not None:
        return True
    for key in ('ratio', 'lower_bound_ratio'):
        if record[key] is not None and Fraction(record[key]).limit_denominator(1000) > bound:
            return True
    return False


def _timed(fn, *args):
    start = time.perf_counter()
    result = fn(*args)
    return result, time.perf_counter() - start


def _exact_size(g: Graph) -> Tuple[Optional[int], Optional[str]]:
    if g.n > get_setting('EXACT_ENUMERATION_MAX_VERTICES'):
        return None, None
    try:
        return exact_association(g)[1], None
    except ExactUnavailable as exc:
        return None, str(exc)


def evaluate(instance: Instance, with_exact: bool = True, postconditions: bool = True) -> List[Dict[str, Any]]:
    """
    Run every algorithm on one instance.

    Validity is always recomputed with ``validate_solution`` or the degree
    check, never taken from the solver.
    """
    g = instance.graph
    records = []
    exact, exact_error = _exact_size(g) if with_exact else (None, None)
    if with_exact:
        records.append(_record(instance, EXACT, size=exact, valid=exact is not None, exact=exact,
                               ratio=_ratio(exact, exact) if exact is not None else None,
                               error=exact_error or (None if exact is not None else 'exact unavailable')))

    for algorithm, run in ((REDUCE25, solve), (NAIVE3, naive_3_approx)):
        try:
            solution, elapsed = _timed(run, g)
        except CertificationError as exc:
            records.append(_record(instance, algorithm, error=str(exc)))
            continue
        size = len(solution.deleted)
        values = dict(
            size=size,
            valid=bool(validate_solution(g, solution.deleted, ASSOCIATION)),
            exact=exact,
            ratio=_ratio(size, exact),
            lower_bound=_number(solution.lower_bound),
            lower_bound_ratio=_ratio(size, solution.lower_bound),
            wall_time=round(elapsed, 6),
        )
        if algorithm == REDUCE25 and postconditions:
            reduced = reduce(g)
            values['postconditions'] = not check_reduce_postconditions(g, reduced.removed, reduced.witnesses)
        records.append(_record(instance, algorithm, **values))

    weighted = random_weights(g, instance.seed)
    try:
        result, elapsed = _timed(approx_dissociation_2, weighted)
    except CertificationError as exc:
        records.append(_record(instance, DISS2, error=str(exc)))
    else:
        optimum = exact_dissociation(weighted).weight if with_exact and g.n <= get_setting(
            'EXACT_ENUMERATION_MAX_VERTICES') else None
        records.append(_record(
            instance, DISS2,
            size=_number(result.weight),
            valid=is_dissociation_valid(weighted, result.deleted),
            exact=_number(optimum),
            ratio=_ratio(result.weight, optimum),
            lower_bound=_number(result.lower_bound),
            lower_bound_ratio=_ratio(result.weight, result.lower_bound),
            wall_time=round(elapsed, 6),
        ))

    for record in records:
        record['failed'] = _failed(record)
    return records


def _exhaustive(options: SuiteOptions) -> Iterator[Instance]:
    order = get_setting('EXHAUSTIVE_ORDER')
    pairs = list(itertools.combinations(range(order), 2))
    for mask in range(0, 1 << len(pairs), max(1, options.stride)):
        g = Graph.from_edge_ids(order, [pair for i, pair in enumerate(pairs) if mask >> i & 1])
        yield Instance(f"labeled-{order}-{mask:05d}", g, mask)


def _random_medium(options: SuiteOptions) -> Iterator[Instance]:
    seeds = options.seeds if options.seeds is not None else get_setting('RANDOM_MEDIUM_SEEDS')
    for n in get_setting('RANDOM_MEDIUM_SIZES'):
        for p in get_setting('RANDOM_MEDIUM_DENSITIES'):
            for s in range(seeds):
                seed = options.seed * 1_000_000 + n * 10_000 + int(round(p * 100)) * 1_000 + s
                g = generate(GenSpec(GNP, n=n, p=p, seed=seed)).graph
                yield Instance(f"gnp-{n:02d}-{p:.2f}-{s:04d}", g, seed)


def _triangle_free(options: SuiteOptions) -> Iterator[Instance]:
    seeds = options.seeds if options.seeds is not None else 200
    for s in range(seeds):
        seed = options.seed * 1_000_000 + s
        n = 2 + seed % 11
        g = generate(GenSpec(BIPARTITE, n=n, p=0.2 + 0.6 * ((seed * 7) % 10) / 10, seed=seed)).graph
        yield Instance(f"bipartite-{s:04d}", g, seed)


def _scaling(options: SuiteOptions) -> Iterator[Instance]:
    degree = get_setting('SCALING_AVERAGE_DEGREE')
    for n in get_setting('SCALING_SIZES'):
        seed = options.seed * 1_000_000 + n
        g = generate(GenSpec(GNP, n=n, p=min(1.0, degree / max(1, n - 1)), seed=seed)).graph
        yield Instance(f"scaling-{n:05d}", g, seed)


def instances(suite: str, options: SuiteOptions) -> List[Instance]:
    if suite not in SUITES:
        raise GraphError(f"Unknown suite {suite!r}; expected one of {SUITES}")
    source = {
        EXHAUSTIVE_SMALL: _exhaustive,
        RANDOM_MEDIUM: _random_medium,
        SCALING: _scaling,
        TRIANGLE_FREE: _triangle_free,
    }[suite](options)
    return list(itertools.islice(source, options.limit))


def _evaluate_triangle_free(instance: Instance) -> List[Dict[str, Any]]:
    g = instance.graph
    association = exact_association(g)[1]
    dissociation = exact_dissociation(g).weight
    agree = is_triangle_free(g) and association == dissociation
    return [_record(
        instance, EXACT, size=association, valid=True, exact=_number(dissociation), ratio=_ratio(association, dissociation),
        error=None if agree else f"association optimum {association} differs from dissociation optimum {dissociation}",
        failed=not agree,
    )]


def _evaluate_task(task: Tuple[str, Instance, bool]) -> List[Dict[str, Any]]:
    suite, instance, postconditions = task
    if suite == TRIANGLE_FREE:
        return _evaluate_triangle_free(instance)
    return evaluate(instance, with_exact=suite != SCALING, postconditions=postconditions)


def summarize(records: List[Dict[str, Any]]) -> Dict[str, Any]:
    """Per-algorithm counts and ratios plus head-to-head means of reduce25 and naive3."""
    if not records:
        return {'instances': 0, 'failures': 0, 'algorithms': {}, 'head_to_head': {}}
    df = pd.DataFrame(records)
    per_algorithm = {}
    for algorithm, group in df.groupby('algorithm', sort=True):
        ratios = group['ratio'].dropna()
        bounds = group['lower_bound_ratio'].dropna()
        per_algorithm[algorithm] = {
            'runs': int(len(group)),
            'invalid': int((~group['valid'].astype(bool)).sum()),
            'failures': int(group['failed'].sum()),
            'mean_ratio': _number(ratios.mean()) if len(ratios) else None,
            'max_ratio': _number(ratios.max()) if len(ratios) else None,
            'max_lower_bound_ratio': _number(bounds.max()) if len(bounds) else None,
            'total_wall_time': None if group['wall_time'].isna().all() else _number(group['wall_time'].sum()),
        }

    head_to_head = {}
    sizes = df[df['algorithm'].isin([REDUCE25, NAIVE3])].pivot_table(
        index='instance', columns='algorithm', values='ratio', aggfunc='first'
    )
    if {REDUCE25, NAIVE3} <= set(sizes.columns):
        both = sizes.dropna()
        if len(both):
            head_to_head = {
                'instances': int(len(both)),
                'reduce25_mean_ratio': _number(both[REDUCE25].mean()),
                'naive3_mean_ratio': _number(both[NAIVE3].mean()),
                'reduce25_better': int((both[REDUCE25] < both[NAIVE3]).sum()),
                'naive3_better': int((both[NAIVE3] < both[REDUCE25]).sum()),
            }

    return {
        'instances': int(df['instance'].nunique()),
        'failures': int(df['failed'].sum()),
        'algorithms': per_algorithm,
        'head_to_head': head_to_head,
    }


def run_suite(suite: str, options: Optional[SuiteOptions] = None) -> BenchReport:
    """
    Evaluate one corpus and aggregate the records.

    Records come back in instance order whatever the concurrency. With
    ``deterministic`` the timings and the creation time are dropped so equal
    runs give byte-identical reports.
    """
    options = options or SuiteOptions()
    corpus = instances(suite, options)
    threads = options.threads or get_setting('THREADS')
    postconditions = options.postconditions and suite != SCALING
    tasks = [(suite, instance, postconditions) for instance in corpus]
    logger.info("run_suite %s: %d instances on %d workers", suite, len(tasks), threads)

    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            batches = list(pool.map(_evaluate_task, tasks, chunksize=max(1, len(tasks) // (threads * 4))))
    else:
        batches = [_evaluate_task(task) for task in tasks]

    records = [record for batch in batches for record in batch]
    if options.deterministic:
        for record in records:
            record['wall_time'] = None
    summary = summarize(records)
    for record in records:
        if record['failed']:
            logger.error("run_suite %s: %s %s failed: %s", suite, record['instance'], record['algorithm'],
                         record['error'] or 'ratio or validity check')

    return BenchReport(
        suite=suite,
        records=records,
        summary=summary,
        options={
            'limit': options.limit,
            'stride': options.stride,
            'seeds': options.seeds,
            'seed': options.seed,
        },
        created=None if options.deterministic else datetime.now(timezone.utc).isoformat(),
    )


class SolverService:
    """
    Service class for running one graph through the certified algorithms.

    Holds the graph and provides methods for:
    - Running an algorithm and describing the answer by vertex label
    - Verifying that answer with independent checks
    """

    def __init__(self, graph: Graph):
        """
        Initialize the service with a graph.

        Args:
            graph: graph to solve
        """
        self.graph = graph

    def run(self, algorithm: str) -> Dict[str, Any]:
        """
        Run one algorithm and describe the answer by vertex label.

        Raises:
            GraphError: unknown algorithm
            CertificationError: a certificate failed inside the solver
            ExactUnavailable: ``exact`` on a graph beyond the exact solver's reach
        """
        if algorithm not in ALGORITHMS:
            raise GraphError(f"Unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
        g = self.graph

        if algorithm == DISS2:
            result = approx_dissociation_2(g)
            return {
                'algorithm': algorithm,
                'deleted': g.labels_of(result.deleted),
                'size': len(result.deleted),
                'weight': _number(result.weight),
                'lower_bound': _number(result.lower_bound),
                'valid': is_dissociation_valid(g, result.deleted),
            }

        if algorithm == EXACT:
            deleted, size = exact_association(g)
            lower_bound = Fraction(size)
            provenance = {v: EXACT for v in deleted}
        else:
            solution = (solve if algorithm == REDUCE25 else naive_3_approx)(g)
            deleted, lower_bound, provenance = solution.deleted, solution.lower_bound, solution.provenance

        check = validate_solution(g, deleted, ASSOCIATION)
        return {
            'algorithm': algorithm,
            'deleted': g.labels_of(deleted),
            'size': len(deleted),
            'weight': _number(g.total_weight(deleted)),
            'lower_bound': _number(lower_bound),
            'provenance': {str(g.labels[v]): tag for v, tag in sorted(provenance.items())},
            'valid': check.valid,
            'witness': g.labels_of(check.witness) if check.witness else None,
        }

    def verify(self, algorithm: str) -> Dict[str, Any]:
        """
        ``run`` plus the independent checks: validity, the ratio against the
        certified lower bound, the ratio against the exact optimum when it is
        within reach and, for ``reduce25``, the reduce postconditions.

        The returned document lists every failed check under ``problems``.
        """
        g = self.graph
        document = self.run(algorithm)
        bound = RATIO_BOUNDS[algorithm]
        problems = []
        if not document['valid']:
            problems.append('solution is not valid')

        measure = 'weight' if algorithm == DISS2 else 'size'
        value = Fraction(document[measure]).limit_denominator(10 ** 6)
        lower_bound = Fraction(document['lower_bound']).limit_denominator(10 ** 6)
        if value > bound * lower_bound:
            problems.append(f"{measure} {value} exceeds {bound} x lower bound {lower_bound}")

        optimum = None
        if g.n <= get_setting('EXACT_ENUMERATION_MAX_VERTICES'):
            try:
                optimum = exact_dissociation(g).weight if algorithm == DISS2 else exact_association(g)[1]
            except ExactUnavailable as exc:
                logger.warning("SolverService.verify: %s", exc)
        if optimum is not None and value > bound * optimum:
            problems.append(f"{measure} {value} exceeds {bound} x optimum {optimum}")

        if algorithm == REDUCE25:
            reduced = reduce(g)
            problems.extend(check_reduce_postconditions(g, reduced.removed, reduced.witnesses))

        document['optimum'] = _number(optimum)
        document['problems'] = problems
        return document
