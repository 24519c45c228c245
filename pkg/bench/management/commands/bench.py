# bench/management/commands/bench.py

import os

from django.core.management.base import BaseCommand, CommandError

from bench.output import emit
from bench.services import EXHAUSTIVE_SMALL, SUITES, SuiteOptions, run_suite
from graphs.conf import get_setting
from graphs.exceptions import GraphError


class Command(BaseCommand):
    help = 'Run a benchmark suite and write its report'

    def add_arguments(self, parser):
        parser.add_argument('--suite', choices=SUITES, default=EXHAUSTIVE_SMALL)
        parser.add_argument('--limit', type=int, help='Evaluate at most this many instances')
        parser.add_argument('--stride', type=int, default=1, help='Take every k-th labeled graph (exhaustive-small)')
        parser.add_argument('--seeds', type=int, help='Seeds per random configuration')
        parser.add_argument('--seed', type=int, default=0, help='Base seed of the random corpora')
        parser.add_argument('--threads', type=int, help='Worker processes')
        parser.add_argument('--deterministic', action='store_true', help='Omit timings and timestamps')
        parser.add_argument('--json', action='store_true', help='Print the report instead of a summary')
        parser.add_argument('--out', help='Report path (default: REPORT_DIR/<suite>.json)')

    def handle(self, *args, **options):
        suite_options = SuiteOptions(
            limit=options.get('limit'),
            stride=options['stride'],
            seeds=options.get('seeds'),
            seed=options['seed'],
            deterministic=options['deterministic'],
            threads=options.get('threads'),
        )
        try:
            report = run_suite(options['suite'], suite_options)
        except GraphError as exc:
            raise CommandError(str(exc))

        if options['json'] and not options.get('out'):
            emit(self, report.to_json())
        else:
            out = options.get('out') or os.path.join(get_setting('REPORT_DIR'), f"{options['suite']}.json")
            emit(self, report.to_json(), out)

        summary = report.summary
        if not options['json']:
            self.stdout.write(f"{summary['instances']} instances, {summary['failures']} failures")
            for algorithm, row in summary['algorithms'].items():
                self.stdout.write(
                    f"  {algorithm}: runs={row['runs']} invalid={row['invalid']} failures={row['failures']} "
                    f"mean_ratio={row['mean_ratio']} max_ratio={row['max_ratio']}"
                )
        if not report.ok:
            raise CommandError(f"{report.failures} record(s) failed")
        if not options['json']:
            self.stdout.write(self.style.SUCCESS(f"Suite {options['suite']} passed"))
