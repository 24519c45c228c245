# bench/management/commands/verify.py

from django.core.management.base import BaseCommand, CommandError

from bench.formats import read_graph
from bench.output import describe, emit, to_json
from bench.services import ALGORITHMS, REDUCE25, SolverService
from graphs.exceptions import CertificationError, ExactUnavailable, GraphError


class Command(BaseCommand):
    help = 'Run an algorithm and check its answer, certificates and ratio independently'

    def add_arguments(self, parser):
        parser.add_argument('--input', required=True, help='Edge-list file')
        parser.add_argument('--weights', help='File of "<vertex> <number>" weight lines')
        parser.add_argument('--algorithm', choices=ALGORITHMS, default=REDUCE25)
        parser.add_argument('--json', action='store_true', help='Print a JSON document')
        parser.add_argument('--out', help='Write the output to this path')

    def handle(self, *args, **options):
        try:
            g = read_graph(options['input'], options.get('weights'))
            document = SolverService(g).verify(options['algorithm'])
        except OSError as exc:
            raise CommandError(f"Cannot read input: {exc}")
        except CertificationError as exc:
            raise CommandError(f"Certificate check failed: {exc}")
        except (GraphError, ExactUnavailable) as exc:
            raise CommandError(str(exc))

        emit(self, to_json(document) if options['json'] else describe(document), options.get('out'))
        if document['problems']:
            raise CommandError(f"{len(document['problems'])} check(s) failed")
        self.stdout.write(self.style.SUCCESS('All checks passed'))
