# bench/management/commands/solve.py

from django.core.management.base import BaseCommand, CommandError

from bench.formats import read_graph
from bench.output import describe, emit, to_json
from bench.services import ALGORITHMS, REDUCE25, SolverService
from graphs.exceptions import CertificationError, ExactUnavailable, GraphError


class Command(BaseCommand):
    help = 'Compute an association set (or a dissociation set with diss2) for an edge-list graph'

    def add_arguments(self, parser):
        parser.add_argument('--input', required=True, help='Edge-list file')
        parser.add_argument('--weights', help='File of "<vertex> <number>" weight lines')
        parser.add_argument('--algorithm', choices=ALGORITHMS, default=REDUCE25)
        parser.add_argument('--json', action='store_true', help='Print a JSON document')
        parser.add_argument('--out', help='Write the output to this path')

    def handle(self, *args, **options):
        try:
            g = read_graph(options['input'], options.get('weights'))
            document = SolverService(g).run(options['algorithm'])
        except OSError as exc:
            raise CommandError(f"Cannot read input: {exc}")
        except (GraphError, ExactUnavailable, CertificationError) as exc:
            raise CommandError(str(exc))

        emit(self, to_json(document) if options['json'] else describe(document), options.get('out'))
        if not document['valid']:
            raise CommandError('Solution failed validation')
