# bench/management/commands/exact.py

from django.core.management.base import BaseCommand, CommandError

from association.exact import exact_association
from bench.formats import read_graph
from bench.output import emit, to_json
from dissociation.services import exact_dissociation
from graphs.exceptions import ExactUnavailable, GraphError

ASSOCIATION = 'association'
DISSOCIATION = 'dissociation'


class Command(BaseCommand):
    help = 'Compute an optimum association or dissociation set of a small graph'

    def add_arguments(self, parser):
        parser.add_argument('--input', required=True, help='Edge-list file')
        parser.add_argument('--weights', help='File of "<vertex> <number>" weight lines')
        parser.add_argument('--problem', choices=(ASSOCIATION, DISSOCIATION), default=ASSOCIATION)
        parser.add_argument('--json', action='store_true', help='Print a JSON document')
        parser.add_argument('--out', help='Write the output to this path')

    def handle(self, *args, **options):
        try:
            g = read_graph(options['input'], options.get('weights'))
            if options['problem'] == ASSOCIATION:
                deleted, _ = exact_association(g)
                weight = g.total_weight(deleted)
            else:
                deleted, weight = exact_dissociation(g)
        except OSError as exc:
            raise CommandError(f"Cannot read input: {exc}")
        except (GraphError, ExactUnavailable) as exc:
            raise CommandError(str(exc))

        document = {
            'problem': options['problem'],
            'deleted': g.labels_of(deleted),
            'size': len(deleted),
            'weight': float(weight),
        }
        if options['json']:
            text = to_json(document)
        else:
            text = (f"{document['problem']} optimum: size {document['size']}, weight {document['weight']}\n"
                    f"deleted: {' '.join(str(label) for label in document['deleted'])}\n")
        emit(self, text, options.get('out'))
