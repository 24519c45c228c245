# bench/management/commands/gen.py

from django.core.management.base import BaseCommand, CommandError

from bench.formats import serialize_graph
from bench.generators import GNP, MODELS, GenSpec, generate
from bench.output import emit, to_json
from graphs.exceptions import GraphError


def _sizes(value):
    return tuple(int(part) for part in value.split(',') if part.strip())


class Command(BaseCommand):
    help = 'Generate a seeded random graph as an edge list'

    def add_arguments(self, parser):
        parser.add_argument('--model', choices=MODELS, default=GNP)
        parser.add_argument('--n', type=int, default=10)
        parser.add_argument('--p', type=float, default=0.3)
        parser.add_argument('--clusters', type=_sizes, default=(), help='Comma-separated clique sizes (planted)')
        parser.add_argument('--noise-vertices', type=int, default=0)
        parser.add_argument('--noise-p', type=float, default=0.0)
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--json', action='store_true', help='Print the graph and planted noise as JSON')
        parser.add_argument('--out', help='Write the output to this path')

    def handle(self, *args, **options):
        spec = GenSpec(
            model=options['model'],
            n=options['n'],
            p=options['p'],
            clusters=options['clusters'],
            noise_vertices=options['noise_vertices'],
            noise_p=options['noise_p'],
            seed=options['seed'],
        )
        try:
            generated = generate(spec)
        except GraphError as exc:
            raise CommandError(str(exc))

        text = serialize_graph(generated.graph)
        if options['json']:
            noise = generated.planted_noise
            text = to_json({
                'model': spec.model,
                'seed': spec.seed,
                'n': generated.graph.n,
                'm': generated.graph.m,
                'edges': text.splitlines(),
                'planted_noise': generated.graph.labels_of(noise) if noise is not None else None,
            })
        emit(self, text, options.get('out'))
