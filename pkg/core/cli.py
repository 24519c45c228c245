"""
Command-line entry point.

``cli(argv)`` dispatches ``solve|exact|verify|gen|bench`` to the management
commands of the ``bench`` app and turns their outcome into an exit code.
"""

import os
import sys
from typing import List, Optional

SUBCOMMANDS = ('solve', 'exact', 'verify', 'gen', 'bench')

USAGE = (
    "usage: clusterkit {solve,exact,verify,gen,bench} [options]\n"
    "\n"
    "  solve   --input PATH [--weights PATH] [--algorithm reduce25|naive3|exact|diss2] [--json] [--out PATH]\n"
    "  exact   --input PATH [--weights PATH] [--problem association|dissociation] [--json] [--out PATH]\n"
    "  verify  --input PATH [--weights PATH] [--algorithm reduce25|naive3|exact|diss2] [--json] [--out PATH]\n"
    "  gen     [--model gnp|planted|bipartite] [--n N] [--p P] [--clusters 4,4,4] [--noise-vertices K]\n"
    "          [--noise-p P] [--seed N] [--json] [--out PATH]\n"
    "  bench   [--suite exhaustive-small|random-medium|scaling|triangle-free] [--limit N] [--stride K]\n"
    "          [--seeds N] [--seed N] [--threads N] [--deterministic] [--json] [--out PATH]\n"
)


def cli(argv: Optional[List[str]] = None, stdout=None, stderr=None) -> int:
    """
    Run one subcommand.

    Returns:
        0 on success, 1 when the command fails, 2 on a usage error
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr

    if not argv or argv[0] in ('-h', '--help'):
        stderr.write(USAGE)
        return 0 if argv else 2
    name, rest = argv[0], argv[1:]
    if name not in SUBCOMMANDS:
        stderr.write(f"unknown subcommand {name!r}\n\n{USAGE}")
        return 2

    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'core.settings')
    import django
    from django.core.management import call_command, load_command_class
    from django.core.management.base import CommandError

    django.setup()
    command = load_command_class('bench', name)
    parser = command.create_parser('clusterkit', name)
    if any(arg in ('-h', '--help') for arg in rest):
        stdout.write(parser.format_help())
        return 0
    try:
        options = parser.parse_args(rest)
    except CommandError as exc:
        stderr.write(f"{exc}\n\n{parser.format_usage()}")
        return 2

    try:
        call_command(command, stdout=stdout, stderr=stderr, **{**vars(options), 'skip_checks': True})
    except CommandError as exc:
        stderr.write(f"CommandError: {exc}\n")
        return 1
    return 0


def main() -> None:
    sys.exit(cli())


if __name__ == '__main__':
    main()
