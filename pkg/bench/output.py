"""Shared output handling for the bench management commands."""

import json
import os
from typing import Any, Dict, Optional

from django.core.management.base import BaseCommand, CommandError


def to_json(document: Dict[str, Any]) -> str:
    return json.dumps(document, indent=2, sort_keys=True) + '\n'


def emit(command: BaseCommand, text: str, out: Optional[str] = None) -> None:
    """Write ``text`` to ``out`` if given, otherwise to the command's stdout."""
    if not out:
        command.stdout.write(text, ending='')
        return
    directory = os.path.dirname(os.path.abspath(out))
    try:
        os.makedirs(directory, exist_ok=True)
        with open(out, 'w', encoding='utf-8') as handle:
            handle.write(text)
    except OSError as exc:
        raise CommandError(f"Cannot write {out}: {exc}")
    command.stdout.write(command.style.SUCCESS(f"Wrote {out}"))


def describe(document: Dict[str, Any]) -> str:
    """Plain-text rendering of a solve or verify document."""
    lines = [
        f"algorithm: {document['algorithm']}",
        f"deleted ({document['size']}): {' '.join(str(label) for label in document['deleted'])}",
        f"weight: {document['weight']}",
        f"lower bound: {document['lower_bound']}",
        f"valid: {document['valid']}",
    ]
    if document.get('optimum') is not None:
        lines.append(f"optimum: {document['optimum']}")
    for problem in document.get('problems', ()):
        lines.append(f"problem: {problem}")
    return '\n'.join(lines) + '\n'
