"""
Access to the ``CLUSTERKIT`` settings dict with library defaults.

The algorithms are importable without a configured Django project; in that
case the defaults below apply.
"""

from typing import Any

DEFAULTS = {
    'ADJACENCY_MATRIX_THRESHOLD': 512,
    'CERTIFY_QUOTIENTS': False,
    'ORACLE_MAX_VERTICES': 12,
    'BRUTEFORCE_MAX_VERTICES': 60,
    'EXACT_ENUMERATION_MAX_VERTICES': 22,
    'EXACT_LEXICOGRAPHIC_MAX_VERTICES': 12,
    'EXACT_MAX_DEPTH': 20,
    'EXACT_NODE_BUDGET': 2_000_000,
    'THREADS': 1,
    'EXHAUSTIVE_ORDER': 6,
    'RANDOM_MEDIUM_SIZES': (8, 10, 12),
    'RANDOM_MEDIUM_DENSITIES': (0.1, 0.3, 0.5, 0.8),
    'RANDOM_MEDIUM_SEEDS': 500,
    'SCALING_SIZES': (500, 1000, 2000),
    'SCALING_AVERAGE_DEGREE': 20,
    'REPORT_DIR': 'bench_reports',
}


def get_setting(name: str) -> Any:
    from django.conf import settings
    from django.core.exceptions import ImproperlyConfigured

    try:
        overrides = getattr(settings, 'CLUSTERKIT', {})
    except ImproperlyConfigured:
        overrides = {}
    if name in overrides:
        return overrides[name]
    return DEFAULTS[name]
