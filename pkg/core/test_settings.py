"""
Test settings for Django project - small corpora and full certification
"""

from .settings import *

CLUSTERKIT = {
    **CLUSTERKIT,
    'CERTIFY_QUOTIENTS': True,
    'THREADS': 1,
    'RANDOM_MEDIUM_SEEDS': int(os.getenv('CLUSTERKIT_RANDOM_MEDIUM_SEEDS', '20')),
    'SCALING_SIZES': (100, 200),
}

# Keep test output readable
LOGGING['loggers'] = {
    name: {**config, 'level': os.getenv('CLUSTERKIT_LOG_LEVEL', 'WARNING').upper()}
    for name, config in LOGGING['loggers'].items()
}

FULL_ACCEPTANCE = os.getenv('CLUSTERKIT_FULL_ACCEPTANCE', '').lower() in ('true', '1', 'yes')
