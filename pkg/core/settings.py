"""
Django settings for core project.

Generated by 'django-admin startproject' using Django 5.2.7.

For more information on this file, see
https://docs.djangoproject.com/en/5.2/topics/settings/

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

import os
from pathlib import Path
from dotenv import load_dotenv
import sentry_sdk

load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.getenv('SECRET_KEY', 'dev-secret-key-change-in-production')

DEBUG = os.getenv('DEBUG', 'True').lower() in ('true', '1', 'yes')

ALLOWED_HOSTS = os.getenv('ALLOWED_HOSTS', 'localhost,127.0.0.1').split(',')


# Application definition

INSTALLED_APPS = [
    'graphs',
    'decomposition',
    'witnesses',
    'dissociation',
    'association',
    'bench',
]

MIDDLEWARE = []

# No persistence: instances and reports live in files.
DATABASES = {}


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

# Default primary key field type
# https://docs.djangoproject.com/en/5.2/ref/settings/#default-auto-field

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Algorithm configuration

CLUSTERKIT = {
    'ADJACENCY_MATRIX_THRESHOLD': int(os.getenv('CLUSTERKIT_MATRIX_THRESHOLD', '512')),
    'CERTIFY_QUOTIENTS': os.getenv(
        'CLUSTERKIT_CERTIFY_QUOTIENTS', 'False'
    ).lower() in ('true', '1', 'yes'),
    'ORACLE_MAX_VERTICES': 12,
    'BRUTEFORCE_MAX_VERTICES': 60,
    'EXACT_ENUMERATION_MAX_VERTICES': 22,
    'EXACT_LEXICOGRAPHIC_MAX_VERTICES': 12,
    'EXACT_MAX_DEPTH': int(os.getenv('CLUSTERKIT_EXACT_MAX_DEPTH', '20')),
    'EXACT_NODE_BUDGET': int(os.getenv('CLUSTERKIT_EXACT_NODE_BUDGET', '2000000')),
    'THREADS': int(os.getenv('CLUSTERKIT_THREADS', '1')),
    'EXHAUSTIVE_ORDER': 6,
    'RANDOM_MEDIUM_SIZES': (8, 10, 12),
    'RANDOM_MEDIUM_DENSITIES': (0.1, 0.3, 0.5, 0.8),
    'RANDOM_MEDIUM_SEEDS': int(os.getenv('CLUSTERKIT_RANDOM_MEDIUM_SEEDS', '500')),
    'SCALING_SIZES': (500, 1000, 2000),
    'SCALING_AVERAGE_DEGREE': 20,
    'REPORT_DIR': os.getenv('CLUSTERKIT_REPORT_DIR', os.path.join(BASE_DIR, 'bench_reports')),
}


# Logging

LOG_LEVEL = os.getenv('CLUSTERKIT_LOG_LEVEL', 'INFO').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        app: {'handlers': ['console'], 'level': LOG_LEVEL, 'propagate': False}
        for app in ('graphs', 'decomposition', 'witnesses', 'dissociation', 'association', 'bench')
    },
}


SENTRY_DSN = os.getenv('SENTRY_DSN', '')

if SENTRY_DSN:
    sentry_sdk.init(
        dsn=SENTRY_DSN,
        environment=os.getenv('SENTRY_ENVIRONMENT', 'development' if DEBUG else 'production'),
        send_default_pii=False,
    )
