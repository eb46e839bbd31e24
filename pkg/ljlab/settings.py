import os
from pathlib import Path

BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.environ.get('SECRET_KEY', 'ljlab-local-only')
DEBUG = os.environ.get('DEBUG', '') == '1'
ALLOWED_HOSTS = []

INSTALLED_APPS = [
    'rest_framework',
    'lattice',
]

# No database: results are flat CSV/JSON files.
DATABASES = {}


# Numerical defaults of the lattice app, see lattice/conf.py for the full
# list of keys. Anything set here overrides the built-in default.

LATTICE = {
    'OUTPUT_DIR': os.environ.get('LATTICE_OUTPUT_DIR', BASE_DIR / 'output'),
}


# Logging
# https://docs.djangoproject.com/en/4.2/topics/logging/

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'lattice': {
            'handlers': ['console'],
            'level': os.environ.get('LATTICE_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}


# Internationalization
# https://docs.djangoproject.com/en/4.2/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True
