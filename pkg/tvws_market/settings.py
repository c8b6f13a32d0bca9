"""
Django settings for tvws_market project.
Equilibrium solver for the integrated TV white space spectrum and information market.
"""

import os
import sys
from pathlib import Path
from decouple import config, Csv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Add apps directory to Python path
sys.path.insert(0, os.path.join(BASE_DIR, 'apps'))

# Only used for signing; there is no web surface.
SECRET_KEY = config('SECRET_KEY', default='tvws-market-dev-key')

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = config('ALLOWED_HOSTS', default='localhost,127.0.0.1', cast=Csv())

# Application definition
LOCAL_APPS = [
    'market',
    'dynamics',
    'competition',
    'bargaining',
    'benchmarks',
    'validation',
    'experiments',
]

INSTALLED_APPS = LOCAL_APPS

# No persistence beyond flat files
DATABASES = {}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

TEST_RUNNER = 'tvws_market.test_runner.LocalAppsRunner'

USE_I18N = False
USE_TZ = True
TIME_ZONE = config('TIME_ZONE', default='UTC')

# Solver configuration
TVWS = {
    # Default market parameters (simulation setting, lambda = 1.8)
    'DEFAULT_PARAMS': {
        'alpha1': config('TVWS_ALPHA1', default=1.0, cast=float),
        'beta1': config('TVWS_BETA1', default=1.0, cast=float),
        'gamma1': config('TVWS_GAMMA1', default=0.6, cast=float),
        'alpha2': config('TVWS_ALPHA2', default=1.0, cast=float),
        'beta2': config('TVWS_BETA2', default=1.8, cast=float),
        'gamma2': config('TVWS_GAMMA2', default=0.6, cast=float),
        'q_leasing': config('TVWS_Q_LEASING', default=6.0, cast=float),
        'cost_advanced': config('TVWS_COST_ADVANCED', default=0.2, cast=float),
        'cost_leasing': config('TVWS_COST_LEASING', default=0.9, cast=float),
    },

    # Numerics
    'EPSILON': config('TVWS_EPSILON', default=1e-9, cast=float),
    'COMPARISON_TOL': config('TVWS_COMPARISON_TOL', default=1e-12, cast=float),

    # Stage III
    'STAGE3_TOL': config('TVWS_STAGE3_TOL', default=1e-10, cast=float),
    'STAGE3_MAX_ITER': config('TVWS_STAGE3_MAX_ITER', default=100000, cast=int),
    'BISECTION_TOL': config('TVWS_BISECTION_TOL', default=1e-12, cast=float),
    'BISECTION_MAX_STEPS': config('TVWS_BISECTION_MAX_STEPS', default=200, cast=int),

    # Stage II
    'STAGE2_TOL': config('TVWS_STAGE2_TOL', default=1e-9, cast=float),
    'STAGE2_MAX_ROUNDS': config('TVWS_STAGE2_MAX_ROUNDS', default=10000, cast=int),
    'BEST_RESPONSE_POINTS': config('TVWS_BEST_RESPONSE_POINTS', default=2001, cast=int),
    'FD_STEP': config('TVWS_FD_STEP', default=1e-5, cast=float),
    'DIAGONAL_RESOLUTION': config('TVWS_DIAGONAL_RESOLUTION', default=0.05, cast=float),

    # Stage I
    'BARGAINING_GRID_STEPS': config('TVWS_BARGAINING_GRID_STEPS', default=201, cast=int),
    'DISAGREEMENT_COST_ADJUSTED': config('TVWS_DISAGREEMENT_COST_ADJUSTED', default=False, cast=bool),
    'BARGAINING_PAIRING': config('TVWS_BARGAINING_PAIRING', default='own'),

    # Benchmarks
    'COORDINATION_GRID': config('TVWS_COORDINATION_GRID', default=401, cast=int),
    'SENSING_GAIN': config('TVWS_SENSING_GAIN', default=2.0, cast=float),
    'SENSING_COST': config('TVWS_SENSING_COST', default=0.2, cast=float),

    # Validation / Monte Carlo
    'MC_CHANNELS': config('TVWS_MC_CHANNELS', default=10, cast=int),
    'MC_USERS': config('TVWS_MC_USERS', default=100, cast=int),
    'MC_SAMPLES': config('TVWS_MC_SAMPLES', default=1000000, cast=int),
    'MC_CHUNK': config('TVWS_MC_CHUNK', default=100000, cast=int),
    'MC_TX_POWER': config('TVWS_MC_TX_POWER', default=10.0, cast=float),
    'MC_NOISE': config('TVWS_MC_NOISE', default=1.0, cast=float),
    'MC_MEAN_TV': config('TVWS_MC_MEAN_TV', default=1.0, cast=float),
    'MC_MEAN_USER': config('TVWS_MC_MEAN_USER', default=0.5, cast=float),
    'MC_MEAN_OUTSIDE': config('TVWS_MC_MEAN_OUTSIDE', default=0.5, cast=float),
    'AGENT_COUNT': config('TVWS_AGENT_COUNT', default=100000, cast=int),
    'AGENT_MAX_ROUNDS': config('TVWS_AGENT_MAX_ROUNDS', default=1000, cast=int),

    # Experiments
    'SEED': config('TVWS_SEED', default=20150401, cast=int),
    'CSV_SCHEMA_VERSION': config('TVWS_CSV_SCHEMA_VERSION', default=1, cast=int),
    'CSV_FLOAT_FORMAT': '%.10g',
}

# Logging
LOG_LEVEL = config('TVWS_LOG_LEVEL', default='INFO')
LOG_FILE = config('TVWS_LOG_FILE', default='')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'solver': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'level': LOG_LEVEL,
            'class': 'logging.StreamHandler',
            'formatter': 'solver',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        app: {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        }
        for app in LOCAL_APPS
    },
}

if LOG_FILE:
    LOGGING['handlers']['file'] = {
        'level': LOG_LEVEL,
        'class': 'logging.FileHandler',
        'filename': LOG_FILE,
        'formatter': 'solver',
    }
    for logger in LOGGING['loggers'].values():
        logger['handlers'].append('file')
