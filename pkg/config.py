"""
Configuration for the VGNCF toolkit

Defaults for coding parameters, reproduction sweeps, the link-statistics
store, the Monte-Carlo oracle and logging.

Author: VGNCF Toolkit
Date: 2026-10-19
"""

import os
from dotenv import load_dotenv

load_dotenv()

VERSION = '1.0.0'

# Environment (set via ENV variable: development/production)
ENV = os.getenv('ENV', 'development')

# Logging
LOG_LEVEL = 'DEBUG' if ENV == 'development' else 'INFO'
LOG_FILE = 'logs/app.log'

# Output
OUTPUT_DIR = os.getenv('SNC_OUTPUT_DIR', 'output')
LINKDB_PATH = os.getenv('SNC_LINKDB_PATH', 'data/linkdb.sqlite')
SAMPLE_TOPOLOGY = 'data/sample_topology.json'

# Reproducibility
DEFAULT_SEED = int(os.getenv('SNC_SEED', 20160101))
WORKERS = int(os.getenv('SNC_WORKERS', os.cpu_count() or 1))

# Coding parameters (k information packets, L bytes per packet, GF(2^q))
DEFAULT_K = 50
DEFAULT_L = 100
DEFAULT_Q = 8

# Reliability targets
DEFAULT_RHO0 = 0.8
DEFAULT_ETA0 = 0.05

# Rate-region grid
RATE_WINDOW = (0.5, 1.0)
GRID_MAX_DELTA = 0.5
GRID_STEP = 0.01

# Complexity ceilings in logic gates
BETA0_VERY_LOW = 5e6
BETA0_LOW = 8e6
BETA0_HIGH = 10e6
BETA0_LEVELS = {
    'very-low': BETA0_VERY_LOW,
    'low': BETA0_LOW,
    'high': BETA0_HIGH,
}

# Reproduction sweeps
SWEEP_DELTAS = (0.1, 0.15)
SWEEP_RHO0 = (0.8, 0.85)
SWEEP_H_MAX = 20
CONNECTIVITY_H_LIMIT = 100000

# Optimizer
TERNARY_AUDIT_POINTS = 32

# Link statistics smoothing
EWMA_ALPHA = 0.2

# Monte-Carlo oracle
MC_TRIALS = int(os.getenv('SNC_TRIALS', 100000))
ORACLE_Z = 3.0
VALIDATION_GRID = {
    'codes': [(1, 2), (10, 12), (50, 60), (50, 63)],
    'deltas': [0.05, 0.1, 0.15, 0.3],
    'hops': [1, 2, 3],
}

# Lifecycle
DEFAULT_RESOURCE_UNITS = 4
