# SPDX-License-Identifier: GPL-2.0-or-later

# stationary distributions must sum to one within this
STATIONARY_TOL = 1e-10
# balance equations of the threshold chain
BALANCE_TOL = 1e-12
# Poisson equation residual, relative to max(1, |c|, |V|)
POISSON_TOL = 1e-9
# policy iteration only switches on a strict improvement
IMPROVEMENT_TOL = 1e-10
# activation gaps below this count as flat
DEGENERATE_GAP = 1e-12
# relative tolerance when collecting all minimizing thresholds
MINIMIZER_RTOL = 1e-9
# widest bracket tried by the index root finder
BISECTION_BRACKET = 1e12

ACTION_LIMIT = 10 ** 6
STATE_LIMIT = 4096

# rebuild index tables once some estimate moved by more than this
RHO_REBUILD_TOL = 1e-6
RHO_PRIOR = 1.0
# index tables need a renewing chain, estimates of zero are raised to this
RHO_FLOOR = 0.01

DEFAULT_USERS = 10
DEFAULT_CHANNELS = 5
DEFAULT_STATES = 10
HOLDING_RANGE = (0.0, 20.0)
RHO_RANGE = (0.7, 0.9)
TAU_RANGE = (10.0, 20.0)
DEFAULT_HORIZON = 250
DEFAULT_REPEATS = 10

OFFLINE_USERS = 3
OFFLINE_CHANNELS = 2

SWEEP_SIZES = (4, 6, 8, 10)

LOG_FILE = "aoisched.log"
LOG_MAX_BYTES = 5 * 1024 * 1024
LOG_BACKUPS = 5

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SIZE = 3
EXIT_NUMERICAL = 4
