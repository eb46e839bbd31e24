MISSING_FIELD_ERROR = 'Missing fields'
INVALID_FAMILY_ERROR = 'k1 and k2 must be positive and 1 <= K <= {max_K}'
EMPTY_GRID_ERROR = 'Grid must not be empty'
NON_POSITIVE_TOLERANCE_ERROR = 'Tolerances must be positive'
UNKNOWN_TOLERANCE_ERROR = 'Unknown tolerance "{name}"'
COARSE_GRID_ERROR = 'Audit grid needs at least {minimum} points, got {size}'
INFEASIBLE_START_ERROR = 'Starting point has non-finite energy'
DOMAIN_ERROR = 'Derivative requested at non-positive strain'
BETA_ROUTES_ERROR = 'beta routes disagree: {direct!r} (c-split) vs {tilde!r} (c-free)'
NOT_CONVERGED_ERROR = 'Layer truncation did not converge up to N = {N}'
K2_ONLY_ERROR = 'Only implemented for next-to-nearest neighbours (K = 2)'
K_AT_LEAST_2_ERROR = 'Needs a splitting of the nearest-neighbour energy (K >= 2)'

EXPERIMENTS = ('audit', 'density', 'phi', 'chain', 'layer', 'decay')

# Desk-scale caps.
MAX_K = 8
MAX_CELL_SIZE = 4096
MAX_CHAIN_SIZE = 2 ** 14

AUDIT_MIN_POINTS = 100
ENVELOPE_MIN_POINTS = 3

CSV_FLOAT_FORMAT = '{:.17g}'
