"""Numerical constants for quadrature, boundary tests, oscillators and simulation."""

# Panel quadrature
GL_PANEL_ORDER = 20  # Gauss-Legendre nodes per panel
DEFAULT_RTOL = 1e-8  # relative tolerance for FPT moments
DEFAULT_ATOL_SCALE = 1e-12  # absolute tolerance, multiplied by (xc - x_l)
SCALE_EXPONENT_RTOL = 1e-10  # Gauss-Kronrod tolerance for the scale exponent anchors
MAX_REFINEMENTS = 4  # panel doublings before a result is accepted with a warning
INTERIOR_PANELS = 32  # uniform panels across the domain
ANCHOR_LEVELS = 60  # geometric anchors towards the left boundary
RIGHT_CLUSTER_LEVELS = 12  # geometric anchors towards the right boundary

# Improper integrals at a boundary
CUTOFF_LEVELS = 40  # cutoffs a_j = x_l + (x0 - x_l) 2^-j, j = 0..40
FINITE_INCREMENT_RTOL = 1e-10  # last increment below this relative size means convergence
DIVERGENCE_GROWTH = 1e12  # total over first increment beyond this means divergence
STALL_RATIO = 0.999  # successive increment ratio at or above this means no decay
STALL_WINDOW = 5
GEOMETRIC_DECAY_RATIO = 0.9  # increments decaying at least this fast are extrapolated

# Oscillators
H_CRIT_GUARD = 1e-6  # energy models stop at (1 - guard) * H_crit
COMPLEMENTARY_SWITCH = 1e-8  # use k' expansions when 1 - k^2 falls below this
EI_SERIES_MAX = 40.0  # power series for Ei up to here, asymptotic series above
PERIOD_NODES = 64  # Gauss-Legendre nodes per quarter period
PERIOD_NODES_MAX = 1024
PERIOD_RTOL = 1e-7
KERNEL_DECAY_TOL = 1e-6  # lag truncation: |R(s)| below this fraction of R(0)
KERNEL_MAX_PERIODS = 200  # lag truncation cap in oscillation periods
KERNEL_FINE_LEVELS = 14  # geometric lag panels below one period
COEFF_TABLE_POINTS = 64  # energy nodes for colored-noise coefficient tables

# Noise synthesis
HARMONICS = 2048  # equal-energy bins for harmonic superposition
SYNTH_BLOCK = 1024  # time samples per synthesis block

# Monte Carlo
MC_BLOCK_PATHS = 1024  # paths per random stream block
MC_CHUNK_STEPS = 256  # time steps of noise drawn at once
MC_TABLE_CELLS = 16384  # equispaced coefficient cells between the floor and xc
MC_TABLE_REFINE = 16  # coefficient nodes per halving of the distance to x_l
CENSOR_LIMIT = 1e-3  # censored fraction above which a run is flagged
T_CAP_FACTOR = 1e4  # default time cap in units of the quadrature mean
OSCILLATOR_STEPS_PER_PERIOD = 200
Z_THRESHOLD = 3.0
AVERAGING_BAND = 0.10  # relative band for full-oscillator vs averaged-model checks
