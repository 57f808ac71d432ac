# Shared constants for the eigen-domain channel generator

TOOL_VERSION = "1.0.0"


class Numerics:
    """Tolerances for the linear algebra layer"""
    UNIT_NORM_TOL = 1e-9
    HOUSEHOLDER_TOL = 1e-12
    UNITARY_TOL = 1e-9
    SVD_MAX_DIM = 8
    SVD_MAX_SWEEPS = 100
    SVD_OFF_DIAGONAL = 1e-14
    REORTHO_INTERVAL = 1000


class Doppler:
    """Virtual Doppler generator constants"""
    VECTOR_BAND = 0.255          # tone grid half-width, fraction of f_d
    VECTOR_FILTER_FACTOR = 0.6   # 0.6 * N_sam in the singular-vector filter
    SAMPLES_PER_TONE = 30        # N_freq = N_sam / 30
    MIN_SAMPLES = 60
    DISCARD_NUMERATOR = 1        # first 1/5 of the generated samples is dropped
    DISCARD_DENOMINATOR = 5
    VECTOR_NOISE_HEADROOM = 0.8  # divided by (dim - 1) for the free elements when dim > 2
    CAP_WARN_RATE = 0.01
    CAP_ABORT_RATE = 0.05
    NYQUIST_FACTOR = 2.0


class Scenario:
    """Scenario / SIR constants"""
    SIR_CAP_DB = 300.0
    SIR_INF_FLOOR = 1e-30        # interference / signal power treated as zero
    SWAP_THRESHOLD = 0.5


class Analysis:
    CDF_STEP_DB = 0.05
    MIN_CDF_SAMPLES = 100
    SLOPE_P_LO = 1e-3
    SLOPE_P_HI = 1e-1
    OOB_GUARD = 0.05
    DEFAULT_SEGMENTS = 32


class Defaults:
    """Model defaults"""
    N = 2
    M = 2
    F_D_HZ = 100.0
    S_F_GENERATE = 8.0
    S_F_SCENARIO = 20.0
    SAMPLES = 10000
    K_F = 0.0
    MODEL_CLASS = "V"
    OMEGA = 62.83185307179586    # 2*pi*10 rad/s
    N_S = 20
    SEED = 0
    THETA = 0.0
