from enum import Enum, IntEnum


class SignalDomain(str, Enum):
    FULL_LINE = "full-line"
    HALF_LINE = "half-line"


class ArgKind(str, Enum):
    RATIONAL = "rational"
    IRRATIONAL = "irrational"


class TransformKind(str, Enum):
    SCALE = "scale"
    SHIFT = "shift"
    DILATE = "dilate"
    REFLECT = "reflect"
    ADD = "add"
    MULTIPLY = "multiply"
    MODULUS = "modulus"
    RESTRICT = "restrict"
    RECIPROCAL = "reciprocal"


class KernelKind(str, Enum):
    EXPONENTIAL = "exponential"
    FRACTIONAL = "fractional"
    GAUSSIAN_HEAT = "gaussian-heat"


class OrbitStrategy(str, Enum):
    CONVERGENT = "convergent"
    SCAN = "scan"


class SolveStatus(str, Enum):
    CONVERGED = "converged"
    MAX_ITER = "max-iter"


class ExitCode(IntEnum):
    OK = 0
    VALIDATION = 2
    NUMERICAL = 3


class Defaults:
    UNIT_TOL = 1e-12
    LIPSCHITZ_SLACK = 1e-9
    BOHR_N_MAX = 8
    DEVRIES_I_MAX = 4
    KADER_LIPSCHITZ = 6.0
    DIVERGENCE_STREAK = 5
    ORBIT_CHUNK = 1 << 18


class ValidationMessages:
    NOT_UNIT = "|c| must equal 1 within 1e-12"
    HALF_LINE_NEGATIVE = "half-line signal evaluated at t < 0"
    DIM_MISMATCH = "signals must share domain and dimension"
    REFLECT_HALF_LINE = "reflect requires a full-line signal"
    EMPTY_SCAN = "scan report has no accepted periods"
    C_EQUALS_ONE = "mean-zero check requires c != 1"
    GRID_ORDER = "grid start must be smaller than grid end"
    GRID_NODES = "grid must contain at least two nodes"
