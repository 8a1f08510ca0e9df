"""Application-wide constants.

Exit codes, schema versions, default bounds and the small enums shared by
the control, telescope and workbench layers live here.
"""

from enum import Enum, IntEnum


class SpaceKind(str, Enum):
    """Kinds of control spaces understood by the workbench."""

    METRIC = "metric"
    FINITE = "finite"

    def __str__(self) -> str:
        return self.value


class MetricKind(str, Enum):
    """Metrics available on rational coordinate spaces."""

    MAX = "max"
    EUCLID2 = "euclid2"

    def __str__(self) -> str:
        return self.value


class Direction(str, Enum):
    """Orientation of a single edge of a simplicial interval."""

    FORWARD = "fwd"
    BACKWARD = "bwd"

    def __str__(self) -> str:
        return self.value

    def flip(self) -> "Direction":
        return Direction.BACKWARD if self is Direction.FORWARD else Direction.FORWARD


class ExitCode(IntEnum):
    """Process exit codes of the CLI."""

    SUCCESS = 0
    CONTRACT_FAILURE = 1
    INPUT_ERROR = 2


# Serialization
SCHEMA_VERSION = "1.0"
REPORT_VERSION = "1.0"
JSON_INDENT = 2

# Telescopes
TRUNCATION_PADDING = 3  # default N = longest interval + padding
MIN_TRUNCATION = 1

# Linear algebra
DEFAULT_HOM_BOUND = 400  # max unknowns solved by hom_simplices
RING_SAMPLE_COUNT = 25  # sampled triples for ring axiom / homomorphism checks

# Degreewise checks
EXTRA_CHECK_DEGREES = 3  # identities checked up to top dimension + this

# Randomized generators
DEFAULT_SEED = 0

# File Locking
LOCK_TIMEOUT_SECONDS = 10  # Timeout for report lock acquisition

# K-theory categories
CATEGORY_COLORED_SETS = "colored-sets"
CATEGORY_ZAKHAREVICH = "zakharevich"
SUB_EQUAL_AC = "equal-AC"
SUPPORTED_CATEGORIES = (CATEGORY_COLORED_SETS, CATEGORY_ZAKHAREVICH)

# Environment variables
ENV_TRUNCATION = "CONTROLLED_MODULES_TRUNCATION"
ENV_REPORTS_DIR = "CONTROLLED_MODULES_REPORTS"
ENV_HOM_BOUND = "CONTROLLED_MODULES_HOM_BOUND"
ENV_SEED = "CONTROLLED_MODULES_SEED"
