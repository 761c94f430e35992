"""Hidden correlations in single qudit systems.

Classical distributions and density matrices of one N-level system are
re-read as joint states of artificial subsystems through invertible index
maps; observable means then become correlation functions of commuting
factor observables.
"""

from qhc.errors import (
    ConsistencyError,
    ConventionMismatchError,
    DimensionError,
    IndexRangeError,
    QHCError,
    UnsupportedObservableError,
    UnsupportedPartitionError,
    ValidationError,
)
from qhc.indexmap import Convention, DimensionFactorization, IndexMap, enumerate_factorizations

__all__ = [
    "ConsistencyError",
    "Convention",
    "ConventionMismatchError",
    "DimensionError",
    "DimensionFactorization",
    "IndexMap",
    "IndexRangeError",
    "QHCError",
    "UnsupportedObservableError",
    "UnsupportedPartitionError",
    "ValidationError",
    "enumerate_factorizations",
]

__version__ = "0.1.0"
