"""Exact combinatorics for equivariant homotopy-commutative diagrams."""

import logging

from .errors import (ArgumentError, CapacityError, CoheraError, DomainError, IncompleteInputError,
                     IsotropyError, SchemaError, SingularityError, StructuralError,
                     UnsupportedInputError)

logging.getLogger("cohera").addHandler(logging.NullHandler())

__version__ = "0.1.0"

__all__ = [
    "ArgumentError", "CapacityError", "CoheraError", "DomainError", "IncompleteInputError",
    "IsotropyError", "SchemaError", "SingularityError", "StructuralError",
    "UnsupportedInputError", "__version__",
]
