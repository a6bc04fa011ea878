"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: ``ArgumentError`` is a usage problem (1),
everything else derived from ``CoheraError`` is a structural or schema
problem (2).
"""


class CoheraError(Exception):
    """Base class for all library errors."""


class ArgumentError(CoheraError, ValueError):
    """An argument is outside the documented domain."""


class StructuralError(CoheraError):
    """Input data violates an axiom (functoriality, associativity, ...)."""


class CapacityError(CoheraError):
    """An enumeration would exceed the configured cell cap."""


class UnsupportedInputError(CoheraError):
    """The input is valid but outside what the construction handles."""


class IsotropyError(StructuralError):
    """A stabilizer lies outside the requested family of subgroups."""


class IncompleteInputError(CoheraError):
    """Required oracle data is missing."""


class SingularityError(CoheraError, ZeroDivisionError):
    """A formula hits a vanishing denominator."""


class DomainError(CoheraError, ValueError):
    """A formula is undefined on the given input."""


class SchemaError(CoheraError):
    """A JSON document does not match its schema."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location
