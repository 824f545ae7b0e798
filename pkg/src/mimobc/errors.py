"""Exception types shared across the package."""


class MimoBcError(Exception):
    """Base class for all package errors."""


class DimensionError(MimoBcError, ValueError):
    """Antenna or matrix dimensions are invalid."""


class DomainError(MimoBcError, ValueError):
    """A parameter lies outside the domain of a closed-form expression."""


class SizeGuardError(MimoBcError, ValueError):
    """An exhaustive search instance exceeds the size guard."""


class ContractViolationError(MimoBcError, ValueError):
    """An input violates a documented precondition (e.g. non-orthonormal basis)."""


class RankDeficiencyError(MimoBcError, ArithmeticError):
    """Selected channels are numerically dependent; a triangular factor is singular."""


class NumericalError(MimoBcError, ArithmeticError):
    """A numerical identity that should hold to rounding error failed."""
