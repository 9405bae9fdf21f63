"""Exception types shared across the package."""


class CatalogError(ValueError):
    """Unknown lattice name or invalid catalog entry."""


class ShapeError(ValueError):
    """Operands with incompatible genus, width, index or weight metadata."""


class FormatError(ValueError):
    """Malformed or invariant-violating serialized document."""


class BudgetExceededError(RuntimeError):
    """An enumeration exceeded its configured node budget."""


class UnsupportedError(ValueError):
    """A construction outside the supported range (e.g. semidefinite index)."""
