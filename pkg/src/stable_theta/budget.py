"""Node budgets for lattice enumerations.

Every tuple or vector visited by an enumeration charges one node.  Exceeding
the budget raises instead of silently truncating, so a result that comes
back is always complete.
"""

from __future__ import annotations

from .errors import BudgetExceededError

DEFAULT_NODE_BUDGET = 400_000_000


class Budget:
    """A mutable node counter shared across one logical computation."""

    __slots__ = ("limit", "used")

    def __init__(self, limit: int | None = None):
        self.limit = DEFAULT_NODE_BUDGET if limit is None else int(limit)
        if self.limit <= 0:
            raise ValueError("budget must be positive")
        self.used = 0

    def charge(self, n: int) -> None:
        self.used += n
        if self.used > self.limit:
            raise BudgetExceededError(
                f"enumeration budget exceeded: {self.used} > {self.limit} nodes")


def ensure_budget(budget) -> Budget:
    """Pass through a Budget, or build one from an int / None."""
    if isinstance(budget, Budget):
        return budget
    return Budget(budget)
