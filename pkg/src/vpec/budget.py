"""Enumeration budget shared by every exhaustive routine."""

from __future__ import annotations

import os

DEFAULT_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    """An exhaustive enumeration would exceed the configured budget."""


def get_budget(budget: int | None = None) -> int:
    if budget is not None:
        return budget
    env = os.environ.get("VPEC_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


def check_budget(size: int, budget: int | None = None, what: str = "enumeration") -> None:
    limit = get_budget(budget)
    if size > limit:
        raise BudgetExceeded(f"{what} of size {size} exceeds budget {limit}")
