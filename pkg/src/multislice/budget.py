"""Capacity guard for brute-force enumerations.

Everything in this package that materializes an exponentially large object
(slice enumerations, dense walk matrices, candidate codebooks) first asks
:func:`check_capacity`.  The default budget is deliberately desk-scale; set the
environment variable ``MULTISLICE_BUDGET`` to a larger integer to raise it.
"""

import os

DEFAULT_BUDGET = 2 * 10**7


class CapacityError(RuntimeError):
    """A requested enumeration exceeds the configured budget."""


def capacity_limit() -> int:
    """Return the current budget in "cells" (points, matrix entries, ...)."""
    raw = os.environ.get("MULTISLICE_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"MULTISLICE_BUDGET must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise ValueError("MULTISLICE_BUDGET must be positive")
    return value


def check_capacity(cost: int, what: str) -> None:
    limit = capacity_limit()
    if cost > limit:
        raise CapacityError(
            f"{what} needs {cost} cells but the budget is {limit}; "
            "set MULTISLICE_BUDGET to raise the cap"
        )
