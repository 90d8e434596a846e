"""Workload budget shared by every enumerating operation.

The budget counts enumerated lattice points and field elements.  Operations
take an optional ``budget`` argument; ``None`` means the process-wide default,
which the CLI sets from ``--budget`` or ``SPARSITY_LAB_BUDGET``.
"""

from __future__ import annotations

import os
from contextlib import contextmanager

from .errors import WorkloadExceeded

DEFAULT_BUDGET = 10**8
ENV_VAR = "SPARSITY_LAB_BUDGET"

_current = DEFAULT_BUDGET


def get_budget() -> int:
    return _current


def set_budget(value: int) -> None:
    global _current
    if value < 1:
        raise ValueError("budget must be positive")
    _current = int(value)


@contextmanager
def budget_scope(value: int | None):
    """Temporarily replace the default budget."""
    global _current
    saved = _current
    if value is not None:
        set_budget(value)
    try:
        yield
    finally:
        _current = saved


def budget_from_env(fallback: int | None = None) -> int | None:
    raw = os.environ.get(ENV_VAR)
    if raw is None or raw.strip() == "":
        return fallback
    return int(raw)


def check(states: int, budget: int | None = None, what: str = "enumeration") -> None:
    limit = _current if budget is None else budget
    if states > limit:
        raise WorkloadExceeded(f"{what} needs {states} states, budget is {limit}")
