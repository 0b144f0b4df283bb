"""Result values shared by the search procedures and the checkers."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Any

SCHEMA = "besiml/1"

DEFAULT_NODES = 200_000


def default_node_budget() -> int:
    """Node budget for searches; the BESIML_BUDGET variable overrides it."""
    raw = os.environ.get("BESIML_BUDGET")
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"BESIML_BUDGET must be an integer, got {raw!r}") from None
        if value <= 0:
            raise ValueError("BESIML_BUDGET must be positive")
        return value
    return DEFAULT_NODES


@dataclass(frozen=True)
class Found:
    value: Any
    nodes: int = 0
    found = True
    status = "found"


@dataclass(frozen=True)
class NotFound:
    nodes: int = 0
    found = False
    status = "not-found"


@dataclass(frozen=True)
class BudgetExhausted:
    nodes: int = 0
    reason: str = ""
    found = False
    status = "budget-exhausted"


class Indeterminate(RuntimeError):
    """A decision procedure ran out of budget before reaching a verdict."""


class _Accept:
    ok = True

    def __bool__(self):
        return True

    def __repr__(self):
        return "Accept"


Accept = _Accept()


@dataclass(frozen=True)
class Reject:
    location: tuple[int, ...]
    reason: str
    ok = False

    def __bool__(self):
        return False

    def __str__(self):
        where = "root" if not self.location else "root." + ".".join(map(str, self.location))
        return f"rejected at {where}: {self.reason}"
