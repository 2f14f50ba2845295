"""Exception hierarchy shared by every construction."""

from __future__ import annotations


class WorkbenchError(Exception):
    """Base class; the CLI maps subclasses onto exit codes."""


class ConfigError(WorkbenchError, ValueError):
    """A scenario, fixture file or horizon failed to parse or validate."""


class ConstructionError(WorkbenchError):
    """A stagewise construction ran out of room inside its horizon."""


class PoolExhausted(ConstructionError):
    def __init__(self, capacity: int):
        super().__init__(f"fresh row pool exhausted after {capacity} rows")
        self.capacity = capacity


class EmptySequence(ConstructionError):
    def __init__(self):
        super().__init__("no first index satisfies the predicate")


class BudgetExceeded(ConstructionError):
    def __init__(self, x: int):
        super().__init__(f"no qualifying stage below the step budget at x={x}")
        self.x = x


class SearchExhausted(ConstructionError):
    def __init__(self, k: int, blocking=(), detail: str = ""):
        msg = f"search exhausted at k={k}"
        if blocking:
            msg += f" (blocking indices {sorted(blocking)})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.k = k
        self.blocking = tuple(sorted(blocking))


class NotSettled(ConstructionError):
    def __init__(self, x: int, last_change: int):
        super().__init__(f"approximation at x={x} still changing at stage {last_change}")
        self.x = x
        self.last_change = last_change


class Overflow(ConstructionError):
    def __init__(self, e: int, limit: int):
        super().__init__(f"g({e}) exceeds the numeric limit {limit}")
        self.e = e
        self.limit = limit


class OutOfRange(WorkbenchError, IndexError):
    pass
