"""Finite-horizon workbench for stagewise constructions over weakly represented families."""

from .core import (BLOCKED, PENDING, Converged, Horizon, StagePartialMap, TableFamily, eval_bounded, oracle_eval,
                   row_graph, totality_on_horizon, value_at)
from .errors import (BudgetExceeded, ConfigError, ConstructionError, EmptySequence, NotSettled, OutOfRange,
                     Overflow, PoolExhausted, SearchExhausted, WorkbenchError)
from .machine import OracleMachine, ProgramFamily, assemble
from .trace import ConstructionTrace, Event

__version__ = "0.1.0"

__all__ = [
    "BLOCKED", "PENDING", "Converged", "Horizon", "StagePartialMap", "TableFamily", "eval_bounded", "oracle_eval",
    "row_graph", "totality_on_horizon", "value_at",
    "BudgetExceeded", "ConfigError", "ConstructionError", "EmptySequence", "NotSettled", "OutOfRange", "Overflow",
    "PoolExhausted", "SearchExhausted", "WorkbenchError",
    "OracleMachine", "ProgramFamily", "assemble", "ConstructionTrace", "Event",
]
