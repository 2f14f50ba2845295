"""Step-bounded evaluation of indexed partial maps.

A family is a two-place partial map ``(e, x) -> y`` together with a notion of
*when* each value appears.  Evaluating at budget ``s`` answers "has row ``e``
converged on ``x`` within ``s`` steps?".  All families in the workbench obey
the strict stage convention: a value ``y`` that appears at step ``t`` satisfies
``y < t``, so converging within budget ``s`` always yields ``y < s``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

from .errors import ConfigError

Bits = Tuple[int, ...]


@dataclass(frozen=True)
class Horizon:
    """Finite window: inputs ``x < x_max``, rows ``e < e_max``, budget ``s_max``."""

    x_max: int
    e_max: int
    s_max: int

    def __post_init__(self):
        for name in ("x_max", "e_max", "s_max"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
                raise ConfigError(f"horizon {name} must be a positive integer, got {value!r}")


@dataclass(frozen=True)
class Converged:
    value: int

    def __repr__(self):
        return f"Converged({self.value})"


class _Pending:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Pending"

    def __reduce__(self):
        return (_Pending, ())


class _Blocked:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Blocked"

    def __reduce__(self):
        return (_Blocked, ())


PENDING = _Pending()
# use marker for a run that asked for an oracle bit past the end of the oracle
BLOCKED = _Blocked()

ConvergenceState = Union[Converged, _Pending]
Use = Union[int, _Blocked]


def bits(word: str) -> Bits:
    """``"0110"`` -> ``(0, 1, 1, 0)``; ``""`` is the empty string."""
    word = word.strip()
    if word in ("", "-", "<>"):
        return ()
    if any(c not in "01" for c in word):
        raise ConfigError(f"not a binary word: {word!r}")
    return tuple(int(c) for c in word)


def word(sigma: Sequence[int]) -> str:
    """Inverse of :func:`bits`; the empty string prints as ``-`` so lines stay splittable."""
    if not sigma:
        return "-"
    return "".join(str(b) for b in sigma)


class StagePartialMap:
    """Base class for stage-indexed partial maps.

    Subclasses implement :meth:`evaluate`.  Oracle-free families simply ignore
    the oracle and report use 0.
    """

    identifier: str = "family"

    def evaluate(self, e: int, x: int, s: int, oracle: Optional[Bits] = None) -> Tuple[ConvergenceState, Use]:
        raise NotImplementedError

    @property
    def row_count(self) -> int:
        """One more than the largest row index that can ever converge."""
        raise NotImplementedError


class TableFamily(StagePartialMap):
    """A family given by explicit ``(e, x, t, v)`` entries: row ``e`` converges on
    ``x`` at step ``t`` with value ``v``.  Absent entries never converge."""

    def __init__(self, entries: Union[Mapping[Tuple[int, int], Tuple[int, int]], Iterable[Tuple[int, int, int, int]]] = (),
                 identifier: str = "table"):
        table = {}
        items = entries.items() if isinstance(entries, Mapping) else (((e, x), (t, v)) for e, x, t, v in entries)
        for (e, x), (t, v) in items:
            if min(e, x, t, v) < 0:
                raise ConfigError(f"negative entry {(e, x, t, v)}")
            if v >= t:
                raise ConfigError(f"entry {(e, x, t, v)} breaks the stage convention value < step")
            if (e, x) in table and table[e, x] != (t, v):
                raise ConfigError(f"row {e} is not a function at x={x}: {table[e, x]} vs {(t, v)}")
            table[e, x] = (t, v)
        self._table = table
        self.identifier = identifier
        self._rows = 1 + max((e for e, _ in table), default=-1)

    def evaluate(self, e, x, s, oracle=None):
        hit = self._table.get((e, x))
        if hit is not None and hit[0] <= s:
            return Converged(hit[1]), 0
        return PENDING, 0

    @property
    def row_count(self):
        return self._rows

    def entries(self) -> Iterator[Tuple[int, int, int, int]]:
        for (e, x), (t, v) in sorted(self._table.items()):
            yield e, x, t, v

    def step(self, e: int, x: int) -> Optional[int]:
        """Step at which ``(e, x)`` converges, or ``None``."""
        hit = self._table.get((e, x))
        return None if hit is None else hit[0]

    def __len__(self):
        return len(self._table)

    def __eq__(self, other):
        return isinstance(other, TableFamily) and self._table == other._table

    def __repr__(self):
        return f"TableFamily({self.identifier!r}, {len(self._table)} entries)"

    # -- fixture file format: one ``e x t v`` line per entry, ``#`` comments --

    def to_lines(self) -> list:
        return [f"{e} {x} {t} {v}" for e, x, t, v in self.entries()]

    @classmethod
    def from_lines(cls, lines: Iterable[str], identifier: str = "table") -> "TableFamily":
        entries = []
        for lineno, raw in enumerate(lines, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ConfigError(f"line {lineno}: expected 'e x t v', got {raw.strip()!r}")
            try:
                entries.append(tuple(int(p) for p in parts))
            except ValueError:
                raise ConfigError(f"line {lineno}: non-decimal field in {raw.strip()!r}") from None
        return cls(entries, identifier=identifier)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "TableFamily":
        path = Path(path)
        return cls.from_lines(path.read_text().splitlines(), identifier=path.stem)

    def dump(self, path: Union[str, Path]) -> None:
        Path(path).write_text("\n".join(self.to_lines()) + "\n")


def eval_bounded(family: StagePartialMap, e: int, x: int, s: int) -> ConvergenceState:
    """Run row ``e`` on ``x`` for at most ``s`` steps, without an oracle."""
    if e < 0 or x < 0 or s < 0:
        return PENDING
    return family.evaluate(e, x, s)[0]


def oracle_eval(machine: StagePartialMap, oracle: Sequence[int], e: int, x: int, s: int) -> Tuple[ConvergenceState, Use]:
    """Like :func:`eval_bounded` but against a finite oracle string; also reports the use."""
    if e < 0 or x < 0 or s < 0:
        return PENDING, 0
    return machine.evaluate(e, x, s, tuple(oracle))


def value_at(family: StagePartialMap, e: int, x: int, s: int) -> Optional[int]:
    """Converged value or ``None``; a terse form of :func:`eval_bounded`."""
    state = eval_bounded(family, e, x, s)
    return state.value if isinstance(state, Converged) else None


def totality_on_horizon(family: StagePartialMap, e: int, h: Horizon) -> bool:
    return all(isinstance(eval_bounded(family, e, x, h.s_max), Converged) for x in range(h.x_max))


def row_graph(family: StagePartialMap, e: int, h: Horizon) -> Optional[Tuple[int, ...]]:
    """Values of row ``e`` on ``[0, x_max)`` if it is total on the horizon, else ``None``."""
    out = []
    for x in range(h.x_max):
        v = value_at(family, e, x, h.s_max)
        if v is None:
            return None
        out.append(v)
    return tuple(out)


def total_rows(family: StagePartialMap, h: Horizon) -> list:
    return [e for e in range(h.e_max) if totality_on_horizon(family, e, h)]


def convergence_step(family: StagePartialMap, e: int, x: int, s_max: int) -> Optional[int]:
    """Least budget at which ``(e, x)`` converges, found by bisection on monotone convergence."""
    if value_at(family, e, x, s_max) is None:
        return None
    lo, hi = 0, s_max
    while lo < hi:
        mid = (lo + hi) // 2
        if value_at(family, e, x, mid) is None:
            lo = mid + 1
        else:
            hi = mid
    return lo
