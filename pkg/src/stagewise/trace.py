"""Line-delimited ``key=value`` construction logs."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, List, Tuple, Union

from .errors import ConfigError

# values under these keys are words, never numbers (``string=0110`` is a bit string)
TEXT_KEYS = frozenset({"string", "sigma", "branch", "parity", "origin", "clause", "verdict"})


@dataclass(frozen=True)
class Event:
    stage: int
    kind: str
    fields: Tuple[Tuple[str, object], ...] = ()

    def get(self, key, default=None):
        for k, v in self.fields:
            if k == key:
                return v
        return default

    def __getitem__(self, key):
        for k, v in self.fields:
            if k == key:
                return v
        raise KeyError(key)

    def line(self) -> str:
        parts = [f"stage={self.stage}", f"kind={self.kind}"]
        parts += [f"{k}={v}" for k, v in self.fields]
        return " ".join(parts)

    @classmethod
    def parse(cls, line: str) -> "Event":
        pairs = []
        for token in line.split():
            key, sep, value = token.partition("=")
            if not sep:
                raise ConfigError(f"malformed trace token {token!r}")
            pairs.append((key, value))
        if len(pairs) < 2 or pairs[0][0] != "stage" or pairs[1][0] != "kind":
            raise ConfigError(f"trace line must start with stage= kind=: {line!r}")
        fields = tuple((k, v if k in TEXT_KEYS or not v.lstrip("-").isdigit() else int(v)) for k, v in pairs[2:])
        return cls(int(pairs[0][1]), pairs[1][1], fields)


class ConstructionTrace:
    """Ordered, append-only log of stage events."""

    def __init__(self, events: Iterable[Event] = ()):
        self._events: List[Event] = list(events)

    def emit(self, stage: int, kind: str, **fields) -> None:
        self._events.append(Event(stage, kind, tuple(fields.items())))

    def __iter__(self) -> Iterator[Event]:
        return iter(self._events)

    def __len__(self):
        return len(self._events)

    def __getitem__(self, i):
        return self._events[i]

    def of_kind(self, kind: str) -> List[Event]:
        return [ev for ev in self._events if ev.kind == kind]

    def lines(self) -> List[str]:
        return [ev.line() for ev in self._events]

    def text(self) -> str:
        return "".join(line + "\n" for line in self.lines())

    def write(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.text())

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "ConstructionTrace":
        return cls(Event.parse(line) for line in lines if line.strip() and not line.lstrip().startswith("#"))

    @classmethod
    def read(cls, path: Union[str, Path]) -> "ConstructionTrace":
        return cls.from_lines(Path(path).read_text().splitlines())
