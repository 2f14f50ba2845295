"""Stage approximations: Δ2-style bit guesses and stagewise binary-string guesses."""

from __future__ import annotations

from collections import Counter
from pathlib import Path
from typing import Callable, Collection, FrozenSet, Iterable, Tuple, Union

from .core import Bits, Horizon, bits, word
from .errors import ConfigError, NotSettled


class LimitApprox:
    """Stage map ``(x, s) -> bit`` guessing membership of ``x`` at stage ``s``."""

    def __init__(self, fn: Callable[[int, int], int], identifier: str = "approx"):
        self._fn = fn
        self.identifier = identifier

    def __call__(self, x: int, s: int) -> int:
        return self._fn(x, s)

    @classmethod
    def constant(cls, bit: int) -> "LimitApprox":
        return cls(lambda x, s: bit, identifier=f"const{bit}")

    @classmethod
    def settling(cls, final: Collection[int], settle: Union[int, Callable[[int], int]] = 0,
                 before: Union[None, Callable[[int, int], int]] = None) -> "LimitApprox":
        """Membership in ``final`` from stage ``settle(x)`` on; earlier stages give the
        opposite bit unless ``before(x, s)`` says otherwise."""
        final = frozenset(final)
        settle_at = settle if callable(settle) else (lambda x, n=settle: n)

        def fn(x, s):
            if s >= settle_at(x):
                return int(x in final)
            if before is not None:
                return before(x, s)
            return int(x not in final)

        return cls(fn, identifier="settling")

    @classmethod
    def from_lines(cls, lines: Iterable[str], identifier: str = "approx") -> "LimitApprox":
        table = {}
        for lineno, raw in enumerate(lines, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                x, s, bit = (int(p) for p in line.split())
            except ValueError:
                raise ConfigError(f"line {lineno}: expected 'x s bit', got {raw.strip()!r}") from None
            if bit not in (0, 1):
                raise ConfigError(f"line {lineno}: bit must be 0 or 1")
            table[x, s] = bit

        def fn(x, s):
            try:
                return table[x, s]
            except KeyError:
                raise ConfigError(f"approximation {identifier!r} undefined at x={x}, s={s}") from None

        return cls(fn, identifier=identifier)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "LimitApprox":
        path = Path(path)
        return cls.from_lines(path.read_text().splitlines(), identifier=path.stem)

    def to_lines(self, x_max: int, s_max: int) -> list:
        return [f"{x} {s} {self(x, s)}" for x in range(x_max) for s in range(s_max)]


class PathApprox:
    """Stage map ``s -> sigma_s`` of binary strings."""

    def __init__(self, fn: Callable[[int], Bits], identifier: str = "path"):
        self._fn = fn
        self.identifier = identifier

    def __call__(self, s: int) -> Bits:
        return tuple(self._fn(s))

    @classmethod
    def constant(cls, sigma: Bits) -> "PathApprox":
        sigma = tuple(sigma)
        return cls(lambda s: sigma, identifier=f"const-{word(sigma)}")

    @classmethod
    def from_stages(cls, stages: Iterable[Bits], tail: Union[None, Bits] = None, identifier: str = "path") -> "PathApprox":
        """Explicit strings for the first stages, then ``tail`` (default: the last one) forever."""
        seq = [tuple(s) for s in stages]
        if not seq and tail is None:
            raise ConfigError("empty path approximation")
        rest = tuple(tail) if tail is not None else seq[-1]
        return cls(lambda s: seq[s] if s < len(seq) else rest, identifier=identifier)

    @classmethod
    def from_lines(cls, lines: Iterable[str], identifier: str = "path") -> "PathApprox":
        table = {}
        for lineno, raw in enumerate(lines, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) == 1:
                parts.append("")
            try:
                table[int(parts[0])] = bits(parts[1])
            except ValueError:
                raise ConfigError(f"line {lineno}: expected 's sigma', got {raw.strip()!r}") from None
        if not table:
            raise ConfigError(f"path approximation {identifier!r} has no stages")
        last = table[max(table)]

        def fn(s):
            # stages past the file repeat the final line
            if s in table:
                return table[s]
            if s > max(table):
                return last
            raise ConfigError(f"path approximation {identifier!r} undefined at stage {s}")

        return cls(fn, identifier=identifier)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "PathApprox":
        path = Path(path)
        return cls.from_lines(path.read_text().splitlines(), identifier=path.stem)

    def to_lines(self, s_max: int) -> list:
        return [f"{s} {word(self(s))}" for s in range(s_max)]


def complement_string(members: Union[Collection[int], Callable[[int], bool]], length: int) -> Bits:
    """Characteristic string of the complement: bit ``b`` is 0 exactly when ``b`` is a member."""
    test = members if callable(members) else (lambda b: b in members)
    return tuple(0 if test(b) else 1 for b in range(length))


def rt_strings(b_membership: Callable[[int], bool], length: int) -> FrozenSet[Bits]:
    """Strings of length ``<= length`` whose 0 bits all sit on members."""
    out = {()}
    frontier = [()]
    for pos in range(length):
        zero_ok = bool(b_membership(pos))
        nxt = []
        for sigma in frontier:
            nxt.append(sigma + (1,))
            if zero_ok:
                nxt.append(sigma + (0,))
        out.update(nxt)
        frontier = nxt
    return frozenset(out)


def settling_time(a: LimitApprox, x: int, h: Horizon) -> int:
    """Least stage from which ``a(x, .)`` is constant up to the horizon.

    Raises :class:`NotSettled` when the value still changes at the last stage.
    """
    if not 0 <= x < h.x_max:
        raise ValueError(f"x={x} outside the horizon")
    last = h.s_max - 1
    final = a(x, last)
    s = last
    while s > 0 and a(x, s - 1) == final:
        s -= 1
    if s == last and last > 0:
        raise NotSettled(x, last)
    return s


def recurrent_leftmost(p: PathApprox, window: Union[range, Tuple[int, int]], length: int) -> Bits:
    """Leftmost string of the given length met at least twice among ``sigma_s``, ``s`` in window.

    Returns the empty string when nothing of that length recurs.
    """
    stages = window if isinstance(window, range) else range(*window)
    seen = Counter(sigma for sigma in map(p, stages) if len(sigma) == length)
    recurring = [sigma for sigma, n in seen.items() if n >= 2]
    return min(recurring) if recurring else ()
