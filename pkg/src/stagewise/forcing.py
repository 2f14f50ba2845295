"""Bi-immune sets: the scan driven by a non-dominated function, and the
finite-extension sequence that alternates diagonalization with maximising
the number of halting diagonal computations."""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import product
from typing import Callable, List, Optional, Sequence, Tuple

from .core import Bits, Converged, Horizon, StagePartialMap, oracle_eval, word
from .errors import SearchExhausted


@dataclass(frozen=True)
class BiBuild:
    bits: Tuple[int, ...]
    treated: Tuple[Optional[int], ...]   # least row diagonalized at y, or None

    def to_lines(self) -> List[str]:
        return [f"{y} {b}" + ("" if t is None else f" {t}") for y, (b, t) in enumerate(zip(self.bits, self.treated))]

    def text(self) -> str:
        return "\n".join(self.to_lines()) + "\n"


def ndf_to_bi(m: StagePartialMap, oracle: Sequence[int], f: Callable[[int], int], h: Horizon) -> BiBuild:
    """Decide ``B(y)`` for ``y < x_max`` in order.

    The least ``e < y`` whose run on ``y`` converges within ``f(y)`` steps and
    that, at the same budget, agrees with ``B`` wherever it has converged below
    ``y`` gets treated: ``B(y)`` is set to differ from its value (1 on a 0, 0
    on anything else).  With no such ``e``, ``B(y) = 0``.
    """
    oracle = tuple(oracle)
    b: List[int] = []
    treated: List[Optional[int]] = []
    for y in range(h.x_max):
        budget = f(y)
        pick = None
        for e in range(y):
            state, _ = oracle_eval(m, oracle, e, y, budget)
            if not isinstance(state, Converged):
                continue
            consistent = True
            for x in range(y):
                sx, _ = oracle_eval(m, oracle, e, x, budget)
                if isinstance(sx, Converged) and sx.value != b[x]:
                    consistent = False
                    break
            if consistent:
                pick = (e, state.value)
                break
        if pick is None:
            b.append(0)
            treated.append(None)
        else:
            e, v = pick
            b.append(1 if v == 0 else 0)
            treated.append(e)
    return BiBuild(tuple(b), tuple(treated))


# -- forcing sequence --------------------------------------------------------

@dataclass(frozen=True)
class ForcingBounds:
    max_len: int      # even stages look at extensions up to this length
    budget: int       # step budget for each diagonal computation


@dataclass(frozen=True)
class ForcingSequence:
    """``strings[0] = ()``; ``targets[i]`` is ``B_i`` as a bit function; ``c[i]`` is the index bound."""

    targets: Tuple[Callable[[int], int], ...] = ()
    c: Tuple[int, ...] = ()
    strings: Tuple[Bits, ...] = ((),)
    counts: Tuple[Optional[int], ...] = (None,)

    @property
    def last(self) -> Bits:
        return self.strings[-1]

    def to_lines(self) -> List[str]:
        out = []
        for stage, (sigma, n) in enumerate(zip(self.strings, self.counts)):
            parity = "start" if stage == 0 else ("odd" if stage % 2 else "even")
            out.append(f"{stage} {parity} {word(sigma)} {'-' if n is None else n}")
        return out


def jump_count(family: StagePartialMap, sigma: Bits, c: int, budget: int) -> int:
    """Number of ``e < c`` whose run on ``e`` halts within ``budget`` using ``sigma`` as oracle."""
    return sum(1 for e in range(c) if isinstance(oracle_eval(family, sigma, e, e, budget)[0], Converged))


def harrington_extend(fs: ForcingSequence, stage: int, family: StagePartialMap, bounds: ForcingBounds
                      ) -> Tuple[Bits, int]:
    """String for ``stage`` (which must equal the number of strings so far) and its jump count.

    Odd stage ``2i+1``: shortest extension disagreeing with ``B_i``; if the
    current string already disagrees, one more 0 is appended.  Even stage
    ``2i+2``: length-lexicographically least proper extension of length at
    most ``max_len`` maximising :func:`jump_count` with bound ``c_i``.
    """
    if stage != len(fs.strings) or stage < 1:
        raise ValueError(f"stage {stage} does not follow a sequence of {len(fs.strings)} strings")
    sigma = fs.last
    if stage % 2:
        i = (stage - 1) // 2
        if i >= len(fs.targets):
            raise ValueError(f"stage {stage} needs target B_{i}; only {len(fs.targets)} given")
        target = fs.targets[i]
        if any(b != target(x) for x, b in enumerate(sigma)):
            nxt = sigma + (0,)
        else:
            nxt = sigma + (1 - target(len(sigma)),)
        c = fs.c[i] if i < len(fs.c) else 0
        return nxt, jump_count(family, nxt, c, bounds.budget)
    i = (stage - 2) // 2
    c = fs.c[i] if i < len(fs.c) else 0
    best, best_n = None, -1
    for n in range(len(sigma) + 1, bounds.max_len + 1):
        for tail in product((0, 1), repeat=n - len(sigma)):
            cand = sigma + tail
            k = jump_count(family, cand, c, bounds.budget)
            if k > best_n:
                best, best_n = cand, k
                if best_n == c:
                    return best, best_n
    if best is None:
        raise SearchExhausted(stage, detail=f"no proper extension of {word(sigma)} within length {bounds.max_len}")
    return best, best_n


def advance(fs: ForcingSequence, family: StagePartialMap, bounds: ForcingBounds) -> ForcingSequence:
    nxt, n = harrington_extend(fs, len(fs.strings), family, bounds)
    return replace(fs, strings=fs.strings + (nxt,), counts=fs.counts + (n,))


def run_forcing(fs: ForcingSequence, stages: int, family: StagePartialMap, bounds: ForcingBounds) -> ForcingSequence:
    for _ in range(stages):
        fs = advance(fs, family, bounds)
    return fs
