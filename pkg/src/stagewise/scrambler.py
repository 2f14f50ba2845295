"""Scrambled re-enumerations of a family restricted to a guessed index set.

Given rows ``psi_e`` and a stage approximation ``sigma_s`` to a true path, the
construction keeps one row of a new map ``theta`` per binary string.  Even
stages abandon the rows of strings lying strictly to the right of ``sigma_s``;
odd stages let the row of ``sigma_s[:e+1]`` copy ``s`` steps of ``psi_e``
whenever bit ``e`` of ``sigma_s`` selects it.  Rows on the true path are
abandoned only finitely often, so they end up total exactly when the imitated
row is total; everything else is cut off after finitely many values.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .approximation import PathApprox
from .core import Bits, Horizon, StagePartialMap, TableFamily, value_at, word
from .errors import EmptySequence, PoolExhausted
from .trace import ConstructionTrace

IndexTuple = Tuple[int, ...]


class Mode(str, enum.Enum):
    PI2 = "pi2"        # imitate where the guessed bit is 0
    SIGMA2 = "sigma2"  # imitate where the guessed bit is 1

    @property
    def bit(self) -> int:
        return 0 if self is Mode.PI2 else 1


def right_of(tau: Sequence[int], sigma: Sequence[int]) -> bool:
    """``tau`` branches off ``sigma`` to the right.

    True iff at the first position where both are defined and differ, ``tau``
    has 1 and ``sigma`` has 0.  Strings on a common path (one a prefix of the
    other) are never right of each other.
    """
    for a, b in zip(tau, sigma):
        if a != b:
            return a > b
    return False


def decode_indices(sigma: Sequence[int]) -> IndexTuple:
    """Run lengths of 1s closed by each 0: ``11010`` -> ``(2, 1)``; trailing 1s are dropped."""
    out = []
    ones = 0
    for b in sigma:
        if b:
            ones += 1
        else:
            out.append(ones)
            ones = 0
    return tuple(out)


def encode_indices(indices: Sequence[int]) -> Bits:
    out: List[int] = []
    for e in indices:
        out.extend([1] * e)
        out.append(0)
    return tuple(out)


class RowAssignment:
    """Strings to physical rows of theta.

    Fresh rows are the even numbers in allocation order; odd rows stay
    unassigned as the reserve.  Rows are never handed out twice.
    """

    def __init__(self, capacity: int):
        self.capacity = capacity
        self.issued = 0
        self.current: Dict[Bits, int] = {}
        self.retired: Set[int] = set()

    def row(self, sigma: Bits) -> Tuple[int, bool]:
        """Row of ``sigma``, allocating a fresh one if needed; second item tells if it is new."""
        r = self.current.get(sigma)
        if r is not None:
            return r, False
        if self.issued >= self.capacity:
            raise PoolExhausted(self.capacity)
        r = 2 * self.issued
        self.issued += 1
        self.current[sigma] = r
        return r, True

    def abandon(self, sigma: Bits) -> int:
        r = self.current.pop(sigma)
        self.retired.add(r)
        return r


@dataclass
class ScrambleResult:
    theta: TableFamily
    trace: ConstructionTrace
    row_string: Dict[int, Bits] = field(default_factory=dict)   # physical row -> its string
    row_index: Dict[int, int] = field(default_factory=dict)     # physical row -> imitated psi row
    final_assignment: Dict[Bits, int] = field(default_factory=dict)

    def total_rows(self, h: Horizon) -> List[int]:
        """Rows of theta defined on every ``x < x_max``."""
        counts: Dict[int, int] = {}
        for r, _x, _t, _v in self.theta.entries():
            counts[r] = counts.get(r, 0) + 1
        return sorted(r for r, n in counts.items() if n == h.x_max)

    def total_graphs(self, h: Horizon) -> Set[Tuple[int, ...]]:
        graphs = {}
        for r, x, _t, v in self.theta.entries():
            graphs.setdefault(r, {})[x] = v
        return {tuple(g[x] for x in range(h.x_max)) for g in graphs.values() if len(g) == h.x_max}


def _run(psi: StagePartialMap, p: PathApprox, imitate_bit: int, index_of: Callable[[Bits, int], int],
         h: Horizon, capacity: Optional[int], identifier: str) -> ScrambleResult:
    if capacity is None:
        # each odd stage opens at most e_max rows, so this can only run dry on purpose
        capacity = h.s_max * h.e_max + 1
    rows = RowAssignment(capacity)
    trace = ConstructionTrace()
    defined: Dict[int, Dict[int, Tuple[int, int]]] = {}
    row_string: Dict[int, Bits] = {}
    row_index: Dict[int, int] = {}

    for s in range(h.s_max):
        sigma = p(s)
        for tau in sorted(rows.current):
            if right_of(tau, sigma):
                r = rows.abandon(tau)
                trace.emit(2 * s, "abandon", string=word(tau), row=r)
        for pos, b in enumerate(sigma):
            if b != imitate_bit:
                continue
            e = index_of(sigma, pos)
            if e >= h.e_max:
                continue
            tau = sigma[:pos + 1]
            r, fresh = rows.row(tau)
            if fresh:
                trace.emit(2 * s + 1, "assign", string=word(tau), row=r)
                row_string[r] = tau
                row_index[r] = e
                defined[r] = {}
            trace.emit(2 * s + 1, "imitate", string=word(tau), row=r, e=e, steps=s)
            got = defined[r]
            for x in range(h.x_max):
                if x in got:
                    continue
                v = value_at(psi, e, x, s)
                if v is not None:
                    # the copied value appeared within s steps, so v < s keeps the stage convention
                    got[x] = (s, v)
                    trace.emit(2 * s + 1, "define", string=word(tau), row=r, x=x, v=v)

    theta = TableFamily(((r, x, t, v) for r, vals in defined.items() for x, (t, v) in vals.items()),
                        identifier=identifier)
    return ScrambleResult(theta, trace, row_string, row_index, dict(rows.current))


def scramble(psi: StagePartialMap, p: PathApprox, mode: Mode, h: Horizon,
             capacity: Optional[int] = None) -> ScrambleResult:
    """Build theta whose total rows are the total ``psi_e`` with ``e`` selected by the true path.

    In ``Mode.PI2`` bit ``e`` of the path being 0 selects ``e`` (the path
    approximates the complement's characteristic string); ``Mode.SIGMA2``
    selects on 1.
    """
    mode = Mode(mode)
    return _run(psi, p, mode.bit, lambda sigma, pos: pos, h, capacity,
                identifier=f"theta[{psi.identifier},{p.identifier},{mode.value}]")


def greedy_indices(phi: Callable[[IndexTuple], bool], h: Horizon) -> IndexTuple:
    """``e_0`` least with ``phi((e_0,))``, then ``e_1`` least with ``phi((e_0, e_1))``, ..."""
    chosen: List[int] = []
    while len(chosen) < h.x_max:
        for e in range(h.e_max):
            if phi(tuple(chosen) + (e,)):
                chosen.append(e)
                break
        else:
            break
    return tuple(chosen)


def leftmost_branch(phi: Callable[[IndexTuple], bool], h: Horizon) -> Bits:
    """Leftmost branch through the tree of codes ``sigma`` with ``phi(decode(sigma))``.

    Descends preferring 0 (close the current entry) over 1 (raise it); an entry
    may not reach ``e_max`` and at most ``x_max`` entries are closed.
    """
    sigma: List[int] = []
    entries: List[int] = []
    pending = 0
    while len(entries) < h.x_max:
        if phi(tuple(entries) + (pending,)):
            sigma.append(0)
            entries.append(pending)
            pending = 0
        elif pending + 1 < h.e_max:
            sigma.append(1)
            pending += 1
        else:
            break
    return tuple(sigma)


def dependent_tree(phi: Callable[[IndexTuple], bool], h: Horizon, depth: int) -> FrozenSet[Bits]:
    """All codes of length ``<= depth`` inside the horizon whose decoded tuple satisfies ``phi``."""
    out = set()
    for n in range(depth + 1):
        for sigma in product((0, 1), repeat=n):
            entries = decode_indices(sigma)
            trailing = len(sigma) - (max((i for i, b in enumerate(sigma) if b == 0), default=-1) + 1)
            if trailing >= h.e_max or any(e >= h.e_max for e in entries) or len(entries) > h.x_max:
                continue
            if phi(entries):
                out.add(sigma)
    return frozenset(out)


@dataclass
class DependentResult(ScrambleResult):
    chosen: IndexTuple = ()
    branch: Bits = ()


def _closed_entry(sigma: Bits, pos: int) -> int:
    ones = 0
    i = pos - 1
    while i >= 0 and sigma[i] == 1:
        ones += 1
        i -= 1
    return ones


def scramble_dependent(psi: StagePartialMap, phi: Callable[[IndexTuple], bool], h: Horizon,
                       capacity: Optional[int] = None) -> DependentResult:
    """Theta representing ``{psi_{e_i}}`` for the greedy sequence of least indices satisfying ``phi``."""
    chosen = greedy_indices(phi, h)
    if not chosen:
        raise EmptySequence()
    branch = leftmost_branch(phi, h)
    if decode_indices(branch) != chosen:
        raise AssertionError(f"tree branch {word(branch)} decodes to {decode_indices(branch)}, greedy gave {chosen}")
    # the true path is revealed one bit per stage
    p = PathApprox(lambda s: branch[:s], identifier=f"branch-{word(branch)}")
    res = _run(psi, p, 0, _closed_entry, h, capacity, identifier=f"theta[{psi.identifier},dependent]")
    return DependentResult(res.theta, res.trace, res.row_string, res.row_index, res.final_assignment,
                           chosen=chosen, branch=branch)
