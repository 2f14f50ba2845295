"""Almost disjoint families: extension by a new set, the greedy partition
family, principal functions, and a partition whose blocks are infinite
exactly on a guessed index set."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

from .approximation import LimitApprox
from .core import Horizon, StagePartialMap, TableFamily, convergence_step, row_graph, value_at
from .errors import ConfigError, OutOfRange, SearchExhausted
from .trace import ConstructionTrace


@dataclass(frozen=True)
class EnumeratedSet:
    """``b_0 < b_1 < ...`` with the stage at which each element was enumerated."""

    elements: Tuple[int, ...]
    stages: Tuple[int, ...]

    def __post_init__(self):
        if len(self.elements) != len(self.stages):
            raise ValueError("one stage per element")
        if any(a >= b for a, b in zip(self.elements, self.elements[1:])):
            raise ValueError(f"elements not strictly increasing: {self.elements}")
        if any(a > b for a, b in zip(self.stages, self.stages[1:])):
            raise ValueError(f"stages not nondecreasing: {self.stages}")

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x):
        return x in set(self.elements)

    def to_lines(self) -> List[str]:
        return [f"{k} {b} {s}" for k, (b, s) in enumerate(zip(self.elements, self.stages))]

    @classmethod
    def from_lines(cls, lines) -> "EnumeratedSet":
        rows = []
        for raw in lines:
            line = raw.split("#", 1)[0].strip()
            if line:
                k, b, s = (int(p) for p in line.split())
                rows.append((k, b, s))
        rows.sort()
        if [k for k, _, _ in rows] != list(range(len(rows))):
            raise ConfigError("enumerated set lines must number k = 0, 1, 2, ...")
        return cls(tuple(b for _, b, _ in rows), tuple(s for _, _, s in rows))


def extend_mad(family: StagePartialMap, e_approx: LimitApprox, h: Horizon, b0: int = 0,
               trace: Optional[ConstructionTrace] = None) -> EnumeratedSet:
    """Enumerate a set almost disjoint from every infinite 0/1 row that ``e_approx`` keeps confirming.

    ``b_{k+1}`` is the least ``x > b_k`` admitting a stage ``s > b_k`` at
    which every row ``e < k`` has either converged to 0 on ``x`` or is not
    guessed to be an infinite set.  When no such pair exists below the
    horizon the enumeration stops if ``b_k`` already sits in the upper half
    of the window (the horizon ran out), and otherwise raises
    :class:`SearchExhausted` naming the index of the missing element and the
    rows that blocked every candidate.
    """
    elements, stages = [b0], [0]
    while True:
        k = len(elements) - 1
        bk = elements[-1]
        hit = None
        blocking = set()
        for x in range(bk + 1, h.x_max):
            # stage from which row e shows value 0 at x (convergence is monotone)
            zero_from = []
            for e in range(k):
                t = convergence_step(family, e, x, h.s_max)
                zero_from.append(t if t is not None and value_at(family, e, x, t) == 0 else h.s_max)
            for s in range(bk + 1, h.s_max):
                bad = [e for e in range(k) if s < zero_from[e] and e_approx(e, s) != 0]
                if not bad:
                    hit = (x, s)
                    break
                blocking.update(bad)
            if hit:
                break
        if hit is None:
            if 2 * bk >= h.x_max:
                break
            raise SearchExhausted(k + 1, blocking)
        x, s = hit
        elements.append(x)
        stages.append(max(s, stages[-1]))
        if trace is not None:
            trace.emit(stages[-1], "enumerate", k=k + 1, x=x, witness=s)
    return EnumeratedSet(tuple(elements), tuple(stages))


def with_new_row(family: StagePartialMap, b: EnumeratedSet, h: Horizon) -> TableFamily:
    """Row 0 is the characteristic function of ``b``; row ``e + 1`` copies row ``e`` on the horizon."""
    members = set(b.elements)
    entries = [(0, x, x + 2, int(x in members)) for x in range(h.x_max)]
    for e in range(h.e_max):
        for x in range(h.x_max):
            t = convergence_step(family, e, x, h.s_max)
            if t is not None:
                entries.append((e + 1, x, t, value_at(family, e, x, t)))
    return TableFamily(entries, identifier=f"{family.identifier}+B")


def principal_function(b: EnumeratedSet) -> Callable[[int], int]:
    """``p(x)`` = the ``x``-th element of ``b``, counting from 0."""
    if not len(b):
        raise ValueError("principal function of an empty set")
    elements = b.elements

    def p(x: int) -> int:
        if not 0 <= x < len(elements):
            raise OutOfRange(f"x={x} beyond the {len(elements)} enumerated elements")
        return elements[x]

    return p


# -- the psi predicate on index tuples ---------------------------------------

def coinfinite_slack(k: int, h: Horizon) -> int:
    """Complement size on the horizon that counts as co-infinite for the union of ``k`` blocks."""
    return max(8, h.x_max // (k + 2))


@dataclass(frozen=True)
class PsiCheck:
    ok: bool
    clause: Optional[str] = None
    detail: str = ""

    def __bool__(self):
        return self.ok


def _infinite(graph: Sequence[int]) -> bool:
    # an element in the upper half of the window stands in for unboundedness
    half = len(graph) // 2
    return any(graph[half:])


def check_psi(indices: Sequence[int], family: StagePartialMap, h: Horizon,
              slack: Callable[[int, Horizon], int] = coinfinite_slack) -> PsiCheck:
    """Evaluate the four clauses on ``indices = (e_0, ..., e_k)``; report the first that fails.

    (a) each ``e_i`` is a total 0/1 row with an element in the upper half of the window;
    (b) the rows are pairwise disjoint;
    (c) for every ``j <= k`` the union ``D_j`` of the first ``j`` rows leaves at
        least ``slack(j)`` numbers uncovered;
    (d) for ``e < i < k``, a total row ``e`` stays below ``p(x)``, the ``x``-th
        number outside ``D_i``, for every ``x > e`` where ``p(x)`` is on the horizon.
    """
    indices = tuple(indices)
    sets = []
    for e in indices:
        g = row_graph(family, e, h)
        if g is None:
            return PsiCheck(False, "a", f"row {e} not total on the horizon")
        if any(v not in (0, 1) for v in g):
            return PsiCheck(False, "a", f"row {e} is not 0/1 valued")
        if not _infinite(g):
            return PsiCheck(False, "a", f"row {e} has no element in the upper half")
        sets.append(frozenset(x for x, v in enumerate(g) if v))
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            common = sets[i] & sets[j]
            if common:
                return PsiCheck(False, "b", f"rows {indices[i]} and {indices[j]} share {min(common)}")
    k = len(indices) - 1
    unions = [frozenset()]
    for s in sets:
        unions.append(unions[-1] | s)
    for j in range(k + 1):
        free = h.x_max - len(unions[j])
        if free < slack(j, h):
            return PsiCheck(False, "c", f"D_{j} leaves {free} < {slack(j, h)} uncovered")
    graphs = {}
    for i in range(1, k):
        outside = [x for x in range(h.x_max) if x not in unions[i]]
        for e in range(i):
            if e not in graphs:
                graphs[e] = row_graph(family, e, h)
            g = graphs[e]
            if g is None:
                continue
            for x in range(e + 1, min(h.x_max, len(outside))):
                if g[x] >= outside[x]:
                    return PsiCheck(False, "d", f"row {e} at x={x} is {g[x]} >= {outside[x]} (outside D_{i})")
    return PsiCheck(True)


def build_partition(family: StagePartialMap, h: Horizon,
                    slack: Callable[[int, Horizon], int] = coinfinite_slack) -> Tuple[int, ...]:
    """Greedy lexicographically least increasing tuple that keeps ``check_psi`` true."""
    chosen: Tuple[int, ...] = ()
    while True:
        start = chosen[-1] + 1 if chosen else 0
        for e in range(start, h.e_max):
            if check_psi(chosen + (e,), family, h, slack):
                chosen += (e,)
                break
        else:
            return chosen


# -- partition with infinite blocks exactly on a guessed set -----------------

@dataclass(frozen=True)
class PartitionSpec:
    """``block[x]`` for ``x < len(block)``; ``None`` marks a stage at which no block was confirmed."""

    a: int
    block: Tuple[Optional[int], ...]

    def __post_init__(self):
        if any(b is not None and not 0 <= b < self.a for b in self.block):
            raise ValueError("block index out of range")

    def members(self, i: int) -> List[int]:
        return [x for x, b in enumerate(self.block) if b == i]

    def to_lines(self) -> List[str]:
        return [f"{x} {'-' if b is None else b}" for x, b in enumerate(self.block)]


def bsig2_partition(a: int, b_approx: LimitApprox, h: Horizon,
                    trace: Optional[ConstructionTrace] = None) -> Tuple[PartitionSpec, TableFamily]:
    """Partition the stages into ``a`` blocks; block ``i`` grows only while ``b_approx`` confirms ``i``.

    At stage ``s`` the number ``s`` joins the next confirmed block after the
    one served last (cyclically).  The partition is computed for every stage
    below ``s_max`` and reported on ``[0, x_max)``.  The returned family has
    ``psi(i, s) = 1`` if ``s`` is in block ``i``, ``0`` once a later element
    of block ``i`` shows up, and diverges otherwise.  A value decided at stage
    ``t`` converges at step ``t + 2`` so that values stay below their steps.
    """
    if a < 1:
        raise ValueError("need at least one block")
    span = max(h.s_max, h.x_max)
    block: List[Optional[int]] = []
    last = a - 1
    for s in range(span):
        confirmed = [i for i in range(a) if b_approx(i, s)]
        if not confirmed:
            block.append(None)
            continue
        i = next((c for c in confirmed if c > last), confirmed[0])
        block.append(i)
        last = i
        if trace is not None:
            trace.emit(s, "grow", block=i, x=s)
    entries = []
    nxt = [None] * a
    for s in range(span - 1, -1, -1):
        if s < h.x_max:
            for i in range(a):
                if block[s] == i:
                    entries.append((i, s, s + 2, 1))
                elif nxt[i] is not None:
                    entries.append((i, s, nxt[i] + 2, 0))
        if block[s] is not None:
            nxt[block[s]] = s
    psi = TableFamily(entries, identifier=f"partition{a}")
    return PartitionSpec(a, tuple(block[:h.x_max])), psi
