"""Eventually different functions: prime-power coding of a diagonally
non-recursive function, the two witnesses of the avoidance dichotomy, the
convergence table ``u(e, x)`` and the stagewise maximal family ``g_i``."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from sympy import prime

from .core import Horizon, StagePartialMap, convergence_step, value_at
from .errors import Overflow
from .trace import ConstructionTrace

IndexFinder = Callable[[int], Sequence[int]]


def nth_prime(j: int) -> int:
    """``p_0 = 2, p_1 = 3, ...``"""
    return prime(j + 1)


def dnr_to_ed(f: Callable[[int], int], family: StagePartialMap, index_finder: IndexFinder, h: Horizon,
              limit: Optional[int] = None) -> List[int]:
    """``g(e) = p_0^f(i_0) * ... * p_e^f(i_e)`` for ``e < x_max``, with ``(i_0, ..., i_e) = index_finder(e)``.

    ``index_finder`` must return indices whose diagonal value is the
    ``p_j``-exponent of row ``j`` at ``e``; then ``f`` avoiding every diagonal
    value makes ``g(e)`` differ from every row ``j <= e`` at ``e``.  With a
    ``limit`` a product beyond it raises :class:`Overflow` instead of growing.
    """
    g = []
    for e in range(h.x_max):
        idx = list(index_finder(e))
        if len(idx) != e + 1:
            raise ValueError(f"index_finder({e}) returned {len(idx)} indices, expected {e + 1}")
        value = 1
        for j, i in enumerate(idx):
            value *= nth_prime(j) ** f(i)
            if limit is not None and value > limit:
                raise Overflow(e, limit)
        g.append(value)
    return g


def prime_exponent(n: int, p: int) -> int:
    """Greatest ``k`` with ``p**k`` dividing ``n``; 0 for ``n = 0``, matching the coding's first case."""
    if n == 0:
        return 0
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


@dataclass(frozen=True)
class AvoidWitness:
    """``s_of_n`` is ``None`` when no stage below ``s_max`` shows ``n`` agreements."""

    s_of_n: Optional[int]
    h_values: Tuple[int, ...]

    @property
    def exhausted(self) -> bool:
        return self.s_of_n is None

    def h_fn(self, e: int) -> int:
        return self.h_values[e]


def avoid_dichotomy(f: Callable[[int], int], family: StagePartialMap, n: int, g_slow: Callable[[int], int],
                    h: Horizon) -> AvoidWitness:
    """``s(n)``: least ``t`` with at least ``n`` indices ``e < t`` whose diagonal converges by ``t`` to ``f(e)``.

    ``h(e)`` is the diagonal value at budget ``g_slow(e)``, or 0 if it has not converged.
    """
    s_of_n = None
    for t in range(h.s_max):
        hits = sum(1 for e in range(t) if value_at(family, e, e, t) == f(e))
        if hits >= n:
            s_of_n = t
            break
    h_values = []
    for e in range(h.x_max):
        v = value_at(family, e, e, g_slow(e))
        h_values.append(0 if v is None else v)
    return AvoidWitness(s_of_n, tuple(h_values))


def u_table(family: StagePartialMap, h: Horizon) -> List[Tuple[int, int, int]]:
    """Sorted ``(u, e, x)`` with ``u`` the least budget at which row ``e`` has converged on every ``y < x``.

    ``x`` runs up to and including ``x_max``; pairs whose ``u`` is not below
    ``s_max`` are left out.  The lexicographic key makes the order strict.
    """
    out = []
    for e in range(h.e_max):
        u = 0
        for x in range(h.x_max + 1):
            if x > 0:
                t = convergence_step(family, e, x - 1, h.s_max - 1)
                if t is None:
                    break
                u = max(u, t)
            out.append((u, e, x))
    out.sort()
    return out


@dataclass
class MedState:
    """Partial functions ``g_i`` as ``x -> (value, origin)``; origin is the chosen row or ``"fresh"``."""

    c: int
    g: Dict[int, Dict[int, Tuple[int, str]]] = field(default_factory=dict)
    candidates: List[Tuple[int, Tuple[int, ...]]] = field(default_factory=list)
    next_fresh: int = 0

    def value(self, i: int, x: int) -> Optional[int]:
        hit = self.g.get(i, {}).get(x)
        return None if hit is None else hit[0]

    def domain(self, i: int) -> List[int]:
        return sorted(self.g.get(i, {}))

    def to_lines(self) -> List[str]:
        return [f"{i} {x} {v} {o}" for i in sorted(self.g) for x, (v, o) in sorted(self.g[i].items())]


def med_construct(family: StagePartialMap, c: int, h: Horizon) -> Tuple[MedState, ConstructionTrace]:
    """Define ``g_e(x)`` at the stage ``u(e, x)`` for every ``e < c`` and ``x < x_max``.

    Candidates are rows ``e' < c`` converged on ``x`` at that stage whose
    value clashes with no other defined ``g_j(x)``.  The chosen candidate
    minimises ``e' + #{y < x : row e' agrees with g_e at y}`` (least ``e'`` on
    ties); with no candidate ``g_e(x)`` gets a fresh number.
    """
    if not 0 <= c <= h.e_max:
        raise ValueError(f"c={c} must lie in [0, e_max]")
    # every converged value is below s_max, so numbering fresh values from there avoids all of them
    st = MedState(c=c, next_fresh=h.s_max)
    st.g = {i: {} for i in range(c)}
    trace = ConstructionTrace()
    for u, e, x in u_table(family, h):
        if e >= c or x >= h.x_max:
            continue
        taken = {st.value(j, x) for j in range(c) if j != e} - {None}
        cands = []
        for e2 in range(c):
            v = value_at(family, e2, x, u)
            if v is not None and v not in taken:
                cands.append(e2)
        st.candidates.append((u, tuple(cands)))
        if not cands:
            v, origin = st.next_fresh, "fresh"
            st.next_fresh += 1
        else:
            def cost(e2):
                agree = sum(1 for y in range(x) if value_at(family, e2, y, u) is not None
                            and value_at(family, e2, y, u) == st.value(e, y))
                return e2 + agree, e2
            best = min(cands, key=cost)
            v, origin = value_at(family, best, x, u), str(best)
        st.g[e][x] = (v, origin)
        trace.emit(u, "define", i=e, x=x, value=v, origin=origin)
    return st, trace


def replay_pairwise_distinct(trace: ConstructionTrace) -> Optional[Tuple[int, int, int, int]]:
    """Replay ``define`` events; return ``(stage, i, j, x)`` for the first clash, ``None`` if none."""
    seen: Dict[int, Dict[int, int]] = {}
    for ev in trace.of_kind("define"):
        i, x, v = ev["i"], ev["x"], ev["value"]
        row = seen.setdefault(x, {})
        for j, w in row.items():
            if j != i and w == v:
                return ev.stage, i, j, x
        row[i] = v
    return None
