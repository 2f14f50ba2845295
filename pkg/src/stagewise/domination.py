"""Dominating functions from a totality witness, the high-degree test, and a
finite-extension generic that dominates a list of targets while deciding
one bounded formula per stage."""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import product
from typing import Callable, List, Optional, Tuple

from .core import Bits, Converged, Horizon, StagePartialMap, eval_bounded, row_graph, value_at
from .errors import BudgetExceeded, SearchExhausted

Sigma2Witness = Callable[[int, int, int], bool]     # psi(e, s, t)
Pi2Matrix = Callable[[int, int, int], bool]         # psi(x, y, z)


def canonical_witness(family: StagePartialMap, h: Horizon) -> Sigma2Witness:
    """``psi(e, s, t)``: row ``e`` converges on every ``y < min(t, x_max)`` within the budget.

    On the horizon, row ``e`` is total iff ``psi(e, s, t)`` holds for all ``t``.
    """
    gaps = {}

    def first_gap(e):
        if e not in gaps:
            gaps[e] = next((y for y in range(h.x_max) if value_at(family, e, y, h.s_max) is None), h.x_max)
        return gaps[e]

    def psi(e, s, t):
        return min(t, h.x_max) <= first_gap(e)

    return psi


def dominate_family(family: StagePartialMap, w: Sigma2Witness, h: Horizon) -> List[int]:
    """``g(x)``: least ``t0 > x`` such that every ``e < x`` has converged on ``x`` by
    ``t0`` or, for every ``s < x``, the witness failed at some ``t < t0``."""
    first_fail = {}

    def refuted_by(e, x):
        # least t0 with (for all s < x)(exists t < t0) not psi(e, s, t); None if never below s_max
        worst = 0
        for s in range(x):
            if (e, s) not in first_fail:
                first_fail[e, s] = next((t for t in range(h.s_max) if not w(e, s, t)), None)
            t = first_fail[e, s]
            if t is None:
                return None
            worst = max(worst, t + 1)
        return worst

    g = []
    for x in range(h.x_max):
        refute = {e: refuted_by(e, x) for e in range(x)}
        for t0 in range(x + 1, h.s_max):
            if all(isinstance(eval_bounded(family, e, x, t0), Converged)
                   or (refute[e] is not None and refute[e] <= t0) for e in range(x)):
                g.append(t0)
                break
        else:
            raise BudgetExceeded(x)
    return g


def least_search(psi: Pi2Matrix, x: int, y: int, h: Horizon) -> Optional[int]:
    return next((z for z in range(h.s_max) if psi(x, y, z)), None)


def search_dominator(psi: Pi2Matrix, h: Horizon) -> List[int]:
    """``g(y) = 1 + max_x min{z : psi(x, y, z)}`` over the horizon, so ``g`` bounds every search function."""
    g = []
    for y in range(h.x_max):
        found = [least_search(psi, x, y, h) for x in range(h.x_max)]
        g.append(1 + max((z for z in found if z is not None), default=0))
    return g


def high_witness(psi: Pi2Matrix, g_dom: Callable[[int], int], x: int, h: Horizon) -> Optional[Tuple[int, int]]:
    """Least ``(y0, z0)`` with
    ``(forall y in (y0, x_max))(exists z < g(y)) psi`` and ``(forall y <= y0)(exists z < z0) psi``.

    All ``z`` searches stop at ``s_max``.
    """
    least = [least_search(psi, x, y, h) for y in range(h.x_max)]
    # tail_ok[y0]: every y > y0 has a search value below g_dom(y)
    tail_ok = [True] * h.x_max
    ok = True
    for y in range(h.x_max - 1, -1, -1):
        tail_ok[y] = ok
        ok = ok and least[y] is not None and least[y] < min(g_dom(y), h.s_max)
    head = 0
    for y0 in range(h.x_max):
        if least[y0] is None:
            return None
        head = max(head, least[y0] + 1)
        if tail_ok[y0]:
            return y0, head
    return None


def high_decide(psi: Pi2Matrix, g_dom: Callable[[int], int], x: int, h: Horizon) -> bool:
    return high_witness(psi, g_dom, x, h) is not None


# -- generic construction --------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    stage: int
    branch: str            # "forced" or "forced-negative"
    length: int
    checked: int = 0       # extensions examined for the negative certificate
    l_search: int = 0

    def line(self) -> str:
        return f"stage={self.stage} branch={self.branch} len={self.length}"


@dataclass(frozen=True)
class GenericState:
    """Current string, the target list ``g_i``, one formula and one length bound per stage."""

    sigma: Tuple[int, ...] = ()
    targets: Tuple[Callable[[int], int], ...] = ()
    formulas: Tuple[Callable[[Bits], bool], ...] = ()
    bounds: Tuple[int, ...] = ()
    k: int = 0
    history: Tuple[Tuple[int, ...], ...] = ((),)

    @classmethod
    def from_family(cls, family: StagePartialMap, h: Horizon, formulas=(), bounds=()) -> "GenericState":
        """Targets are the total rows of ``family`` in index order (0 past the horizon)."""
        targets = []
        for e in range(h.e_max):
            graph = row_graph(family, e, h)
            if graph is not None:
                targets.append(lambda x, g=graph: g[x] if x < len(g) else 0)
        return cls(targets=tuple(targets), formulas=tuple(formulas), bounds=tuple(bounds))

    def formula(self, k: int) -> Callable[[Bits], bool]:
        return self.formulas[k] if k < len(self.formulas) else (lambda sigma: True)

    def bound(self, k: int) -> int:
        return self.bounds[k] if k < len(self.bounds) else 0


def _extensions(sigma: Tuple[int, ...], max_len: int, v_max: int):
    for n in range(len(sigma), max_len + 1):
        for tail in product(range(v_max), repeat=n - len(sigma)):
            yield sigma + tail


def force_dominating_generic(st: GenericState, h: Horizon, l_search: int = 6, v_max: int = 10
                             ) -> Tuple[Tuple[int, ...], Verdict]:
    """Length-lexicographically least ``sigma_{k+1}`` meeting the four stage conditions.

    New positions ``|sigma_k| <= x < |sigma_{k+1}|`` carry values at least
    ``g_i(x)`` for every ``i < k``; values stay below ``v_max`` and lengths
    at most ``x_max``.  The formula of stage ``k`` is either met, or refuted on
    every extension of length at most ``l_search``.
    """
    k, sigma = st.k, st.sigma
    phi = st.formula(k)
    start = max(len(sigma) + 1, st.bound(k) + 1)
    for n in range(start, h.x_max + 1):
        lows = [max((st.targets[i](x) for i in range(min(k, len(st.targets)))), default=0)
                for x in range(len(sigma), n)]
        if any(lo >= v_max for lo in lows):
            break
        for tail in product(*(range(lo, v_max) for lo in lows)):
            cand = sigma + tail
            if phi(cand):
                return cand, Verdict(k, "forced", len(cand))
            checked = 0
            for tau in _extensions(cand, l_search, v_max):
                checked += 1
                if phi(tau):
                    break
            else:
                return cand, Verdict(k, "forced-negative", len(cand), checked, l_search)
    raise SearchExhausted(k, detail=f"no extension of length <= {h.x_max} with values < {v_max}")


def advance(st: GenericState, h: Horizon, l_search: int = 6, v_max: int = 10) -> Tuple[GenericState, Verdict]:
    nxt, verdict = force_dominating_generic(st, h, l_search, v_max)
    return replace(st, sigma=nxt, k=st.k + 1, history=st.history + (nxt,)), verdict


def run_generic(st: GenericState, stages: int, h: Horizon, l_search: int = 6, v_max: int = 10
                ) -> Tuple[GenericState, List[Verdict]]:
    verdicts = []
    for _ in range(stages):
        st, v = advance(st, h, l_search, v_max)
        verdicts.append(v)
    return st, verdicts
