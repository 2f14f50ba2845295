"""Named fixtures used by tests, scenarios and the ``builtin:`` scheme."""

from __future__ import annotations

from typing import Callable, Dict, List, Optional, Sequence

from .approximation import LimitApprox, PathApprox, complement_string
from .core import Bits, Horizon, StagePartialMap, TableFamily, convergence_step, value_at
from .machine import ProgramFamily
from .med import nth_prime, prime_exponent

TABLE_WIDTH = 256


def fix1(width: int = TABLE_WIDTH) -> TableFamily:
    """Row 0 identity (step x+1), row 1 constant 0 (step 1), row 2 defined only on x < 2, row 3 doubling (step 2x+1)."""
    entries = []
    for x in range(width):
        entries.append((0, x, x + 1, x))
        entries.append((1, x, 1, 0))
        if x < 2:
            entries.append((2, x, x + 1, x))
        entries.append((3, x, 2 * x + 1, 2 * x))
    return TableFamily(entries, identifier="fix1")


def empty_family() -> TableFamily:
    return TableFamily((), identifier="empty")


def om1() -> ProgramFamily:
    """Row 0 outputs the oracle bit at x; row 1 halts at once without looking."""
    return ProgramFamily(["QRY 0 2; HALT; OUT", "HALT"], identifier="om1")


def set_family(sets: Sequence[Callable[[int], bool]], width: int, identifier: str) -> TableFamily:
    """0/1 rows, row ``e`` giving membership in ``sets[e]`` at step ``x + 2``."""
    return TableFamily(((e, x, x + 2, int(bool(test(x)))) for e, test in enumerate(sets) for x in range(width)),
                       identifier=identifier)


def dyadic(rows: int = 10, width: int = 1024) -> TableFamily:
    """Row ``e`` is the set of ``x`` congruent to ``2^e`` modulo ``2^(e+1)``; the rows partition the positive numbers."""
    return set_family([lambda x, e=e: x % (2 ** (e + 1)) == 2 ** e for e in range(rows)], width, "dyadic")


def evens_odds(width: int = 1024) -> TableFamily:
    return set_family([lambda x: x % 2 == 0, lambda x: x % 2 == 1], width, "evens-odds")


def evens_evens(width: int = 256) -> TableFamily:
    return set_family([lambda x: x % 2 == 0, lambda x: x % 2 == 0], width, "evens-evens")


def med4(width: int = TABLE_WIDTH) -> TableFamily:
    """Four total rows with different speeds: identity, constant 0, a slow ``x + 1`` (step 3x+3) and doubling."""
    entries = []
    for x in range(width):
        entries.append((0, x, x + 1, x))
        entries.append((1, x, 1, 0))
        entries.append((2, x, 3 * x + 3, x + 1))
        entries.append((3, x, 2 * x + 1, 2 * x))
    return TableFamily(entries, identifier="med4")


# -- program fixtures ---------------------------------------------------------

SIXTEEN = (
    "HALT",                                 # 0
    "MOV 0 1",                              # x
    "OUT; HALT",                            # 1
    "OUT; OUT; HALT",                       # 2
    "DEC 0 4; OUT; OUT; JMP 0",             # 2x
    "OUT; MOV 0 2",                         # x + 1
    "JMP 0",                                # never halts
    "DEC 0 2; JMP 1",                       # 0 on input 0, loops otherwise
    "DEC 0 5; OUT; OUT; OUT; JMP 0",        # 3x
    "DEC 0 6; OUT; OUT; OUT; OUT; JMP 0",   # 4x
    "OUT; OUT; OUT; OUT; MOV 0 5",          # x + 4
    "OUT; OUT; OUT; OUT; OUT; OUT; OUT; OUT; HALT",  # 8
    "DEC 0 3; DEC 0 4; JMP 0; JMP 3; OUT; MOV 0 6",  # 1 on odd input, loops on even
    "DEC 0 3; OUT; JMP 0; OUT; OUT; OUT; HALT",      # x + 3
    "MOV 0 1; OUT; OUT; OUT; OUT; OUT; OUT",         # x + 6
    "DEC 0 2; MOV 0 2",                     # x - 1 on positive input, 0 on 0
)

GADGETS = 32
GADGET_BASE = len(SIXTEEN)
LOOP_ROW = GADGET_BASE + GADGETS


def sixteen_machine() -> ProgramFamily:
    """Sixteen sample programs, then ``k`` at row ``16 + k`` for ``k < 32``, then a program that never halts."""
    progs = list(SIXTEEN)
    progs += ["; ".join(["OUT"] * k + ["HALT"]) for k in range(GADGETS)]
    progs.append("JMP 0")
    return ProgramFamily(progs, identifier="sixteen")


def diagonal_dnr(family: StagePartialMap, budget: int) -> Callable[[int], int]:
    """``f(i)`` = diagonal value + 1 where it converges within ``budget``, else 0."""
    cache: Dict[int, int] = {}

    def f(i):
        if i not in cache:
            v = value_at(family, i, i, budget)
            cache[i] = 0 if v is None else v + 1
        return cache[i]

    return f


def sixteen_index_finder(family: StagePartialMap, budget: int) -> Callable[[int], List[int]]:
    """Pick for each ``j <= e`` the gadget whose diagonal is the ``p_j``-exponent of row ``j`` at ``e``."""

    def finder(e):
        out = []
        for j in range(e + 1):
            v = value_at(family, j, e, budget)
            if v is None:
                out.append(LOOP_ROW)
                continue
            k = prime_exponent(v, nth_prime(j))
            if k >= GADGETS:
                raise ValueError(f"exponent {k} of row {j} at {e} has no gadget")
            out.append(GADGET_BASE + k)
        return out

    return finder


def halts_on_bit() -> ProgramFamily:
    """Row 0 halts on input 0 exactly when oracle bit 0 is 1."""
    return ProgramFamily(["QRY 0 2; JMP 1; HALT"], identifier="halts-on-bit")


def forcing_machines() -> Dict[str, ProgramFamily]:
    """Oracle machines whose diagonal halting depends on the oracle in competing ways."""
    on1 = "QRY 0 2; JMP 1; HALT"                      # halts iff bit x is 1
    on0 = "QRY 0 2; HALT; JMP 2"                      # halts iff bit x is 0
    both = "QRY 0 2; JMP 1; INC 0; QRY 0 5; JMP 4; HALT"   # halts iff bits x and x+1 are 1
    next0 = "INC 0; QRY 0 3; HALT; JMP 3"             # halts iff bit x+1 is 0
    plus2 = "INC 0; INC 0; QRY 0 4; JMP 3; HALT"      # halts iff bit x+2 is 1
    return {
        "halts-on-bit": halts_on_bit(),
        "mixed": ProgramFamily([on1, on0, both, next0], identifier="mixed"),
        "clash": ProgramFamily([next0, on1, plus2, on0, both], identifier="clash"),
        "blind": ProgramFamily(["HALT", "JMP 0", "MOV 0 1", on1], identifier="blind"),
    }


# -- approximations -----------------------------------------------------------

def la1() -> LimitApprox:
    """``A_s(0) = 1`` for ``s < 3`` and 0 afterwards; every other ``x`` is constantly 0."""
    return LimitApprox(lambda x, s: int(x == 0 and s < 3), identifier="la1")


def alternating() -> LimitApprox:
    return LimitApprox(lambda x, s: s % 2, identifier="alternating")


def stabilizing_set(members: Sequence[int], settle: int, before: int = 1) -> LimitApprox:
    """Guesses ``before`` for every index until ``settle``, then membership in ``members``."""
    final = frozenset(members)
    return LimitApprox(lambda i, s: before if s < settle else int(i in final), identifier=f"settle{settle}")


def completion_step(psi: StagePartialMap, e: int, h: Horizon) -> Optional[int]:
    """Least budget at which row ``e`` is defined on every ``x < x_max``, or ``None``."""
    worst = 0
    for x in range(h.x_max):
        t = convergence_step(psi, e, x, h.s_max)
        if t is None:
            return None
        worst = max(worst, t)
    return worst


def settling_path(psi: StagePartialMap, members: Sequence[int], h: Horizon, settle: int,
                  length: Optional[int] = None) -> PathApprox:
    """Path approximation to the complement string of ``members`` that settles at stage ``settle``.

    Before settling it cycles through prefixes of the final string, the empty
    string, and noise that flips positions whose rows cannot be completed
    before ``settle`` (so no spurious total row appears).
    """
    length = h.e_max if length is None else length
    alpha = complement_string(set(members), length)
    flippable = []
    for e in range(length):
        done = completion_step(psi, e, h)
        if done is None or done >= settle:
            flippable.append(e)
    noises: List[Bits] = []
    for e in flippable:
        noises.append(alpha[:e] + (1 - alpha[e],) + alpha[e + 1:])
    if len(flippable) > 1:
        a, b = flippable[0], flippable[-1]
        flipped = list(alpha)
        flipped[a], flipped[b] = 1 - flipped[a], 1 - flipped[b]
        noises.append(tuple(flipped))

    def fn(s):
        if s >= settle:
            return alpha
        phase = s % 3
        if phase == 0:
            return alpha[:s % (length + 1)]
        if phase == 1 and noises:
            return noises[(s // 3) % len(noises)]
        return ()

    return PathApprox(fn, identifier=f"path-{''.join(map(str, alpha))}-s{settle}")


# -- predicates for the high test ----------------------------------------------

PI2_PREDICATES: Dict[str, Callable[[int, int, int], bool]] = {
    "always": lambda x, y, z: z == x + y,
    "mod3-blocked": lambda x, y, z: x % 3 != 0 or (y < 5 and z == y),
    "square-search": lambda x, y, z: z * z >= x * y,
    "never-large": lambda x, y, z: y < x and z >= y,
}
