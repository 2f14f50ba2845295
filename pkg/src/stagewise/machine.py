"""A small counter machine with an oracle tape.

Registers hold naturals; register 0 starts with the input, every other
register with 0.  Each executed instruction costs one step, and so does the
final halting step (a ``HALT`` or a jump past the end of the program).

    HALT          stop
    INC r         r += 1
    DEC r j       if r > 0: r -= 1 else jump to j
    JMP j         jump to j
    OUT           output += 1
    MOV r j       if r > 0: r -= 1, output += 1, stay on this instruction
                  else jump to j
    QRY r j       read oracle bit at position r; jump to j on 1, fall through on 0

Only ``OUT`` and ``MOV`` touch the output, at most once per step, and the
halting step never does, so a run that halts within ``s`` steps has output
``< s``.  A query past the end of the oracle blocks the run.

Programs have a numeric code so that every natural names some program:
instruction ``op + 7 * pair(a, b)`` and program ``0`` for the empty list,
``1 + pair(head, tail)`` otherwise, with ``pair`` the Cantor pairing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .core import BLOCKED, PENDING, Bits, Converged, StagePartialMap
from .errors import ConfigError

OPS = ("HALT", "INC", "DEC", "JMP", "OUT", "MOV", "QRY")
ARITY = {"HALT": 0, "INC": 1, "DEC": 2, "JMP": 1, "OUT": 0, "MOV": 2, "QRY": 2}
HALT, INC, DEC, JMP, OUT, MOV, QRY = range(7)

Instruction = Tuple[int, int, int]  # (opcode, a, b); unused operands are 0
Program = Tuple[Instruction, ...]


def pair(a: int, b: int) -> int:
    return (a + b) * (a + b + 1) // 2 + b


def unpair(n: int) -> Tuple[int, int]:
    w = (math.isqrt(8 * n + 1) - 1) // 2
    b = n - w * (w + 1) // 2
    return w - b, b


def encode_instruction(ins: Instruction) -> int:
    op, a, b = ins
    return op + len(OPS) * pair(a, b)


def decode_instruction(n: int) -> Instruction:
    op, rest = n % len(OPS), n // len(OPS)
    a, b = unpair(rest)
    arity = ARITY[OPS[op]]
    if arity == 0:
        a = b = 0
    elif arity == 1:
        b = 0
    return op, a, b


def encode_program(program: Sequence[Instruction]) -> int:
    code = 0
    for ins in reversed(program):
        code = 1 + pair(encode_instruction(ins), code)
    return code


def decode_program(code: int) -> Program:
    out = []
    while code > 0:
        head, code = unpair(code - 1)
        out.append(decode_instruction(head))
    return tuple(out)


def assemble(text: str) -> Program:
    """``"MOV 0 1; HALT"`` -> program tuple.  A bare decimal is a program code."""
    text = text.strip()
    if text.isdigit():
        return decode_program(int(text))
    program = []
    for chunk in filter(None, (c.strip() for c in text.split(";"))):
        name, *args = chunk.split()
        name = name.upper()
        if name not in ARITY:
            raise ConfigError(f"unknown instruction {name!r}")
        if len(args) != ARITY[name]:
            raise ConfigError(f"{name} takes {ARITY[name]} operands, got {chunk!r}")
        try:
            nums = [int(a) for a in args]
        except ValueError:
            raise ConfigError(f"bad operand in {chunk!r}") from None
        if any(n < 0 for n in nums):
            raise ConfigError(f"negative operand in {chunk!r}")
        nums += [0] * (2 - len(nums))
        program.append((OPS.index(name), nums[0], nums[1]))
    return tuple(program)


def disassemble(program: Sequence[Instruction]) -> str:
    parts = []
    for op, a, b in program:
        name = OPS[op]
        parts.append(" ".join([name] + [str(v) for v in (a, b)[:ARITY[name]]]))
    return "; ".join(parts) if parts else "HALT"


@dataclass(frozen=True)
class RunResult:
    halted: bool
    blocked: bool
    steps: int      # steps actually executed (the halting step or the blocking query included)
    value: int      # output register at the end of the run
    use: int        # 1 + largest oracle position read, 0 if none


class Execution:
    """A paused run that can be resumed with a larger budget."""

    __slots__ = ("program", "oracle", "regs", "pc", "out", "use", "steps", "halted", "blocked")

    def __init__(self, program: Program, x: int, oracle: Bits = ()):
        self.program = program
        self.oracle = tuple(oracle)
        self.regs = {0: x}
        self.pc = 0
        self.out = 0
        self.use = 0
        self.steps = 0
        self.halted = False
        self.blocked = False

    def result(self) -> RunResult:
        return RunResult(self.halted, self.blocked, self.steps, self.out, self.use)

    def advance(self, budget: int) -> RunResult:
        """Execute until halted, blocked, or ``budget`` steps have been used in total."""
        program, regs, oracle = self.program, self.regs, self.oracle
        n = len(program)
        while not (self.halted or self.blocked) and self.steps < budget:
            self.steps += 1
            if self.pc >= n:
                self.halted = True
                break
            op, a, b = program[self.pc]
            if op == HALT:
                self.halted = True
            elif op == MOV:
                if regs.get(a, 0):
                    regs[a] -= 1
                    self.out += 1
                else:
                    self.pc = b
            elif op == DEC:
                if regs.get(a, 0):
                    regs[a] -= 1
                    self.pc += 1
                else:
                    self.pc = b
            elif op == INC:
                regs[a] = regs.get(a, 0) + 1
                self.pc += 1
            elif op == JMP:
                self.pc = a
            elif op == OUT:
                self.out += 1
                self.pc += 1
            else:  # QRY
                pos = regs.get(a, 0)
                if pos >= len(oracle):
                    self.blocked = True
                    self.use = max(self.use, pos + 1)
                    break
                self.use = max(self.use, pos + 1)
                self.pc = b if oracle[pos] else self.pc + 1
        return self.result()


def run(program: Program, x: int, budget: int, oracle: Bits = ()) -> RunResult:
    """Execute ``program`` on input ``x`` for at most ``budget`` steps."""
    return Execution(program, x, oracle).advance(budget)


class ProgramFamily(StagePartialMap):
    """Row ``e`` is the ``e``-th program of a finite list; rows past the list never converge.

    Runs are kept per ``(e, x, oracle)`` and resumed when a larger budget is
    asked for; a smaller budget than the paused run replays from the start.
    """

    def __init__(self, programs: Iterable[Union[Program, str, int]], identifier: str = "programs"):
        progs = []
        for p in programs:
            if isinstance(p, int):
                p = decode_program(p)
            elif isinstance(p, str):
                p = assemble(p)
            progs.append(tuple(tuple(i) for i in p))
        self.programs: Tuple[Program, ...] = tuple(progs)
        self.identifier = identifier
        self._memo = {}

    @property
    def row_count(self):
        return len(self.programs)

    def run(self, e: int, x: int, s: int, oracle: Optional[Bits] = None) -> Optional[RunResult]:
        if e >= len(self.programs):
            return None
        oracle = tuple(oracle or ())
        key = (e, x, oracle)
        ex = self._memo.get(key)
        if ex is None:
            ex = self._memo[key] = Execution(self.programs[e], x, oracle)
        if ex.steps > s:
            # the kept run is already past this budget: replay from the start
            return run(self.programs[e], x, s, oracle)
        return ex.advance(s)

    def evaluate(self, e, x, s, oracle=None):
        res = self.run(e, x, s, oracle)
        if res is None:
            return PENDING, 0
        if res.blocked:
            return PENDING, BLOCKED
        if res.halted:
            return Converged(res.value), res.use
        return PENDING, res.use

    def to_lines(self) -> List[str]:
        return [disassemble(p) for p in self.programs]

    def codes(self) -> List[int]:
        return [encode_program(p) for p in self.programs]

    @classmethod
    def from_lines(cls, lines: Iterable[str], identifier: str = "programs") -> "ProgramFamily":
        progs = []
        for raw in lines:
            line = raw.split("#", 1)[0].strip()
            if line:
                progs.append(assemble(line))
        return cls(progs, identifier=identifier)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ProgramFamily":
        path = Path(path)
        return cls.from_lines(path.read_text().splitlines(), identifier=path.stem)

    def dump(self, path: Union[str, Path]) -> None:
        Path(path).write_text("\n".join(self.to_lines()) + "\n")

    def __repr__(self):
        return f"ProgramFamily({self.identifier!r}, {len(self.programs)} programs)"


OracleMachine = ProgramFamily
