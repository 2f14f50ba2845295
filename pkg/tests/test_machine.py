import pytest
from hypothesis import given, strategies as st

from stagewise.core import BLOCKED, Converged, PENDING, Horizon, eval_bounded, oracle_eval
from stagewise.errors import ConfigError
from stagewise.machine import (OPS, ProgramFamily, assemble, decode_program, disassemble, encode_program, pair, run,
                               unpair)
from stagewise import fixtures as fx

instruction = st.tuples(st.integers(0, len(OPS) - 1), st.integers(0, 5), st.integers(0, 5))
program = st.lists(instruction, max_size=6).map(lambda p: assemble(disassemble(p)) if p else ())


@given(st.integers(0, 10**6))
def test_pairing_inverts(n):
    assert pair(*unpair(n)) == n


@given(program)
def test_program_codes_roundtrip(p):
    assert decode_program(encode_program(p)) == p


@given(program, st.integers(0, 6), st.integers(0, 80), st.integers(0, 80),
       st.lists(st.integers(0, 1), max_size=6))
def test_runs_are_monotone_and_value_below_steps(p, x, s, ds, oracle):
    fam = ProgramFamily([p])
    a, _ = oracle_eval(fam, oracle, 0, x, s)
    b, _ = oracle_eval(fam, oracle, 0, x, s + ds)
    if isinstance(a, Converged):
        assert b == a
        assert a.value < s


@given(program, st.integers(0, 6), st.lists(st.integers(0, 1), max_size=6), st.lists(st.integers(0, 1), max_size=4))
def test_oracle_extension_preserves_short_use(p, x, oracle, more):
    r = run(p, x, 60, tuple(oracle))
    if r.halted and r.use <= len(oracle):
        again = run(p, x, 60, tuple(oracle) + tuple(more))
        assert (again.halted, again.value, again.steps) == (True, r.value, r.steps)


def test_resumed_runs_match_fresh_runs():
    fam = fx.sixteen_machine()
    for e in range(16):
        for x in range(6):
            for s in (3, 40, 7, 200, 1):
                fresh = run(fam.programs[e], x, s)
                got = fam.run(e, x, s)
                assert (got.halted, got.value, got.steps) == (fresh.halted, fresh.value, fresh.steps)


SIXTEEN_VALUES = {0: lambda x: 0, 1: lambda x: x, 2: lambda x: 1, 3: lambda x: 2, 4: lambda x: 2 * x,
                  5: lambda x: x + 1, 8: lambda x: 3 * x, 9: lambda x: 4 * x, 10: lambda x: x + 4, 11: lambda x: 8,
                  13: lambda x: x + 3, 14: lambda x: x + 6, 15: lambda x: max(x - 1, 0)}


@pytest.mark.parametrize("e", sorted(SIXTEEN_VALUES))
def test_sixteen_programs_compute_their_functions(e):
    fam = fx.sixteen_machine()
    for x in range(12):
        assert eval_bounded(fam, e, x, 10_000) == Converged(SIXTEEN_VALUES[e](x))


def test_sixteen_partial_rows():
    fam = fx.sixteen_machine()
    assert all(eval_bounded(fam, 6, x, 5000) is PENDING for x in range(6))
    assert eval_bounded(fam, 7, 0, 5000) == Converged(0)
    assert eval_bounded(fam, 7, 3, 5000) is PENDING
    assert [eval_bounded(fam, 12, x, 5000) for x in range(4)] == [PENDING, Converged(1), PENDING, Converged(1)]


def test_gadgets_output_their_index():
    fam = fx.sixteen_machine()
    for k in range(fx.GADGETS):
        assert eval_bounded(fam, fx.GADGET_BASE + k, 0, 10_000) == Converged(k)
    assert eval_bounded(fam, fx.LOOP_ROW, 0, 10_000) is PENDING


def test_query_past_oracle_blocks_and_reports_use():
    fam = fx.halts_on_bit()
    assert oracle_eval(fam, (), 0, 0, 10) == (PENDING, BLOCKED)
    assert oracle_eval(fx.om1(), (1,), 0, 1, 10) == (PENDING, BLOCKED)
    assert run(fam.programs[0], 0, 10).use == 1
    assert oracle_eval(fam, (1,), 0, 0, 10)[0] == Converged(0)
    assert oracle_eval(fam, (0,), 0, 0, 50)[0] is PENDING


def test_halting_costs_a_step():
    p = assemble("HALT")
    assert run(p, 0, 0).halted is False
    assert run(p, 0, 1).halted is True
    assert run(assemble("OUT; OUT; HALT"), 0, 3).value == 2


@pytest.mark.parametrize("text", ["FOO 1", "INC", "INC 1 2", "JMP x", "DEC -1 0"])
def test_assembler_rejects(text):
    with pytest.raises(ConfigError):
        assemble(text)


def test_rows_past_the_list_diverge():
    fam = fx.om1()
    assert fam.row_count == 2
    assert eval_bounded(fam, 5, 0, 1000) is PENDING


def test_program_family_text_roundtrip(tmp_path):
    fam = fx.sixteen_machine()
    path = tmp_path / "p.txt"
    fam.dump(path)
    again = ProgramFamily.load(path)
    h = Horizon(8, 16, 2000)
    for e in range(16):
        for x in range(h.x_max):
            assert eval_bounded(again, e, x, h.s_max) == eval_bounded(fam, e, x, h.s_max)
