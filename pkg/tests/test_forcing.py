from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from stagewise.core import Converged, Horizon, TableFamily, oracle_eval
from stagewise.errors import SearchExhausted
from stagewise.forcing import (BiBuild, ForcingBounds, ForcingSequence, harrington_extend, jump_count, ndf_to_bi,
                               run_forcing)
from stagewise import fixtures as fx


def test_scan_with_nothing_converging():
    b = ndf_to_bi(fx.empty_family(), (), lambda y: 50, Horizon(20, 1, 1))
    assert b.bits == (0,) * 20 and b.treated == (None,) * 20


def test_scan_on_evens_row():
    evens = TableFamily((0, x, 2, int(x % 2 == 0)) for x in range(30))
    b = ndf_to_bi(evens, (), lambda y: 10, Horizon(12, 1, 1))
    # row 0 says 1 at x=0 while B(0)=0, so it is inconsistent at every later y
    assert b.bits == (0,) * 12
    assert b.treated == (None,) * 12


def test_scan_treats_the_least_consistent_row():
    fam = fx.sixteen_machine()
    b = ndf_to_bi(fam, (), lambda y: 2000, Horizon(6, 1, 1))
    # y=1: row 0 (constant 0) converges and agrees with B(0)=0, so B(1) = 1
    assert b.bits[:2] == (0, 1) and b.treated[:2] == (None, 0)
    assert b.to_lines()[1] == "1 1 0"


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(0, 1), max_size=10), st.integers(0, 40), st.integers(1, 4))
def test_treatment_rule_on_oracle_machines(oracle, base, slope):
    fam = fx.om1()
    f = lambda y: base + slope * y
    b = ndf_to_bi(fam, oracle, f, Horizon(12, 1, 1))
    for y, (bit, e) in enumerate(zip(b.bits, b.treated)):
        if e is not None:
            state, _ = oracle_eval(fam, oracle, e, y, f(y))
            assert isinstance(state, Converged) and state.value != bit
    assert ndf_to_bi(fam, oracle, f, Horizon(12, 1, 1)) == b


def test_odd_stage_examples():
    fs = ForcingSequence(targets=(lambda x: 1,), c=(0,))
    sigma, n = harrington_extend(fs, 1, fx.halts_on_bit(), ForcingBounds(4, 20))
    assert (sigma, n) == ((0,), 0)
    # a string already disagreeing gets one more 0
    fs = ForcingSequence(targets=(lambda x: 1, lambda x: 1), c=(0, 0), strings=((), (0, 1), (0, 1, 1)),
                         counts=(None, 0, 0))
    assert harrington_extend(fs, 3, fx.halts_on_bit(), ForcingBounds(6, 20))[0] == (0, 1, 1, 0)


def test_even_stage_examples():
    m = fx.halts_on_bit()
    fs = ForcingSequence(targets=(lambda x: 1,), c=(1,), strings=((), (0,)), counts=(None, 0))
    start_at_empty = ForcingSequence(targets=fs.targets, c=(1,), strings=((), ()), counts=(None, 0))
    assert harrington_extend(start_at_empty, 2, m, ForcingBounds(2, 20)) == ((1,), 1)
    # brute force over all extensions of length <= 2
    best = max(jump_count(m, t, 1, 20) for n in (1, 2) for t in product((0, 1), repeat=n))
    assert best == 1
    # with bit 0 already 0, nothing halts
    assert harrington_extend(fs, 2, m, ForcingBounds(2, 20)) == ((0, 0), 0)
    zero = ForcingSequence(targets=fs.targets, c=(0,), strings=((), (1, 0)), counts=(None, 0))
    assert harrington_extend(zero, 2, m, ForcingBounds(5, 20)) == ((1, 0, 0), 0)


def test_even_stage_without_room():
    fs = ForcingSequence(targets=(lambda x: 1,), c=(1,), strings=((), (0, 0)), counts=(None, 0))
    with pytest.raises(SearchExhausted):
        harrington_extend(fs, 2, fx.halts_on_bit(), ForcingBounds(2, 20))


def test_stage_must_follow_sequence():
    with pytest.raises(ValueError):
        harrington_extend(ForcingSequence(targets=(lambda x: 0,)), 2, fx.halts_on_bit(), ForcingBounds(3, 10))
    with pytest.raises(ValueError):
        harrington_extend(ForcingSequence(), 1, fx.halts_on_bit(), ForcingBounds(3, 10))


@pytest.mark.parametrize("name", sorted(fx.forcing_machines()))
def test_sequence_strictly_extends_and_diagonalizes(name):
    m = fx.forcing_machines()[name]
    targets = (lambda x: x % 2, lambda x: 1, lambda x: 0)
    fs = ForcingSequence(targets=targets, c=(1, 2, m.row_count))
    bounds = ForcingBounds(12, 60)
    fs = run_forcing(fs, 6, m, bounds)
    for a, b in zip(fs.strings, fs.strings[1:]):
        assert len(b) > len(a) and b[:len(a)] == a
    for stage in (1, 3, 5):
        sigma, target = fs.strings[stage], targets[(stage - 1) // 2]
        assert any(bit != target(x) for x, bit in enumerate(sigma))
    assert len(fs.to_lines()) == 7 and fs.to_lines()[0].startswith("0 start")


def test_bi_build_text():
    b = BiBuild((0, 1), (None, 0))
    assert b.text() == "0 0\n1 1 0\n"
