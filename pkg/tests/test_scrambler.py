from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from stagewise.approximation import PathApprox, complement_string
from stagewise.core import Horizon, row_graph, value_at
from stagewise.errors import EmptySequence, PoolExhausted
from stagewise.scrambler import (Mode, decode_indices, dependent_tree, encode_indices, greedy_indices,
                                 leftmost_branch, right_of, scramble, scramble_dependent)
from stagewise import fixtures as fx

H = Horizon(8, 4, 120)


def expected(psi, members, mode, h):
    keep = [e for e in range(h.e_max) if (e in members) == (mode is Mode.PI2)]
    return {g for g in (row_graph(psi, e, h) for e in keep) if g is not None}


def test_decode_examples():
    assert decode_indices((1, 1, 0, 1, 0)) == (2, 1)
    assert decode_indices((0, 0)) == (0, 0)
    assert decode_indices((1, 1, 1)) == ()


@given(st.lists(st.integers(0, 6), max_size=6))
def test_encode_then_decode(t):
    assert decode_indices(encode_indices(t)) == tuple(t)


@given(st.lists(st.integers(0, 1), max_size=8), st.lists(st.integers(0, 1), max_size=8))
def test_right_of_is_antisymmetric_and_ignores_prefixes(a, b):
    a, b = tuple(a), tuple(b)
    assert not (right_of(a, b) and right_of(b, a))
    if a[:len(b)] == b or b[:len(a)] == a:
        assert not right_of(a, b)


def test_empty_b_pi2_gives_no_total_row():
    psi = fx.fix1()
    res = scramble(psi, PathApprox.constant(complement_string((), 4)), Mode.PI2, H)
    assert res.total_rows(H) == []


def test_fix1_b03_both_modes():
    psi = fx.fix1()
    p = fx.settling_path(psi, (0, 3), H, 20)
    assert scramble(psi, p, Mode.PI2, H).total_graphs(H) == {row_graph(psi, 0, H), row_graph(psi, 3, H)}
    assert scramble(psi, p, Mode.SIGMA2, H).total_graphs(H) == {row_graph(psi, 1, H)}


@settings(max_examples=30, deadline=None)
@given(st.frozensets(st.integers(0, 3)), st.integers(10, 60), st.sampled_from([Mode.PI2, Mode.SIGMA2]),
       st.sampled_from(["fix1", "med4"]))
def test_total_graphs_match_selected_rows(members, settle, mode, name):
    psi = {"fix1": fx.fix1, "med4": fx.med4}[name]()
    res = scramble(psi, fx.settling_path(psi, members, H, settle), mode, H)
    assert res.total_graphs(H) == expected(psi, members, mode, H)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.lists(st.integers(0, 1), max_size=4), min_size=1, max_size=30),
       st.sampled_from([Mode.PI2, Mode.SIGMA2]))
def test_every_theta_value_copies_its_row(stages, mode):
    psi = fx.fix1()
    res = scramble(psi, PathApprox.from_stages(stages), mode, H)
    for r, x, t, v in res.theta.entries():
        assert value_at(psi, res.row_index[r], x, t) == v
        assert v < t


def test_rows_are_never_reissued():
    psi = fx.fix1()
    res = scramble(psi, fx.settling_path(psi, (0, 2), H, 40), Mode.PI2, H)
    assigned = [ev["row"] for ev in res.trace.of_kind("assign")]
    assert len(assigned) == len(set(assigned))
    assert all(r % 2 == 0 for r in assigned)


def test_pool_exhaustion():
    psi = fx.fix1()
    with pytest.raises(PoolExhausted):
        scramble(psi, fx.settling_path(psi, (0, 1, 2, 3), H, 40), Mode.PI2, H, capacity=2)


def _increasing_total(psi, h):
    totals = {e for e in range(h.e_max) if row_graph(psi, e, h) is not None}
    return lambda t: all(a < b for a, b in zip(t, t[1:])) and all(e in totals for e in t)


def test_dependent_greedy_chosen():
    h = Horizon(8, 4, 100)
    psi = fx.fix1()
    phi = _increasing_total(psi, h)
    res = scramble_dependent(psi, phi, h)
    assert res.chosen == (0, 1, 3)
    # brute force: the longest lexicographically least increasing tuple of total indices below 4
    tuples = [t for n in range(5) for t in product(range(4), repeat=n) if phi(t)]
    assert max(tuples, key=lambda t: (len(t), [-e for e in t])) == (0, 1, 3)
    assert res.total_graphs(h) == {row_graph(psi, e, h) for e in (0, 1, 3)}


def test_dependent_edge_cases():
    h = Horizon(8, 4, 100)
    psi = fx.fix1()
    with pytest.raises(EmptySequence):
        scramble_dependent(psi, lambda t: False, h)
    res = scramble_dependent(psi, lambda t: t == (2,), h)
    assert res.chosen == (2,)
    assert res.total_rows(h) == []


def test_tree_is_prefix_closed_on_codes_and_contains_branch():
    h = Horizon(8, 4, 100)
    phi = _increasing_total(fx.fix1(), h)
    tree = dependent_tree(phi, h, 8)
    branch = leftmost_branch(phi, h)
    assert decode_indices(branch) == greedy_indices(phi, h)
    for sigma in tree:
        t = decode_indices(sigma)
        assert phi(t)
        assert all(phi(t[:k]) for k in range(len(t)))
    for n in range(len(branch) + 1):
        if n and branch[n - 1] == 0:
            assert branch[:n] in tree
