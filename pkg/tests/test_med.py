import pytest
from hypothesis import given, settings, strategies as st
from sympy import factorint

from stagewise.core import Horizon, TableFamily, row_graph, value_at
from stagewise.errors import Overflow
from stagewise.machine import run
from stagewise.med import (avoid_dichotomy, dnr_to_ed, med_construct, nth_prime, prime_exponent,
                           replay_pairwise_distinct, u_table)
from stagewise.trace import ConstructionTrace
from stagewise import fixtures as fx


def test_coding_examples():
    h1 = Horizon(1, 1, 1)
    assert dnr_to_ed(lambda i: 1, fx.empty_family(), lambda e: [0] * (e + 1), h1) == [2]
    f = {0: 1, 1: 2}.get
    assert dnr_to_ed(f, fx.empty_family(), lambda e: list(range(e + 1)), Horizon(2, 1, 1))[1] == 18


def test_overflow_only_with_limit():
    finder = lambda e: list(range(e + 1))
    with pytest.raises(Overflow):
        dnr_to_ed(lambda i: 40, fx.empty_family(), finder, Horizon(3, 1, 1), limit=2 ** 63)
    assert dnr_to_ed(lambda i: 40, fx.empty_family(), finder, Horizon(3, 1, 1))[2] == (2 * 3 * 5) ** 40


@given(st.integers(0, 10**9), st.integers(0, 6))
def test_prime_exponent_matches_factorint(n, j):
    p = nth_prime(j)
    assert prime_exponent(n, p) == (factorint(n).get(p, 0) if n else 0)


def test_sixteen_coding_avoids_every_row():
    budget = 10_000
    m = fx.sixteen_machine()
    f = fx.diagonal_dnr(m, budget)
    finder = fx.sixteen_index_finder(m, budget)
    g = dnr_to_ed(f, m, finder, Horizon(16, 16, budget))
    # f avoids the diagonal: brute-force each gadget run directly
    for i in set(sum((finder(e) for e in range(16)), [])):
        r = run(m.programs[i], i, budget)
        assert not r.halted or f(i) != r.value
    for e, v in enumerate(g):
        for j in range(e + 1):
            assert value_at(m, j, e, budget) != v


def _sixteen_diag(budget):
    m = fx.sixteen_machine()
    diag = {e: value_at(m, e, e, budget) for e in range(budget)}
    return m, diag


def test_avoid_counts_agreements():
    m, diag = _sixteen_diag(200)
    agree = {0, 2, 5}
    f = lambda e: diag[e] if e in agree and diag[e] is not None else (diag[e] or 0) + 1
    h = Horizon(16, 16, 200)
    w = avoid_dichotomy(f, m, 2, lambda e: 200, h)
    brute = next(t for t in range(200)
                 if sum(1 for e in range(t) if run(m.programs[e], e, t).halted and run(m.programs[e], e, t).value == f(e)) >= 2)
    assert w.s_of_n == brute == 3
    assert avoid_dichotomy(f, m, 4, lambda e: 200, h).exhausted


def test_avoid_edge_cases():
    m, diag = _sixteen_diag(200)
    never = lambda e: (diag[e] or 0) + 1
    h = Horizon(16, 16, 200)
    assert avoid_dichotomy(never, m, 1, lambda e: 200, h).exhausted
    w = avoid_dichotomy(never, m, 1, lambda e: 0, h)
    assert all(w.h_fn(e) == 0 for e in range(16))


def test_u_table_fix1():
    h = Horizon(8, 4, 100)
    u = {(e, x): v for v, e, x in u_table(fx.fix1(), h)}
    assert u[1, 3] == 1
    assert u[0, 3] == 3
    assert (2, 3) not in u and (2, 2) in u


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 9), st.integers(1, 30)), max_size=30,
                unique_by=lambda t: t[:2]))
def test_u_table_is_injective_and_sorted(raw):
    h = Horizon(10, 3, 40)
    fam = TableFamily((e, x, t, t - 1) for e, x, t in raw)
    table = u_table(fam, h)
    assert table == sorted(table)
    assert len({(e, x) for _, e, x in table}) == len(table)
    for u, e, x in table:
        assert u == max([0] + [fam.step(e, y) for y in range(x)])


def test_single_total_row_is_total():
    h = Horizon(16, 1, 40)
    fam = TableFamily((0, x, x + 2, x % 3) for x in range(16))
    st_, _ = med_construct(fam, 1, h)
    assert st_.domain(0) == list(range(16))


def test_med4_run():
    h = Horizon(64, 4, 256)
    fam = fx.med4()
    st_, trace = med_construct(fam, 4, h)
    assert replay_pairwise_distinct(trace) is None
    fresh = [st_.value(i, x) for i in range(4) for x in st_.domain(i) if st_.g[i][x][1] == "fresh"]
    assert len(fresh) == len(set(fresh)) and all(v >= h.s_max for v in fresh)
    row3 = row_graph(fam, 3, h)
    assert max(sum(1 for x in st_.domain(i) if st_.value(i, x) == row3[x]) for i in range(4)) == 62


def test_replay_finds_a_clash():
    tr = ConstructionTrace()
    tr.emit(1, "define", i=0, x=2, value=5, origin="0")
    tr.emit(4, "define", i=1, x=2, value=5, origin="1")
    assert replay_pairwise_distinct(tr) == (4, 1, 0, 2)


def test_c_out_of_range():
    with pytest.raises(ValueError):
        med_construct(fx.med4(), 5, Horizon(8, 4, 40))
