import pytest
from hypothesis import given, strategies as st

from stagewise.approximation import (LimitApprox, PathApprox, complement_string, recurrent_leftmost, rt_strings,
                                     settling_time)
from stagewise.core import Horizon
from stagewise.errors import ConfigError, NotSettled
from stagewise import fixtures as fx

H = Horizon(8, 4, 50)


def test_rt_strings_examples():
    assert rt_strings(lambda b: b == 1, 2) == {(), (1,), (1, 0), (1, 1)}
    assert rt_strings(lambda b: False, 2) == {(), (1,), (1, 1)}
    assert rt_strings(lambda b: True, 1) == {(), (0,), (1,)}


@given(st.frozensets(st.integers(0, 7)), st.integers(0, 7))
def test_rt_strings_prefix_closed_and_contain_complement(members, n):
    rt = rt_strings(lambda b: b in members, n)
    assert all(sigma[:-1] in rt for sigma in rt if sigma)
    assert complement_string(members, n) in rt
    # brute force: every string of length <= n with 0s only on members
    assert len(rt) == sum(2 ** sum(1 for b in range(k) if b in members) for k in range(n + 1))


def test_settling_time_examples():
    assert settling_time(fx.la1(), 0, H) == 3
    assert settling_time(LimitApprox.constant(0), 5, H) == 0
    with pytest.raises(NotSettled):
        settling_time(fx.alternating(), 0, H)
    with pytest.raises(ValueError):
        settling_time(fx.la1(), 8, H)


@given(st.frozensets(st.integers(0, 7)), st.integers(0, 40), st.integers(0, 7))
def test_settling_time_matches_last_change(final, settle, x):
    a = LimitApprox.settling(final, settle)
    t = settling_time(a, x, H)
    assert all(a(x, s) == a(x, H.s_max - 1) for s in range(t, H.s_max))
    assert t == 0 or a(x, t - 1) != a(x, t)


def test_recurrent_leftmost_examples():
    alt = PathApprox(lambda s: (s % 2,))
    assert recurrent_leftmost(alt, range(6), 1) == (0,)
    assert recurrent_leftmost(PathApprox.constant((1, 0)), (0, 2), 2) == (1, 0)
    distinct = PathApprox(lambda s: tuple(int(c) for c in format(s, "08b")))
    assert recurrent_leftmost(distinct, range(20), 8) == ()


def test_recurrence_uses_exact_length():
    p = PathApprox.from_stages([(0, 1), (0, 1), (1,), (1,)])
    assert recurrent_leftmost(p, range(4), 1) == (1,)
    assert recurrent_leftmost(p, range(4), 2) == (0, 1)


def test_limit_approx_text_roundtrip(tmp_path):
    a = fx.la1()
    path = tmp_path / "a.txt"
    path.write_text("\n".join(a.to_lines(2, 8)) + "\n")
    b = LimitApprox.load(path)
    assert all(a(x, s) == b(x, s) for x in range(2) for s in range(8))
    with pytest.raises(ConfigError):
        b(5, 0)


def test_path_text_roundtrip_repeats_last_line(tmp_path):
    path = tmp_path / "p.txt"
    path.write_text("0\n1 0\n2 01\n")
    p = PathApprox.load(path)
    assert [p(s) for s in range(4)] == [(), (0,), (0, 1), (0, 1)]


def test_bad_approximation_files():
    with pytest.raises(ConfigError):
        PathApprox.from_lines([])
    with pytest.raises(ConfigError):
        PathApprox.from_lines(["x 01"])
    with pytest.raises(ConfigError):
        LimitApprox.from_lines(["0 0 2"])
    with pytest.raises(ConfigError):
        LimitApprox.from_lines(["0 0"])
