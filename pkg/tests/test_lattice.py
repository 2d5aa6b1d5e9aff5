import io
import math

import pytest
from hypothesis import given, settings, strategies as st

from spheremax.errors import CapacityError, PreconditionError, SizeLimitError, TableRangeError
from spheremax.lattice import (
    ball_count,
    build_theta_table,
    check_ball_sphere_bounds,
    check_slice_identity,
    enumerate_sphere,
    iter_sphere,
    profile_stats,
    sphere_count,
    table_for,
    write_row_csv,
)

from conftest import brute_sphere


@pytest.mark.parametrize(
    "d, lam, expected",
    [(4, 2, 24), (5, 4, 90), (5, 5, 112), (3, 9, 30), (2, 5, 8), (6, 12, 2080), (3, 7, 0), (1, 0, 1)],
)
def test_known_counts(d, lam, expected):
    assert sphere_count(table_for(d, lam), d, lam).value == expected


def test_ball_count_known():
    assert ball_count(table_for(4, 4), 4, 4).value == 89


def test_eight_squares_divisor_formula():
    # r_8(n) = 16 sum_{d | n} (-1)^{n+d} d^3
    n = 4**9
    expected = 16 * sum((-1) ** (n + k) * k**3 for k in range(1, n + 1) if n % k == 0)
    assert sphere_count(table_for(8, n), 8, n).value == expected


def test_four_squares_jacobi():
    # r_4(n) = 8 sum of divisors not divisible by 4
    table = table_for(4, 300)
    for n in range(1, 301):
        assert table.count(4, n) == 8 * sum(k for k in range(1, n + 1) if n % k == 0 and k % 4)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(0, 30))
def test_count_matches_bruteforce(d, lam):
    assert sphere_count(table_for(d, lam), d, lam).value == len(brute_sphere(d, lam))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 40))
def test_enumeration_is_sorted_valid_and_complete(d, lam):
    pts = enumerate_sphere(d, lam)
    assert pts == sorted(set(pts))
    assert all(sum(v * v for v in p) == lam for p in pts)
    assert len(pts) == table_for(d, lam).count(d, lam)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 12), st.integers(0, 120), st.data())
def test_slice_identity(d, lam, data):
    r = data.draw(st.integers(1, d - 1))
    assert check_slice_identity(table_for(d, lam), d, r, lam)


@settings(max_examples=40, deadline=None)
@given(st.integers(5, 12), st.integers(1, 150))
def test_sandwich(d, lam):
    rep = check_ball_sphere_bounds(table_for(d, lam), d, lam)
    assert rep.ok and rep.lhs <= rep.mid <= rep.rhs


def test_ball_is_prefix_sum():
    table = table_for(6, 50)
    row = table.row(6)
    for lam in range(51):
        assert ball_count(table, 6, lam).value == sum(row[: lam + 1])


def test_table_build_consistent_with_cache():
    a = build_theta_table(7, 64)
    b = table_for(7, 64)
    for d in range(1, 8):
        assert a.row(d)[:65] == b.row(d)[:65]


def test_log_value():
    c = sphere_count(table_for(16, 1000), 16, 1000)
    assert math.isclose(c.log_value, math.log(c.value), rel_tol=1e-14)


def test_preconditions():
    with pytest.raises(PreconditionError):
        check_ball_sphere_bounds(table_for(4, 4), 4, 4)
    with pytest.raises(SizeLimitError):
        table_for(65, 4)
    with pytest.raises(TableRangeError):
        build_theta_table(3, 10).count(4, 2)
    with pytest.raises(CapacityError):
        enumerate_sphere(8, 64, cap=10)


def test_iter_sphere_lexicographic():
    assert list(iter_sphere(2, 5)) == [(-2, -1), (-2, 1), (-1, -2), (-1, 2), (1, -2), (1, 2), (2, -1), (2, 1)]


def test_profile_matches_enumeration():
    d, lam = 6, 9
    hist = profile_stats(d, lam, (1.0, 2.0))
    pts = enumerate_sphere(d, lam)
    assert hist.total() == len(pts) == 876
    for k, c in hist.by_pm1.items():
        assert c == sum(1 for p in pts if sum(abs(v) == 1 for v in p) == k)
    for m, c in hist.by_large[1].items():
        assert c == sum(1 for p in pts if sum(abs(v) >= 2 for v in p) == m)


@pytest.mark.parametrize("d, lam, expected", [(4, 4, 16), (6, 6, 64)])
def test_all_pm1_points(d, lam, expected):
    assert profile_stats(d, lam).by_pm1[d] == expected


def test_row_csv_format():
    buf = io.StringIO()
    write_row_csv(table_for(2, 5), 2, buf, 5)
    text = buf.getvalue()
    assert text.startswith("d,lambda,r_d_lambda\r\n2,0,1\r\n2,1,4\r\n")
    assert text.endswith("2,5,8\r\n")
