import math
import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from spheremax.arith import singular_series_partial
from spheremax.errors import EmptySphereError, PreconditionError
from spheremax.lattice import table_for
from spheremax.multiplier import (
    PHI,
    TorusPoint,
    approximant_a,
    canonical,
    decompose,
    kappa,
    m_bruteforce,
    m_exact,
    m_exact_batch,
    main_term_M1,
    main_term_M2,
    psi,
    semigroup_multipliers,
    vfloor,
)
from spheremax.specfun import sphere_area

coord = st.floats(-0.5, 0.5, allow_nan=False)


def nonempty(d, lam):
    return table_for(d, lam).count(d, lam) > 0


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 40), st.data())
def test_exact_matches_bruteforce(d, lam, data):
    if not nonempty(d, lam):
        with pytest.raises(EmptySphereError):
            m_exact(d, lam, np.zeros(d))
        return
    xi = data.draw(arrays(float, d, elements=coord))
    assert abs(m_exact(d, lam, xi) - m_bruteforce(d, lam, xi)) <= 1e-10


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 10), st.integers(1, 400), st.data())
def test_symmetries(d, lam, data):
    if not nonempty(d, lam):
        return
    xi = data.draw(arrays(float, d, elements=coord))
    m = m_exact(d, lam, xi)
    assert abs(m.imag) < 1e-12 and abs(m) <= 1 + 1e-12
    assert abs(m_exact(d, lam, -xi) - m) < 1e-12
    assert abs(m_exact(d, lam, xi[::-1]) - m) < 1e-12
    assert abs(m_exact(d, lam, xi + 3.0) - m) < 1e-10
    assert abs(m_exact(d, lam, xi + 0.5) - (-1) ** lam * m) < 1e-10


def test_value_at_zero():
    for d, lam in [(5, 5), (8, 144), (12, 1024)]:
        assert abs(m_exact(d, lam, np.zeros(d)) - 1) < 1e-12


def test_batch_matches_single():
    rng = np.random.default_rng(0)
    xi = rng.random((37, 6)) - 0.5
    batch = m_exact_batch(6, 50, xi, chunk=8)
    assert np.allclose(batch, [m_exact(6, 50, x) for x in xi], atol=1e-14)


def test_torus_point():
    p = TorusPoint([0.75, -0.5, 0.2])
    assert np.allclose(p.coords, [-0.25, -0.5, 0.2])
    assert math.isclose(p.norm(), math.sqrt(0.0625 + 0.25 + 0.04))
    assert np.allclose(canonical(np.array([0.5, 1.5, -1.5])), -0.5)


def test_bump():
    assert PHI(0.1) == 1.0 and PHI(0.125) == 1.0
    assert PHI(0.25) == 0.0 and PHI(0.4) == 0.0
    s = np.linspace(-0.5, 0.5, 1001)
    vals = PHI(s)
    assert np.all((vals >= 0) & (vals <= 1))
    assert np.allclose(vals, PHI(-s))
    assert psi(np.array([0.1, -0.05])) == 1.0


def test_kappa_and_semigroup():
    assert kappa(10, 1000).value == 10.0
    xi = np.array([0.1, -0.3, 0.45])
    sv = semigroup_multipliers(3, 6, xi)
    assert math.isclose(sv.p1, sv.p_heat(2.0))
    assert sv.v_set == (1, 2)
    assert math.isclose(sv.sin_sum + sv.cos_sum, 3.0)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([(5, 49), (6, 64), (7, 100)]), st.data())
def test_decomposition_identity(pair, data):
    d, lam = pair
    big_n = math.isqrt(lam)
    xi = data.draw(arrays(float, d, elements=coord))
    n = data.draw(st.integers(1, big_n + 1))
    dec = decompose(d, lam, xi, n)
    assert dec.identity_error() <= 1e-12
    assert abs(dec.m_exact - m_exact(d, lam, xi)) < 1e-14


def test_decomposition_boundaries():
    xi = np.array([0.1, 0.2, -0.3, 0.05, 0.0])
    assert main_term_M1(5, 64, xi, 1) == 0
    assert main_term_M2(5, 64, xi, 9) == 0
    with pytest.raises(PreconditionError):
        decompose(5, 64, xi, 10)


def test_single_arc_approximant_at_zero():
    # q = 1 approximant at xi = 0 is the smooth volume term over the count
    d, lam = 8, 100
    count = table_for(d, lam).count(d, lam)
    expected = sphere_area(d) / 2 * lam ** (d / 2 - 1) / count
    assert abs(approximant_a(d, lam, np.zeros(d), 1, 1) - expected) < 1e-12


def test_residual_shrinks_with_lambda_at_zero():
    res = [abs(decompose(6, lam, np.zeros(6), math.isqrt(lam) + 1).residual) for lam in (256, 1024)]
    assert res[1] < res[0]


def test_vfloor_examples():
    assert vfloor(np.array([0.5])).tolist() == [1]
    assert vfloor(np.array([0.49, -0.5])).tolist() == [0, 0]
    assert vfloor(np.array([1.2, -2.7])).tolist() == [1, -3]


def test_bruteforce_examples():
    assert abs(m_bruteforce(2, 2, np.array([0.25, 0.25]))) < 1e-15
    xi = np.array([0.1, -0.3, 0.45])
    expected = np.sum(np.cos(2 * np.pi * xi)) / 3
    assert abs(m_bruteforce(3, 1, xi) - expected) < 1e-15
    assert abs(m_exact(4, 3, xi.tolist() + [0.2]) + m_exact(4, 3, (xi + 0.5).tolist() + [0.7])) < 1e-10


def test_semigroup_examples():
    zero = semigroup_multipliers(5, 7, np.zeros(5))
    assert zero.p1 == 1.0 and zero.v_set == ()
    half = semigroup_multipliers(5, 7, np.full(5, 0.5))
    assert half.p2 == pytest.approx(-1.0) and len(half.v_set) == 5


def test_kappa_invariant():
    for d, lam in ((5, 7), (12, 1024), (64, 3)):
        k = kappa(d, lam).value
        assert abs(k * k * d - lam) <= 1e-14 * lam


def test_explicit_bound_at_6_12():
    xi = np.random.Generator(np.random.Philox(61)).random((10_000, 6)) - 0.5
    m = m_exact_batch(6, 12, xi)
    rhs = 2 * math.pi**2 * (12 / 6) * np.sum(xi**2, axis=1)
    assert np.all(np.abs(m - 1) <= rhs * (1 + 1e-9))


@pytest.mark.parametrize("d, lam", [(5, 256), (6, 400), (8, 144)])
def test_major_sum_at_zero_is_truncated_main_term(d, lam):
    big_n = math.isqrt(lam)
    dec = decompose(d, lam, np.zeros(d), big_n + 1)
    count = table_for(d, lam).count(d, lam)
    series_n, _ = singular_series_partial(d, lam, big_n)
    volume = math.pi ** (d / 2) / math.gamma(d / 2) * lam ** (d / 2 - 1)
    assert abs(dec.major_sum - volume * series_n / count) < 1e-12
    assert abs(abs(dec.residual) - abs(count - dec.major_sum * count) / count) < 1e-12


def test_throughput():
    xi = np.random.Generator(np.random.Philox(5)).random((20_000, 10)) - 0.5
    m_exact_batch(10, 1000, xi[:10])  # compile
    start = time.perf_counter()
    m_exact_batch(10, 1000, xi)
    per_minute = len(xi) / (time.perf_counter() - start) * 60
    assert per_minute >= 1e5
