"""Hard-assert invariant suite: explicit-constant bounds and oracle equivalences.

Details contain only computed quantities (no timings), so two runs of the
suite print identical logs.
"""

from __future__ import annotations

import math
from typing import Iterator

import numpy as np

from .arith import gauss_parseval_deviation, gauss_vector, singular_series
from .lattice import (
    check_ball_sphere_bounds,
    check_slice_identity,
    enumerate_sphere,
    table_for,
)
from .maximal import GridFunction, check_ball_domination, spherical_average
from .multiplier import decompose, m_bruteforce, m_exact_batch
from .specfun import fourier_sphere, krawtchouk
from .sweep import SweepDescriptor, sweep_bounds


def _counting(quick: bool):
    lam_max = 20 if quick else 40
    table = table_for(5, lam_max)
    cases = 0
    for d in range(1, 6):
        for lam in range(lam_max + 1):
            if table.count(d, lam) != len(enumerate_sphere(d, lam)):
                return False, f"r_{d}({lam}) differs from enumeration"
            cases += 1
    return True, f"{cases} cases"


def _sandwich(quick: bool):
    lam_max = 60 if quick else 200
    table = table_for(10, lam_max)
    for d in range(5, 11):
        for lam in range(1, lam_max + 1):
            if not check_ball_sphere_bounds(table, d, lam).ok:
                return False, f"fails at d={d}, lambda={lam}"
    return True, f"5<=d<=10, 1<=lambda<={lam_max}"


def _slices(quick: bool):
    lam_max = 60 if quick else 200
    table = table_for(10, lam_max)
    for d in range(2, 11):
        for r in range(1, d):
            for lam in range(0, lam_max + 1, 7):
                if not check_slice_identity(table, d, r, lam):
                    return False, f"fails at d={d}, r={r}, lambda={lam}"
    return True, f"d<=10, lambda<={lam_max}"


def _gauss(quick: bool):
    q_max = 60 if quick else 200
    worst_bound, worst_parseval = -math.inf, 0.0
    for q in range(1, q_max + 1):
        for p in range(1, q + 1):
            if math.gcd(p, q) != 1:
                continue
            top = float(np.max(np.abs(gauss_vector(p, q))))
            for d in (1, 2, 8, 16, 32):
                worst_bound = max(worst_bound, top**d - (2 / q) ** (d / 2))
            worst_parseval = max(worst_parseval, gauss_parseval_deviation(p, q, 32))
    ok = worst_bound <= 1e-12 and worst_parseval <= 1e-10
    return ok, f"q<={q_max}: bound excess {worst_bound:.3e}, parseval {worst_parseval:.3e}"


def _series(quick: bool):
    lams = range(1, 21) if quick else range(1, 101)
    lo, hi = math.inf, -math.inf
    for d in range(16, 25):
        for lam in lams:
            v = singular_series(d, lam, 1e-10).value
            lo, hi = min(lo, v), max(hi, v)
    return 0.5 <= lo and hi <= 1.5, f"range [{lo:.12f}, {hi:.12f}]"


def _prop41(quick: bool):
    samples = 1000 if quick else 10000
    pairs = [(d, lam) for d in (5, 8, 12) for lam in (16, 144, 1024)]
    worst = 0.0
    for fam in ("prop41", "prop41_shift"):
        rows = sweep_bounds(SweepDescriptor(fam, pairs, samples, seed=2024))
        worst = max(worst, max(r.max_ratio for r in rows))
    return worst <= 1 + 1e-9, f"max ratio {worst:.12f}"


def _half_shift(quick: bool):
    rng = np.random.Generator(np.random.Philox(7))
    worst = 0.0
    for d in (4, 5, 8, 12):
        for lam in (3, 16, 144, 1024):
            xi = rng.random((200 if quick else 1000, d)) - 0.5
            a = m_exact_batch(d, lam, xi)
            b = m_exact_batch(d, lam, xi + 0.5)
            worst = max(worst, float(np.max(np.abs(b - (-1) ** lam * a))))
    return worst <= 1e-10, f"max error {worst:.3e}"


def _bruteforce(quick: bool):
    rng = np.random.Generator(np.random.Philox(11))
    worst = 0.0
    for d in range(3, 6):
        table = table_for(d, 40)
        for lam in range(1, 26 if quick else 41, 3 if quick else 1):
            if table.count(d, lam) == 0:
                continue  # empty sphere, multiplier undefined
            xi = rng.random((10, d)) - 0.5
            exact = m_exact_batch(d, lam, xi)
            for x, e in zip(xi, exact):
                worst = max(worst, abs(e - m_bruteforce(d, lam, x)))
    return worst <= 1e-10, f"max error {worst:.3e}"


def _decomposition(quick: bool):
    rng = np.random.Generator(np.random.Philox(13))
    worst, boundary = 0.0, 0.0
    for d, lam in ((5, 64), (6, 100), (8, 256)):
        big_n = math.isqrt(lam)
        for xi in rng.random((3, d)) - 0.5:
            for n in (1, 2, big_n // 2, big_n + 1):
                dec = decompose(d, lam, xi, n)
                worst = max(worst, dec.identity_error())
                if n == 1:
                    boundary = max(boundary, abs(dec.major_sum))
                if n == big_n + 1:
                    boundary = max(boundary, abs(dec.b_term))
    return worst <= 1e-12 and boundary == 0.0, f"identity {worst:.3e}, boundary {boundary:.3e}"


def _krawtchouk(quick: bool):
    n_max = 24 if quick else 64
    for n in range(n_max + 1):
        for k in range(n + 1):
            if krawtchouk(n, k, 0).value != 1:
                return False, f"K_{k}^({n})(0) != 1"
            for x in range(n + 1):
                v = krawtchouk(n, k, x).value
                if v != krawtchouk(n, x, k).value:
                    return False, f"symmetry fails at n={n}, k={k}, x={x}"
                if krawtchouk(n, k, n - x).value != (-1) ** k * v:
                    return False, f"reflection fails at n={n}, k={k}, x={x}"
    return True, f"n<={n_max}"


def _fourier_quadratic(quick: bool):
    worst = 0.0
    for r in range(2, 51, 4 if quick else 1):
        for rho in np.linspace(math.sqrt(r) / 100, math.sqrt(r), 100):
            bound = 2 * math.pi**2 * rho**2 / r
            worst = max(worst, abs(fourier_sphere(r, float(rho)) - 1) / bound)
    return worst <= 1.0, f"max ratio {worst:.12f}"


def _maximal(quick: bool):
    ones = GridFunction.constant(12, 3)
    avg = spherical_average(ones, 9, "direct").values
    if not np.all(avg == 1):
        return False, "average of the constant 1 is not 1"
    rng = np.random.Generator(np.random.Philox(17))
    values = rng.integers(0, 10, (16,) * (3 if quick else 4))
    if not check_ball_domination(values, 16):
        return False, "ball average exceeds sphere supremum"
    return True, "constants preserved, domination exact"


CHECKS = [
    ("counting_oracle", _counting),
    ("ball_sphere_sandwich", _sandwich),
    ("slice_identity", _slices),
    ("gauss_sum_bounds", _gauss),
    ("singular_series_range", _series),
    ("explicit_multiplier_bounds", _prop41),
    ("half_shift_symmetry", _half_shift),
    ("multiplier_bruteforce", _bruteforce),
    ("decomposition_identity", _decomposition),
    ("krawtchouk_symmetries", _krawtchouk),
    ("fourier_quadratic_bound", _fourier_quadratic),
    ("maximal_constants_domination", _maximal),
]


def run_checks(quick: bool = False) -> Iterator[tuple[str, bool, str]]:
    for name, fn in CHECKS:
        try:
            ok, detail = fn(quick)
        except Exception as exc:  # reported as a failed invariant, not a crash
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        yield name, bool(ok), detail
