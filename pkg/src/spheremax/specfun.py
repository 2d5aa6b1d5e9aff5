"""Spherical Fourier transforms, half-integer Bessel functions, Krawtchouk polynomials.

The normalized transform of the unit sphere in R^r is radial,

    F(rho) = Gamma(r/2) / (sqrt(pi) Gamma((r-1)/2)) * int_{-1}^{1} cos(2 pi rho s) (1-s^2)^((r-3)/2) ds,

equivalently Gamma(r/2) (pi rho)^(1-r/2) J_{r/2-1}(2 pi rho).  For large rho the
value is tiny while the integrand is O(1), so plain quadrature on [-1, 1]
loses every digit.  Two independent evaluations are provided:

* "bessel_formula": J_nu from its Poisson integral in the variable s = sin(theta),
  by adaptive Gauss-Legendre in double precision, escalating to mpmath at a
  working precision that covers the cancellation.
* "interval_quadrature": Gauss-Jacobi on [-1, 1] while cancellation is mild;
  otherwise the segment is deformed onto the two vertical rays from -1 and +1,
  where the integrand decays like e^{-2 pi rho t} and generalized
  Gauss-Laguerre applies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import mpmath
import numpy as np
from scipy.special import roots_genlaguerre, roots_jacobi

from .errors import AccuracyError, PreconditionError

METHODS = ("bessel_formula", "interval_quadrature")
DECAY_EXPONENT = 0.1  # c in e^{-c r}
LAGUERRE_NODES = 80
MAX_KRAWTCHOUK_N = 512


def log_gamma(x: float) -> float:
    return math.lgamma(x)


def sphere_area(r: int) -> float:
    """Surface measure of the unit sphere S^{r-1} in R^r."""
    if r < 1:
        raise PreconditionError("dimension must be positive")
    return 2 * math.exp(0.5 * r * math.log(math.pi) - math.lgamma(0.5 * r))


# ---- Gauss-Legendre, adaptive, double precision --------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def _gl(f, lo: float, hi: float) -> float:
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    return half * float(np.dot(_GL_WEIGHTS, f(mid + half * _GL_NODES)))


def adaptive_gauss_legendre(f, lo: float, hi: float, tol: float = 1e-14, depth: int = 40):
    """Integrate a vectorized f over [lo, hi]; returns (value, error estimate).

    Each panel is accepted when its 24-point rule agrees with the sum over its two
    halves to tol times the running absolute-value scale.
    """
    absf = lambda x: np.abs(f(x))  # noqa: E731
    scale = max(_gl(absf, lo, hi), 1e-300)
    total, err = [], 0.0
    stack = [(lo, hi, _gl(f, lo, hi), 0)]
    while stack:
        a, b, whole, level = stack.pop()
        m = 0.5 * (a + b)
        left, right = _gl(f, a, m), _gl(f, m, b)
        diff = abs(left + right - whole)
        if diff <= tol * scale * (b - a) / (hi - lo) or level >= depth:
            total.append(left + right)
            err += diff
        else:
            stack.append((m, b, right, level + 1))
            stack.append((a, m, left, level + 1))
    return math.fsum(total), err


# ---- Bessel path ---------------------------------------------------------------


def _cancellation_log(r: int, omega: float) -> float:
    """ln of the amplitude 2|K| Gamma(r/2)/(sqrt(pi) Gamma((r-1)/2)) of the endpoint terms of F.

    |F(rho)| is at most of this size for large omega, while the integrand on
    [-1, 1] is of size 1, so -log10 of it counts the digits lost by plain quadrature.
    """
    a = 0.5 * (r - 3)
    return (
        math.lgamma(a + 1.5)
        - 0.5 * math.log(math.pi)
        - (a + 1) * math.log(omega)
        + (a + 1) * math.log(2)
    )


def _poisson_theta_double(nu: float, u: float):
    # int_{-pi/2}^{pi/2} cos(u sin t) cos(t)^{2 nu} dt, even in t
    two_nu = 2 * nu

    def f(t):
        c = np.cos(t)
        with np.errstate(divide="ignore"):
            w = np.exp(two_nu * np.log(c)) if two_nu else np.ones_like(t)
        return np.cos(u * np.sin(t)) * w

    value, err = adaptive_gauss_legendre(f, 0.0, 0.5 * math.pi)
    scale, _ = adaptive_gauss_legendre(lambda t: np.abs(f(t)), 0.0, 0.5 * math.pi, tol=1e-8)
    return 2 * value, 2 * err, 2 * scale


def _poisson_theta_mp(nu: float, u: float, digits: int):
    with mpmath.workdps(digits):
        uu = mpmath.mpf(u)
        two_nu = 2 * mpmath.mpf(nu)
        f = lambda t: mpmath.cos(uu * mpmath.sin(t)) * mpmath.cos(t) ** two_nu  # noqa: E731
        pieces = int(u / math.pi) + 2
        pts = mpmath.linspace(0, mpmath.pi / 2, pieces)
        value, err = mpmath.quad(f, pts, method="gauss-legendre", maxdegree=8, error=True)
        return 2 * value, 2 * err


def _theta_integral(nu: float, u: float, r_hint: int | None = None) -> mpmath.mpf | float:
    value, err, scale = _poisson_theta_double(nu, u)
    if abs(value) >= 1e-5 * scale and err <= 1e-13 * scale:
        return value
    r = r_hint if r_hint is not None else int(round(2 * nu + 2))
    lost = max(0.0, -_cancellation_log(r, max(u, 1e-300)) / math.log(10))
    lost = max(lost, math.log10(scale / max(abs(value), 1e-300)))
    digits = 30 + int(lost)
    mp_value, mp_err = _poisson_theta_mp(nu, u, digits)
    if mp_err > abs(mp_value) * 1e-12 and mp_err > mpmath.mpf(10) ** (-digits + 5):
        raise AccuracyError("Poisson integral for J did not converge", float(mp_err))
    return mp_value


def bessel_j(nu: float, u: float) -> float:
    """J_nu(u) for nu > -1/2 from its Poisson integral."""
    if nu <= -0.5:
        raise PreconditionError("the Poisson integral needs nu > -1/2")
    if u == 0:
        return 1.0 if nu == 0 else 0.0
    if u < 0:
        raise PreconditionError("argument must be non-negative")
    integral = _theta_integral(nu, u)
    with mpmath.workdps(40):
        pre = mpmath.power(mpmath.mpf(u) / 2, nu) / (mpmath.gamma(nu + 0.5) * mpmath.sqrt(mpmath.pi))
        return float(pre * integral)


def _fourier_bessel(r: int, rho: float) -> float:
    nu = 0.5 * r - 1
    u = 2 * math.pi * rho
    integral = _theta_integral(nu, u, r)
    # Gamma(r/2) (pi rho)^{-nu} J_nu(2 pi rho); the (pi rho)^{nu} factors cancel
    with mpmath.workdps(40):
        pre = mpmath.gamma(mpmath.mpf(r) / 2) / (mpmath.gamma(nu + 0.5) * mpmath.sqrt(mpmath.pi))
        return float(pre * integral)


# ---- interval path ---------------------------------------------------------------


@lru_cache(maxsize=256)
def _jacobi_rule(n: int, a: float):
    x, w = roots_jacobi(n, a, a)
    return x, w / w.sum()


@lru_cache(maxsize=64)
def _laguerre_rule(n: int, a: float):
    u, w = roots_genlaguerre(n, a)
    return u, w / w.sum()


def _fourier_interval(r: int, rho: float) -> float:
    a = 0.5 * (r - 3)
    omega = 2 * math.pi * rho
    log_amp = _cancellation_log(r, omega)
    if omega < 8 or log_amp > 0:
        x, w = _jacobi_rule(64 + int(omega), a)
        return float(np.dot(w, np.cos(omega * x)))
    # I = 2 Re[i e^{-i omega} K], K = int_0^inf e^{-omega t} t^a (t + 2i)^a dt
    u, w = _laguerre_rule(LAGUERRE_NODES, a)
    s = np.dot(w, (1 - 1j * u / (2 * omega)) ** a)
    phase = complex(math.cos(0.5 * math.pi * (a + 1) - omega), math.sin(0.5 * math.pi * (a + 1) - omega))
    return math.exp(log_amp) * (phase * s).real


def fourier_sphere(r: int, rho: float, method: str = "interval_quadrature") -> float:
    """Normalized Fourier transform of the surface measure on S^{r-1} at radius rho."""
    if r < 2:
        raise PreconditionError("need r >= 2")
    if not math.isfinite(rho):
        raise PreconditionError("rho must be finite")
    rho = abs(rho)
    if rho == 0:
        return 1.0
    if method == "interval_quadrature":
        return _fourier_interval(r, rho)
    if method == "bessel_formula":
        return _fourier_bessel(r, rho)
    raise PreconditionError(f"unknown method {method!r}; expected one of {METHODS}")


def fourier_sigma(r: int, rho: float, method: str = "interval_quadrature") -> float:
    """Unnormalized transform: sphere_area(r) * fourier_sphere(r, rho)."""
    return sphere_area(r) * fourier_sphere(r, rho, method)


@dataclass(frozen=True)
class DecayReport:
    r: int
    a_exp: float
    a_pow: float
    exp_argmax: float
    pow_argmax: float


def check_fourier_decay(r: int, rho_grid: Iterable[float]) -> DecayReport:
    """Smallest constants for the exponential and power decay envelopes over a grid."""
    a_exp = a_pow = 0.0
    exp_at = pow_at = math.nan
    for rho in rho_grid:
        if rho < 0:
            raise PreconditionError("grid values must be non-negative")
        value = abs(fourier_sphere(r, rho))
        ratio = value / (math.exp(-2 * math.pi * rho / math.sqrt(r)) + math.exp(-DECAY_EXPONENT * r))
        if ratio > a_exp:
            a_exp, exp_at = ratio, rho
        if rho > 0:
            ratio = value * math.sqrt(rho / math.sqrt(r))
            if ratio > a_pow:
                a_pow, pow_at = ratio, rho
    return DecayReport(r, a_exp, a_pow, exp_at, pow_at)


# ---- Krawtchouk ----------------------------------------------------------------


@dataclass(frozen=True)
class KrawtchoukValue:
    n: int
    k: int
    x: int
    value: Fraction


@lru_cache(maxsize=None)
def _krawtchouk_numerator(n: int, k: int, x: int) -> int:
    return sum(
        (-1) ** j * math.comb(x, j) * math.comb(n - x, k - j) for j in range(min(k, x) + 1)
    )


def krawtchouk(n: int, k: int, x: int) -> KrawtchoukValue:
    if not 0 <= n <= MAX_KRAWTCHOUK_N or not 0 <= k <= n or not 0 <= x <= n:
        raise PreconditionError(f"need 0 <= k, x <= n <= {MAX_KRAWTCHOUK_N}")
    return KrawtchoukValue(n, k, x, Fraction(_krawtchouk_numerator(n, k, x), math.comb(n, k)))


@dataclass(frozen=True)
class KrawtchoukScan:
    n_max: int
    c_min: float
    argmin: tuple[int, int, int]
    zeros: int


def krawtchouk_bound_scan(n_max: int) -> KrawtchoukScan:
    """min of -(n/(k x)) ln|K_k^(n)(x)| over 1 <= x, k <= n/2, n <= n_max; zeros skipped."""
    if not 1 <= n_max <= 128:
        raise PreconditionError("n_max must lie in [1, 128]")
    c_min, argmin, zeros = math.inf, (0, 0, 0), 0
    for n in range(2, n_max + 1):
        for k in range(1, n // 2 + 1):
            for x in range(1, n // 2 + 1):
                num = _krawtchouk_numerator(n, k, x)
                if num == 0:
                    zeros += 1
                    continue
                # ln|num / C(n,k)| in floating point from exact integers
                log_abs = _log_int(abs(num)) - _log_int(math.comb(n, k))
                c = -n / (k * x) * log_abs
                if c < c_min:
                    c_min, argmin = c, (n, k, x)
    return KrawtchoukScan(n_max, c_min, argmin, zeros)


def _log_int(v: int) -> float:
    shift = max(v.bit_length() - 60, 0)
    return math.log(v >> shift) + shift * math.log(2)


def krawtchouk_table(n: int, ks: Sequence[int], xs: Sequence[int]) -> list[KrawtchoukValue]:
    return [krawtchouk(n, k, x) for k in ks for x in xs]
