"""Farey dissection, quadratic Gauss sums and the singular series.

Gauss sums are normalized: g(p/q; m) = q^-1 sum_{n mod q} e(n^2 p/q + n m/q)
and G(p/q; x) = prod_j g(p/q; x_j).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import AccuracyError, PreconditionError, SizeLimitError

MAX_FAREY_LEVEL = 10**5
MAX_SERIES_LEVEL = 200_000


@dataclass(frozen=True, order=True)
class ReducedFraction:
    p: int
    q: int

    def __post_init__(self):
        if not 1 <= self.p <= self.q or math.gcd(self.p, self.q) != 1:
            raise PreconditionError(f"{self.p}/{self.q} is not a reduced fraction in (0, 1]")

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"

    def value(self) -> Fraction:
        return Fraction(self.p, self.q)


@dataclass(frozen=True)
class FareyArc:
    """Half-open arc [lo, hi) around center; the arc of 1/1 wraps, so hi > 1."""

    center: ReducedFraction
    lo: Fraction
    hi: Fraction
    level: int

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    @property
    def beta(self) -> Fraction:
        return (self.center.value() - self.lo) * self.level * self.center.q

    @property
    def gamma(self) -> Fraction:
        return (self.hi - self.center.value()) * self.level * self.center.q

    def contains(self, alpha: Fraction) -> bool:
        a = Fraction(alpha) % 1
        if self.hi > 1:
            return a >= self.lo or a < self.hi - 1
        return self.lo <= a < self.hi


def _check_level(n: int) -> None:
    if not 1 <= n <= MAX_FAREY_LEVEL:
        raise SizeLimitError(f"Farey level {n} outside [1, {MAX_FAREY_LEVEL}]")


def _farey_with_zero(n: int) -> list[tuple[int, int]]:
    # next-term recurrence for consecutive Farey fractions, starting at 0/1
    a, b, c, d = 0, 1, 1, n
    out = [(a, b)]
    while c <= n:
        k = (n + b) // d
        a, b, c, d = c, d, k * c - a, k * d - b
        out.append((a, b))
    return out


def farey_sequence(n: int) -> list[ReducedFraction]:
    """Reduced fractions p/q in (0, 1] with q <= n, ascending."""
    _check_level(n)
    return [ReducedFraction(p, q) for p, q in _farey_with_zero(n)[1:]]


def farey_arcs(n: int) -> list[FareyArc]:
    """Arcs bounded by mediants of Farey neighbours at level n."""
    _check_level(n)
    seq = _farey_with_zero(n)
    mediants = [Fraction(a + c, b + d) for (a, b), (c, d) in zip(seq, seq[1:])]
    arcs = []
    for i, (p, q) in enumerate(seq[1:-1]):
        arcs.append(FareyArc(ReducedFraction(p, q), mediants[i], mediants[i + 1], n))
    arcs.append(FareyArc(ReducedFraction(1, 1), mediants[-1], 1 + mediants[0], n))
    return arcs


def _check_coprime(p: int, q: int) -> None:
    if q < 1 or not 1 <= p <= q or math.gcd(p, q) != 1:
        raise PreconditionError(f"need 1 <= p <= q with gcd(p, q) = 1, got {p}/{q}")


def gauss_sum_1d(p: int, q: int, m: int) -> complex:
    _check_coprime(p, q)
    phases = [2 * math.pi * ((n * n * p + n * m) % q) / q for n in range(q)]
    re = math.fsum(math.cos(t) for t in phases)
    im = math.fsum(math.sin(t) for t in phases)
    return complex(re / q, im / q)


def gauss_sum(p: int, q: int, x: Sequence[int]) -> complex:
    _check_coprime(p, q)
    out = complex(1.0)
    cache: dict[int, complex] = {}
    for xj in x:
        r = int(xj) % q
        if r not in cache:
            cache[r] = gauss_sum_1d(p, q, r)
        out *= cache[r]
    return out


def gauss_vector(p: int, q: int) -> np.ndarray:
    """g(p/q; m) for m = 0..q-1, via one inverse FFT of the quadratic chirp."""
    _check_coprime(p, q)
    n = np.arange(q, dtype=np.int64)
    chirp = np.exp(2j * np.pi * ((n * n * p) % q) / q)
    return np.fft.ifft(chirp)


def gauss_parseval_deviation(p: int, q: int, d: int) -> float:
    """|sum_{n mod q} |G(p/q; n)|^2 - 1| in d dimensions, via the product structure."""
    if d < 1:
        raise PreconditionError("d must be positive")
    return abs(_parseval_one_dim(p, q) ** d - 1.0)


@lru_cache(maxsize=4096)
def _parseval_one_dim(p: int, q: int) -> float:
    g = gauss_vector(p, q)
    return math.fsum((g.real**2 + g.imag**2).tolist())


@lru_cache(maxsize=512)
def _gauss_at_zero(q: int) -> np.ndarray:
    # g(p/q; 0) for every residue p, from the histogram of squares mod q
    n = np.arange(q, dtype=np.int64)
    hist = np.bincount((n * n) % q, minlength=q).astype(float)
    out = np.fft.ifft(hist)
    out.setflags(write=False)
    return out


def series_tail_bound(d: int, level: int) -> float:
    """Upper bound for sum_{q > level} q (2/q)^(d/2) by integral comparison."""
    h = d / 2
    return 2**h * (level ** (2 - h) / (h - 2) + level ** (1 - h))


@dataclass(frozen=True)
class SingularSeriesValue:
    d: int
    lam: int
    level: int
    value: float
    tail_bound: float
    imag: float = 0.0


def _series_level(d: int, target_tail: float) -> int:
    if series_tail_bound(d, MAX_SERIES_LEVEL) > target_tail:
        raise SizeLimitError(
            f"tail {target_tail:g} needs truncation beyond {MAX_SERIES_LEVEL} in d={d}"
        )
    lo, hi = 1, MAX_SERIES_LEVEL
    while lo < hi:
        mid = (lo + hi) // 2
        if series_tail_bound(d, mid) <= target_tail:
            hi = mid
        else:
            lo = mid + 1
    return lo


def singular_series_partial(d: int, lam: int, level: int) -> tuple[float, float]:
    """Real and imaginary parts of sum_{q <= level} sum_p e(-lam p/q) G(p/q; 0)."""
    re_terms, im_terms = [], []
    for q in range(1, level + 1):
        p = np.arange(1, q + 1, dtype=np.int64)
        p = p[np.gcd(p, q) == 1]
        g0 = _gauss_at_zero(q)[p % q]
        terms = np.exp(-2j * np.pi * ((lam * p) % q) / q) * g0**d
        re_terms.append(math.fsum(terms.real.tolist()))
        im_terms.append(math.fsum(terms.imag.tolist()))
    return math.fsum(re_terms), math.fsum(im_terms)


def singular_series(d: int, lam: int, target_tail: float = 1e-10) -> SingularSeriesValue:
    if d < 5:
        raise PreconditionError("the singular series is only evaluated for d >= 5")
    if target_tail <= 0:
        raise PreconditionError("target tail must be positive")
    if lam < 0:
        raise PreconditionError("lambda must be non-negative")
    level = _series_level(d, target_tail)
    re, im = singular_series_partial(d, lam, level)
    if abs(im) >= 1e-12:
        raise AccuracyError("singular series is not real", abs(im))
    return SingularSeriesValue(d, lam, level, re, series_tail_bound(d, level), im)


def main_term_log(d: int, lam: int, series: SingularSeriesValue) -> float:
    """ln of pi^(d/2)/Gamma(d/2) lam^(d/2-1) S_d(lam)."""
    if lam < 1:
        raise PreconditionError("lambda must be at least 1")
    if series.value <= 0:
        raise PreconditionError("singular series is not positive; truncation too coarse")
    h = d / 2
    return h * math.log(math.pi) - math.lgamma(h) + (h - 1) * math.log(lam) + math.log(series.value)


def asymptotic_ratio(count_log: float, d: int, lam: int, series: SingularSeriesValue) -> float:
    """r_d(lam) over its main term, given ln r_d(lam)."""
    return math.exp(count_log - main_term_log(d, lam, series))


def jacobi_symbol(a: int, n: int) -> int:
    if n <= 0 or n % 2 == 0:
        raise PreconditionError("Jacobi symbol needs odd positive modulus")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def gauss_zero_closed_form(p: int, q: int) -> complex:
    """g(p/q; 0) for odd q from quadratic reciprocity; used only as a cross-check."""
    _check_coprime(p, q)
    eps = 1 if q % 4 == 1 else 1j
    return jacobi_symbol(p, q) * eps / cmath.sqrt(q)
