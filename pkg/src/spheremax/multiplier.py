"""The normalized exponential sum over lattice spheres and its circle-method pieces.

m(xi) = r_d(lam)^-1 sum_{|x|^2 = lam} e(x . xi).  Its generating function in the
mass variable factors over coordinates, so m is the coefficient at lam of a
product of d square-supported cosine series; that coefficient is computed for
a whole batch of points at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from math import isqrt
from typing import Sequence

import numba
import numpy as np

from .arith import _check_coprime
from .errors import EmptySphereError, PreconditionError, SizeLimitError
from .lattice import enumerate_sphere, table_for
from .specfun import fourier_sphere, sphere_area

MAX_LAMBDA = 2**20
BUMP_PROFILE = "exp-partition-v1"


# ---- torus points ---------------------------------------------------------------


def vfloor(x) -> np.ndarray:
    """The integer vector z with x - z in [-1/2, 1/2)^d."""
    return np.floor(np.asarray(x, dtype=float) + 0.5).astype(np.int64)


def canonical(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = x - np.floor(x + 0.5)
    # x + 0.5 can round up to the next integer for x just below a half-integer
    return np.where(out >= 0.5, out - 1.0, out)


@dataclass(frozen=True, eq=False)
class TorusPoint:
    coords: np.ndarray

    def __init__(self, coords):
        c = canonical(np.atleast_1d(coords))
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @property
    def d(self) -> int:
        return self.coords.size

    def norm(self) -> float:
        return math.sqrt(math.fsum(self.coords**2))

    def shifted(self) -> "TorusPoint":
        return TorusPoint(self.coords + 0.5)

    def shift_norm(self) -> float:
        return self.shifted().norm()

    def __repr__(self) -> str:
        return f"TorusPoint({self.coords.tolist()})"


def batch_norms(xi: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(canonical(xi) ** 2, axis=-1))


# ---- bump functions -------------------------------------------------------------


def _h(s):
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)


@dataclass(frozen=True)
class BumpFunction:
    """Smooth even bump: 1 on [-inner, inner], 0 outside (-outer, outer)."""

    inner: float = 0.125
    outer: float = 0.25
    profile: str = BUMP_PROFILE

    def __call__(self, s):
        a = np.abs(np.asarray(s, dtype=float))
        up, down = _h(self.outer - a), _h(a - self.inner)
        return up / (up + down)

    def product(self, xi) -> float:
        """psi(xi) = prod_j phi(xi_j)."""
        return float(np.prod(self(xi)))


PHI = BumpFunction()
PHI_WIDE = BumpFunction(0.25, 0.5)


def psi(xi) -> float:
    return PHI.product(xi)


# ---- kappa and the exact multiplier -------------------------------------------


@dataclass(frozen=True)
class Kappa:
    d: int
    lam: int
    value: float


def kappa(d: int, lam: int) -> Kappa:
    if d < 1 or lam < 0:
        raise PreconditionError("need d >= 1, lambda >= 0")
    return Kappa(d, lam, math.sqrt(lam / d))


def _check_mass(d: int, lam: int) -> int:
    if d < 1 or lam < 0:
        raise PreconditionError("need d >= 1 and lambda >= 0")
    if lam > MAX_LAMBDA:
        raise SizeLimitError(f"lambda {lam} exceeds {MAX_LAMBDA}")
    count = table_for(d, lam).count(d, lam)
    if count == 0:
        raise EmptySphereError(f"no lattice points with |x|^2 = {lam} in dimension {d}")
    return count


@numba.njit(cache=True)
def _sphere_sums(lam, coeff, out):
    batch, d, roots = coeff.shape
    state = np.empty(lam + 1)
    nxt = np.empty(lam + 1)
    for b in range(batch):
        state[:] = 0.0
        state[0] = 1.0
        for k in range(1, roots + 1):
            state[k * k] = coeff[b, 0, k - 1]
        for j in range(1, d - 1):
            for m in range(lam + 1):
                acc = state[m]
                k = 1
                while k * k <= m:
                    acc += coeff[b, j, k - 1] * state[m - k * k]
                    k += 1
                nxt[m] = acc
            state, nxt = nxt, state
        if d == 1:
            out[b] = state[lam]
        else:
            acc = state[lam]
            for k in range(1, roots + 1):
                acc += coeff[b, d - 1, k - 1] * state[lam - k * k]
            out[b] = acc


def sphere_sum_batch(lam: int, xi: np.ndarray) -> np.ndarray:
    """Unnormalized sums sum_{|x|^2 = lam} e(x . xi) for each row of xi (real)."""
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    ks = np.arange(1, isqrt(lam) + 1)
    # coefficient of mass k^2 in coordinate j: 2 cos(2 pi k xi_j)
    coeff = np.ascontiguousarray(2 * np.cos(2 * np.pi * xi[:, :, None] * ks[None, None, :]))
    out = np.empty(len(xi))
    _sphere_sums(lam, coeff, out)
    return out


def m_exact_batch(d: int, lam: int, xi: np.ndarray, chunk: int = 512) -> np.ndarray:
    count = _check_mass(d, lam)
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    if xi.shape[1] != d:
        raise PreconditionError(f"points must have {d} coordinates")
    parts = [sphere_sum_batch(lam, xi[i : i + chunk]) for i in range(0, len(xi), chunk)]
    return np.concatenate(parts) / float(count)


def m_exact(d: int, lam: int, xi) -> complex:
    coords = xi.coords if isinstance(xi, TorusPoint) else np.asarray(xi, dtype=float)
    return complex(m_exact_batch(d, lam, coords[None, :])[0])


@lru_cache(maxsize=64)
def _sphere_array(d: int, lam: int, cap: int) -> np.ndarray:
    points = np.array(enumerate_sphere(d, lam, cap), dtype=float).reshape(-1, d)
    points.setflags(write=False)
    return points


def m_bruteforce(d: int, lam: int, xi, cap: int = 10**6) -> complex:
    """Direct sum over the enumerated sphere; the oracle for m_exact."""
    coords = xi.coords if isinstance(xi, TorusPoint) else np.asarray(xi, dtype=float)
    points = _sphere_array(d, lam, cap)
    if len(points) == 0:
        raise EmptySphereError(f"no lattice points with |x|^2 = {lam} in dimension {d}")
    phase = 2 * np.pi * (points @ coords)
    re = math.fsum(np.cos(phase).tolist())
    im = math.fsum(np.sin(phase).tolist())
    return complex(re, im) / len(points)


# ---- semigroup comparison multipliers ---------------------------------------------


@dataclass(frozen=True)
class SemigroupValues:
    p1: float
    p2: float
    sin_sum: float
    cos_sum: float
    v_set: tuple[int, ...]
    lam: int

    def p_heat(self, s: float) -> float:
        return math.exp(-s * self.sin_sum)


def semigroup_multipliers(d: int, lam: int, xi) -> SemigroupValues:
    coords = xi.coords if isinstance(xi, TorusPoint) else canonical(xi)
    k2 = lam / d
    sin_sum = math.fsum(np.sin(np.pi * coords) ** 2)
    cos_sum = math.fsum(np.cos(np.pi * coords) ** 2)
    v_set = tuple(int(i) for i in np.nonzero(np.abs(coords) > 0.25)[0])
    sign = -1.0 if lam % 2 else 1.0
    return SemigroupValues(
        math.exp(-k2 * sin_sum), sign * math.exp(-k2 * cos_sum), sin_sum, cos_sum, v_set, lam
    )


# ---- circle-method main terms --------------------------------------------------------


@lru_cache(maxsize=1024)
def _square_classes(q: int) -> tuple[np.ndarray, np.ndarray]:
    n = np.arange(q, dtype=np.int64)
    return n, (n * n) % q


def gauss_values_all_p(q: int, m: int) -> np.ndarray:
    """g(p/q; m) for every residue p (index p mod q)."""
    n, sq = _square_classes(q)
    hist = np.zeros(q, dtype=complex)
    np.add.at(hist, sq, np.exp(2j * np.pi * ((n * (m % q)) % q) / q))
    return np.fft.ifft(hist)


@lru_cache(maxsize=1024)
def _coprime_residues(q: int) -> np.ndarray:
    p = np.arange(1, q + 1, dtype=np.int64)
    return p[np.gcd(p, q) == 1]


def _arc_term(lam: int, q: int, x: np.ndarray) -> complex:
    """sum over p coprime to q of e(-lam p/q) G(p/q; x), without the continuous factor."""
    p = _coprime_residues(q)
    total = np.ones(len(p), dtype=complex)
    residues, mult = np.unique(x % q, return_counts=True)
    for m, c in zip(residues.tolist(), mult.tolist()):
        g = gauss_values_all_p(q, m)[p % q]
        total *= g**c
        if not np.any(total):
            return 0j
    phase = np.exp(-2j * np.pi * ((lam * p) % q) / q)
    terms = phase * total
    return complex(math.fsum(terms.real.tolist()), math.fsum(terms.imag.tolist()))


def _check_n(lam: int, n: int) -> int:
    big_n = isqrt(lam)
    if not 1 <= n <= big_n + 1:
        raise PreconditionError(f"n must lie in [1, {big_n + 1}]")
    return big_n


def _main_term(d: int, lam: int, xi, qs: Sequence[int], use_psi: bool) -> complex:
    coords = xi.coords if isinstance(xi, TorusPoint) else canonical(xi)
    if lam < 1:
        raise PreconditionError("lambda must be positive")
    log_pre = (0.5 * d - 1) * math.log(lam) - math.log(2)
    area = sphere_area(d)
    re, im = [], []
    for q in qs:
        x = vfloor(q * coords)
        weight = 1.0
        if use_psi:
            weight = psi(q * coords - x)
            if weight == 0.0:
                continue
        arith = _arc_term(lam, q, x)
        if arith == 0:
            continue
        rho = math.sqrt(lam) * float(np.linalg.norm(x / q - coords))
        cont = area * fourier_sphere(d, rho)
        term = weight * arith * cont * math.exp(log_pre)
        re.append(term.real)
        im.append(term.imag)
    return complex(math.fsum(re), math.fsum(im))


def main_term_M1(d: int, lam: int, xi, n: int) -> complex:
    _check_n(lam, n)
    return _main_term(d, lam, xi, range(1, n), use_psi=False)


def main_term_M2(d: int, lam: int, xi, n: int) -> complex:
    big_n = _check_n(lam, n)
    return _main_term(d, lam, xi, range(n, big_n + 1), use_psi=True)


@dataclass(frozen=True)
class MultiplierDecomposition:
    d: int
    lam: int
    n: int
    xi: TorusPoint
    m_exact: complex
    major_sum: complex
    b_term: complex
    residual: complex
    count: int

    def identity_error(self) -> float:
        return abs(self.major_sum + self.b_term + self.residual - self.m_exact)


def decompose(d: int, lam: int, xi, n: int) -> MultiplierDecomposition:
    point = xi if isinstance(xi, TorusPoint) else TorusPoint(xi)
    count = _check_mass(d, lam)
    exact = m_exact(d, lam, point)
    major = main_term_M1(d, lam, point, n) / count
    b_term = main_term_M2(d, lam, point, n) / count
    return MultiplierDecomposition(d, lam, n, point, exact, major, b_term, exact - major - b_term, count)


def fourier_sigma_scale(d: int) -> float:
    """Factor between the unnormalized and normalized sphere transforms."""
    return sphere_area(d)


def approximant_a(d: int, lam: int, xi, p: int, q: int) -> complex:
    """Single major-arc approximant for p/q, normalized by the sphere count."""
    _check_coprime(p, q)
    coords = xi.coords if isinstance(xi, TorusPoint) else canonical(xi)
    count = _check_mass(d, lam)
    x = vfloor(q * coords)
    g = complex(np.prod([gauss_values_all_p(q, int(m))[p % q] for m in x]))
    rho = math.sqrt(lam) * float(np.linalg.norm(x / q - coords))
    cont = sphere_area(d) * fourier_sphere(d, rho)
    phase = complex(math.cos(2 * math.pi * ((lam * p) % q) / q), -math.sin(2 * math.pi * ((lam * p) % q) / q))
    return math.exp((0.5 * d - 1) * math.log(lam) - math.log(2 * count)) * phase * g * cont
