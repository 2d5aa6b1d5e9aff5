"""Spherical and ball averages on the periodic box (Z/MZ)^d and dyadic maximal functions.

The box is a finite stand-in for Z^d.  Ratios reported here are periodic-box
estimates; nothing is claimed about the infinite lattice.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, TextIO

import numpy as np
import scipy.fft

from .errors import EmptySphereError, PreconditionError, SizeLimitError
from .lattice import enumerate_sphere, table_for
from .multiplier import m_exact_batch

MAX_SITES = 2**24
DIRECT_LIMIT = 10**5
LABEL = "periodic-box estimate"


@dataclass(frozen=True, eq=False)
class GridFunction:
    M: int
    d: int
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.M,) * self.d:
            raise PreconditionError(f"values must have shape {(self.M,) * self.d}")

    @classmethod
    def constant(cls, M: int, d: int, c: complex = 1.0) -> "GridFunction":
        _check_box(M, d)
        return cls(M, d, np.full((M,) * d, c, dtype=complex))

    @classmethod
    def delta(cls, M: int, d: int) -> "GridFunction":
        f = cls.constant(M, d, 0.0)
        f.values[(0,) * d] = 1.0
        return f

    @classmethod
    def gaussian(cls, M: int, d: int, rng: np.random.Generator, real: bool = False) -> "GridFunction":
        _check_box(M, d)
        shape = (M,) * d
        vals = rng.standard_normal(shape)
        if not real:
            vals = vals + 1j * rng.standard_normal(shape)
        return cls(M, d, vals.astype(complex))

    def norm2(self) -> float:
        return math.sqrt(float(np.sum(np.abs(self.values) ** 2)))

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(self.M, self.d, values)


@dataclass(frozen=True)
class DyadicSet:
    exponents: tuple[int, ...]

    def __post_init__(self):
        exps = tuple(self.exponents)
        if not exps:
            raise PreconditionError("dyadic set must not be empty")
        if any(e < 0 for e in exps) or any(b <= a for a, b in zip(exps, exps[1:])):
            raise PreconditionError("exponents must be non-negative and strictly increasing")
        object.__setattr__(self, "exponents", exps)

    @classmethod
    def up_to(cls, max_exp: int) -> "DyadicSet":
        return cls(tuple(range(max_exp + 1)))

    @property
    def radii(self) -> tuple[int, ...]:
        return tuple(2**n for n in self.exponents)

    @property
    def masses(self) -> tuple[int, ...]:
        return tuple(4**n for n in self.exponents)

    def label(self) -> str:
        return "{" + ",".join(str(t) for t in self.radii) + "}"


def _check_box(M: int, d: int) -> None:
    if M < 1 or d < 1:
        raise PreconditionError("need M >= 1 and d >= 1")
    if M**d > MAX_SITES:
        raise SizeLimitError(f"M^d = {M**d} exceeds {MAX_SITES} sites")


def _check_radius(f: GridFunction, lam: int) -> int:
    if lam < 0:
        raise PreconditionError("lambda must be non-negative")
    if 4 * lam >= f.M * f.M:
        raise PreconditionError(f"need 2 sqrt(lambda) < M, got lambda={lam}, M={f.M}")
    count = table_for(f.d, lam).count(f.d, lam)
    if count == 0:
        raise EmptySphereError(f"no lattice points with |x|^2 = {lam} in dimension {f.d}")
    return count


@lru_cache(maxsize=16)
def multiplier_grid(d: int, M: int, lam: int) -> np.ndarray:
    """m(k/M) at every frequency k of the box, shaped (M,)*d."""
    _check_box(M, d)
    # m is invariant under sign changes and permutations of coordinates, so it
    # is evaluated once per sorted tuple of folded frequencies min(k, M - k)
    k = np.indices((M,) * d).reshape(d, -1).T
    folded = np.sort(np.minimum(k, M - k), axis=1)
    base = M // 2 + 1
    codes = folded @ (base ** np.arange(d, dtype=np.int64))
    _, first, inverse = np.unique(codes, return_index=True, return_inverse=True)
    values = m_exact_batch(d, lam, folded[first] / M, chunk=4096)
    grid = values[inverse.reshape(-1)].reshape((M,) * d)
    grid.setflags(write=False)
    return grid


def _direct(f: GridFunction, lam: int, count: int) -> np.ndarray:
    out = np.zeros_like(f.values)
    axes = tuple(range(f.d))
    for y in enumerate_sphere(f.d, lam, cap=DIRECT_LIMIT):
        out += np.roll(f.values, y, axis=axes)
    return out / count


def _spectral(f: GridFunction, lam: int, fhat: np.ndarray | None = None) -> np.ndarray:
    if fhat is None:
        fhat = scipy.fft.fftn(f.values)
    return scipy.fft.ifftn(multiplier_grid(f.d, f.M, lam) * fhat)


def _pick_mode(f: GridFunction, count: int, mode: str) -> str:
    if mode == "auto":
        return "direct" if count <= DIRECT_LIMIT and count * f.M**f.d <= 10**8 else "spectral"
    return mode


def spherical_average(
    f: GridFunction, lam: int, mode: str = "auto", fhat: np.ndarray | None = None
) -> GridFunction:
    """(A f)(x) = r_d(lam)^-1 sum_{|y|^2 = lam} f(x - y), indices mod M.

    fhat, when given, is the forward FFT of f and is reused by the spectral path.
    """
    count = _check_radius(f, lam)
    if lam == 0:
        return f.with_values(f.values.copy())
    mode = _pick_mode(f, count, mode)
    if mode == "direct":
        if count > DIRECT_LIMIT:
            raise SizeLimitError(f"direct path needs at most {DIRECT_LIMIT} sphere points")
        return f.with_values(_direct(f, lam, count))
    if mode == "spectral":
        return f.with_values(_spectral(f, lam, fhat))
    raise PreconditionError(f"unknown mode {mode!r}")


def ball_average(f: GridFunction, lam: int, mode: str = "auto") -> GridFunction:
    """Average over |y|^2 <= lam, as the count-weighted mix of sphere averages."""
    _check_radius(f, lam)
    row = table_for(f.d, lam).row(f.d)
    total = sum(row[: lam + 1])
    acc = np.zeros_like(f.values)
    for m in range(lam + 1):
        if row[m]:
            acc += row[m] * spherical_average(f, m, mode).values
    return f.with_values(acc / total)


def dyadic_maximal(f: GridFunction, dyadic: DyadicSet, mode: str = "auto") -> GridFunction:
    out = None
    fhat = scipy.fft.fftn(f.values) if mode != "direct" else None
    for lam in dyadic.masses:
        a = np.abs(spherical_average(f, lam, mode, fhat).values)
        out = a if out is None else np.maximum(out, a)
    return f.with_values(out.astype(complex))


def _integer_sphere_sums(values: np.ndarray, d: int, lam: int) -> np.ndarray:
    out = np.zeros_like(values)
    axes = tuple(range(d))
    for y in enumerate_sphere(d, lam, cap=DIRECT_LIMIT):
        out += np.roll(values, y, axis=axes)
    return out


def check_ball_domination(values: np.ndarray, lam: int) -> bool:
    """sup_{m<=lam} ball average <= sup_{m<=lam} sphere average, for f >= 0 integer-valued.

    Every comparison is an exact integer cross-multiplication.
    """
    values = np.asarray(values)
    if values.dtype.kind not in "iu" or np.any(values < 0):
        raise PreconditionError("domination check needs non-negative integer values")
    d, M = values.ndim, values.shape[0]
    if 4 * lam >= M * M:
        raise PreconditionError("need 2 sqrt(lambda) < M")
    row = table_for(d, lam).row(d)
    vals = values.astype(object)
    # running maxima as fractions num/den
    sphere_num, sphere_den = None, None
    ball_num, ball_den = None, None
    ball_sum = np.zeros_like(vals)
    ball_count = 0
    for m in range(lam + 1):
        if not row[m]:
            continue
        s = _integer_sphere_sums(vals, d, m) if m else vals.copy()
        ball_sum = ball_sum + s
        ball_count += row[m]
        if sphere_num is None:
            sphere_num, sphere_den = s, np.full_like(s, row[m])
            ball_num, ball_den = ball_sum.copy(), np.full_like(s, ball_count)
            continue
        better = s * sphere_den > sphere_num * row[m]
        sphere_num = np.where(better, s, sphere_num)
        sphere_den = np.where(better, row[m], sphere_den)
        better = ball_sum * ball_den > ball_num * ball_count
        ball_num = np.where(better, ball_sum, ball_num)
        ball_den = np.where(better, ball_count, ball_den)
    return bool(np.all(ball_num * sphere_den <= sphere_num * ball_den))


@dataclass(frozen=True)
class RatioRow:
    d: int
    M: int
    T: str
    trial: str
    ratio: float


def ratio_experiment(
    d: int, M: int, dyadic: DyadicSet, trials: int, seed: int, mode: str = "auto"
) -> list[RatioRow]:
    """||sup_t |A_t f|||_2 / ||f||_2 for seeded Gaussian f, plus delta_0 and the constant 1.

    Two summary rows follow: "max" over every input (at least 1, from the
    constant) and "mean" over the Gaussian trials.
    """
    _check_box(M, d)
    if trials < 1:
        raise PreconditionError("trials must be at least 1")
    label = dyadic.label()
    rows = []
    for name, f in (("ones", GridFunction.constant(M, d)), ("delta0", GridFunction.delta(M, d))):
        rows.append(RatioRow(d, M, label, name, dyadic_maximal(f, dyadic, mode).norm2() / f.norm2()))
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, d, M])))
    for trial in range(trials):
        f = GridFunction.gaussian(M, d, rng)
        rows.append(RatioRow(d, M, label, str(trial), dyadic_maximal(f, dyadic, mode).norm2() / f.norm2()))
    trial_ratios = [r.ratio for r in rows[2:]]
    rows.append(RatioRow(d, M, label, "max", max(r.ratio for r in rows)))
    rows.append(RatioRow(d, M, label, "mean", math.fsum(trial_ratios) / len(trial_ratios)))
    return rows


def write_ratio_csv(rows: Sequence[RatioRow], out: TextIO, preamble: Sequence[str] = ()) -> None:
    for line in preamble:
        out.write(f"# {line}\r\n")
    out.write(f"# {LABEL}\r\n")
    writer = csv.writer(out, lineterminator="\r\n")
    writer.writerow(["d", "M", "T", "trial", "ratio"])
    for r in rows:
        writer.writerow([r.d, r.M, r.T, r.trial, format(r.ratio, ".17g")])
