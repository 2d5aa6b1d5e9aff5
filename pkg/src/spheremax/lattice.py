"""Exact counting of lattice points on spheres and in balls.

Counts r_j(m) = |{x in Z^j : |x|^2 = m}| are held as Python integers.  Rows
are produced by packing each row into one big integer (Kronecker
substitution) and multiplying by the packed one-dimensional row with GMP,
so the j-th row is the (j-1)-th row convolved with the square indicator.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache
from math import isqrt
from typing import Iterator, Sequence, TextIO

import gmpy2

from .errors import CapacityError, PreconditionError, SizeLimitError, TableRangeError

MAX_DIM = 64
MAX_MASS = 2**22
DEFAULT_CAP = 10**7


@dataclass(frozen=True)
class BigCount:
    value: int
    log_value: float

    @classmethod
    def of(cls, value: int) -> "BigCount":
        if value < 0:
            raise ValueError("counts are non-negative")
        return cls(value, math.log(value) if value else -math.inf)

    def __int__(self) -> int:
        return self.value


@dataclass(frozen=True, eq=False)
class ThetaTable:
    """Rows r_1..r_d of representation counts, masses 0..mass_max."""

    dim_max: int
    mass_max: int
    rows: tuple[tuple[int, ...], ...] = field(repr=False)

    def row(self, d: int) -> tuple[int, ...]:
        self._check(d, 0)
        return self.rows[d - 1]

    def count(self, d: int, lam: int) -> int:
        self._check(d, lam)
        return self.rows[d - 1][lam]

    def _check(self, d: int, lam: int) -> None:
        if not 1 <= d <= self.dim_max or not 0 <= lam <= self.mass_max:
            raise TableRangeError(
                f"(d={d}, lambda={lam}) outside table "
                f"(dim_max={self.dim_max}, mass_max={self.mass_max})"
            )


def square_row(mass_max: int) -> list[int]:
    row = [0] * (mass_max + 1)
    row[0] = 1
    for k in range(1, isqrt(mass_max) + 1):
        row[k * k] = 2
    return row


def _pack(values: Sequence[int], hex_width: int) -> gmpy2.mpz:
    fmt = f"0{hex_width}x"
    return gmpy2.mpz("".join(format(v, fmt) for v in reversed(values)) or "0", 16)


def _unpack(z: gmpy2.mpz, n: int, hex_width: int) -> tuple[int, ...]:
    digits = z.digits(16).rjust(n * hex_width, "0")
    total = len(digits)
    return tuple(
        int(digits[total - (m + 1) * hex_width : total - m * hex_width], 16)
        for m in range(n)
    )


def build_theta_table(d: int, mass_max: int) -> ThetaTable:
    if not 1 <= d <= MAX_DIM:
        raise SizeLimitError(f"dimension {d} outside [1, {MAX_DIM}]")
    if not 0 <= mass_max <= MAX_MASS:
        raise SizeLimitError(f"mass {mass_max} outside [0, {MAX_MASS}]")
    n = mass_max + 1
    base = square_row(mass_max)
    # r_j(m) <= (2 sqrt(m) + 1)^j; slots only overflow upward, so the low
    # n slots stay exact once they can hold the largest count.
    bits = ((2 * isqrt(mass_max) + 3) ** d).bit_length() + 1
    hex_width = -(-bits // 4)
    mask = (gmpy2.mpz(1) << (n * hex_width * 4)) - 1
    packed_base = _pack(base, hex_width)
    rows = [tuple(base)]
    current = packed_base
    for _ in range(2, d + 1):
        current = (current * packed_base) & mask
        rows.append(_unpack(current, n, hex_width))
    return ThetaTable(d, mass_max, tuple(rows))


@lru_cache(maxsize=8)
def cached_table(d: int, mass_max: int) -> ThetaTable:
    return build_theta_table(d, mass_max)


def table_for(d: int, lam: int) -> ThetaTable:
    """A cached table covering (d, lam); rounds the mass up to limit rebuilds."""
    mass = 64
    while mass < lam:
        mass *= 2
    return cached_table(d, min(mass, max(lam, MAX_MASS)))


def sphere_count(table: ThetaTable, d: int, lam: int) -> BigCount:
    return BigCount.of(table.count(d, lam))


def ball_count(table: ThetaTable, d: int, lam: int) -> BigCount:
    table._check(d, lam)
    return BigCount.of(sum(table.rows[d - 1][: lam + 1]))


@dataclass(frozen=True)
class SandwichReport:
    lhs: int
    mid: int
    rhs: int
    ok: bool


def check_ball_sphere_bounds(table: ThetaTable, d: int, lam: int) -> SandwichReport:
    """|B_t(d-4)| <= |S_t(d)| <= |B_t(d)| <= (2t+1)^4 |S_t(d)| with t = sqrt(lam).

    lhs/mid/rhs are the ball count in d-4 dimensions, the sphere count and the
    ball count in d dimensions.  All comparisons are exact integer ones.
    """
    if d < 5:
        raise PreconditionError("the ball/sphere sandwich needs d >= 5")
    if lam < 1:
        raise PreconditionError("lambda must be a positive integer")
    lower = ball_count(table, d - 4, lam).value
    sphere = table.count(d, lam)
    ball = ball_count(table, d, lam).value
    # (2t+1)^4 = A + t*C with integer A, C; test ball - A*S <= t*C*S by squaring.
    a = 16 * lam * lam + 24 * lam + 1
    c = 32 * lam + 8
    gap = ball - a * sphere
    upper_ok = gap <= 0 or gap * gap <= lam * (c * sphere) ** 2
    ok = lower <= sphere <= ball and upper_ok
    return SandwichReport(lower, sphere, ball, ok)


def check_slice_identity(table: ThetaTable, d: int, r: int, lam: int) -> bool:
    """r_d(lam) == sum_l r_r(l) r_{d-r}(lam - l), evaluated directly."""
    if not 1 <= r < d:
        raise PreconditionError("need 1 <= r < d")
    table._check(d, lam)
    left = table.rows[r - 1]
    right = table.rows[d - r - 1]
    split = sum(left[l] * right[lam - l] for l in range(lam + 1))
    return split == table.rows[d - 1][lam]


def iter_sphere(d: int, lam: int) -> Iterator[tuple[int, ...]]:
    """Lattice points with |x|^2 = lam in lexicographic order.

    Depth-first over coordinates; a branch is entered only when the remaining
    mass is representable by the remaining coordinates.
    """
    if d < 1 or lam < 0:
        raise PreconditionError("need d >= 1 and lambda >= 0")
    table = table_for(min(d, 4), lam)
    # Lagrange: with four or more free coordinates every mass is reachable.
    reachable = [None] + [table.rows[j - 1] for j in range(1, min(d, 4) + 1)]

    def feasible(free: int, rest: int) -> bool:
        if free == 0:
            return rest == 0
        if free >= 4:
            return True
        return reachable[free][rest] > 0

    prefix: list[int] = []

    def walk(rest: int) -> Iterator[tuple[int, ...]]:
        free = d - len(prefix) - 1
        if free < 0:
            if rest == 0:
                yield tuple(prefix)
            return
        top = isqrt(rest)
        for v in range(-top, top + 1):
            left = rest - v * v
            if feasible(free, left):
                prefix.append(v)
                yield from walk(left)
                prefix.pop()

    yield from walk(lam)


def enumerate_sphere(d: int, lam: int, cap: int = DEFAULT_CAP) -> list[tuple[int, ...]]:
    if d > 10 or lam > 400:
        raise SizeLimitError("enumeration is limited to d <= 10, lambda <= 400")
    count = table_for(d, lam).count(d, lam)
    if count > cap:
        raise CapacityError(count, cap)
    return list(iter_sphere(d, lam))


@dataclass(frozen=True)
class ProfileHistogram:
    """Coordinate-profile statistics of S_sqrt(lam) cap Z^d.

    by_pm1[k] counts points with exactly k coordinates equal to +-1.
    by_large[j][m] counts points with exactly m coordinates of modulus at
    least thresholds[j].
    """

    d: int
    lam: int
    thresholds: tuple[float, ...]
    by_pm1: dict[int, int]
    by_large: dict[int, dict[int, int]]

    def total(self) -> int:
        return sum(self.by_pm1.values())

    def pm1_at_most(self, bound: int) -> int:
        return sum(c for k, c in self.by_pm1.items() if k <= bound)

    def large_at_most(self, index: int, cutoff: float) -> int:
        return sum(c for m, c in self.by_large[index].items() if m <= cutoff)


def _marked_counts(d: int, lam: int, marked) -> dict[int, int]:
    # table[m][k]: points in the current prefix dimension with mass m and k marks
    values = [(v, v * v, 1 if marked(v) else 0) for v in range(-isqrt(lam), isqrt(lam) + 1)]
    table = [[0] * (d + 1) for _ in range(lam + 1)]
    table[0][0] = 1
    for _ in range(d):
        nxt = [[0] * (d + 1) for _ in range(lam + 1)]
        for m in range(lam + 1):
            row = table[m]
            if not any(row):
                continue
            for _, sq, mk in values:
                if m + sq > lam:
                    continue
                target = nxt[m + sq]
                for k in range(d + 1 - mk):
                    if row[k]:
                        target[k + mk] += row[k]
        table = nxt
    return {k: table[lam][k] for k in range(d + 1)}


def profile_stats(d: int, lam: int, thresholds: Sequence[float] = (1.0,)) -> ProfileHistogram:
    if d > 10 or lam > 400:
        raise SizeLimitError("profile statistics are limited to d <= 10, lambda <= 400")
    if any(t < 0 for t in thresholds):
        raise PreconditionError("thresholds must be non-negative")
    by_pm1 = _marked_counts(d, lam, lambda v: abs(v) == 1)
    by_large = {
        j: _marked_counts(d, lam, lambda v, t=t: abs(v) >= t) for j, t in enumerate(thresholds)
    }
    return ProfileHistogram(d, lam, tuple(thresholds), by_pm1, by_large)


def write_row_csv(table: ThetaTable, d: int, out: TextIO, lam_max: int | None = None) -> None:
    row = table.row(d)
    if lam_max is not None:
        table.count(d, lam_max)  # range check
        row = row[: lam_max + 1]
    writer = csv.writer(out, lineterminator="\r\n")
    writer.writerow(["d", "lambda", "r_d_lambda"])
    for lam, value in enumerate(row):
        writer.writerow([d, lam, value])


def write_profile_csv(hist: ProfileHistogram, out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\r\n")
    writer.writerow(["k", "count"])
    for k in sorted(hist.by_pm1):
        writer.writerow([k, hist.by_pm1[k]])
