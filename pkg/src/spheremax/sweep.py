"""Seeded bound sweeps over the multiplier and its companions.

Each family maps a (d, lambda)-type pair to the largest observed ratio
|lhs| / rhs, where rhs omits any implicit constant.  Samples are drawn per
(pair, chunk) from independent Philox streams and reduced in a fixed order,
so output depends only on the descriptor and never on the worker count.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import isqrt
from pathlib import Path
from typing import Callable, Sequence, TextIO

import numpy as np

from . import __version__, constants
from .arith import asymptotic_ratio, singular_series
from .errors import PreconditionError
from .lattice import sphere_count, table_for
from .maximal import DyadicSet, ratio_experiment
from .multiplier import BUMP_PROFILE, batch_norms, canonical, decompose, m_exact_batch
from .specfun import _krawtchouk_numerator, check_fourier_decay

CHUNK = 1000
HEADROOM = 1.25
EXPLICIT_SLACK = 1e-9
XI_FAMILIES = ("prop41", "prop41_shift", "prop42", "prop61", "prop71", "prop72", "resid_e")
FAMILIES = XI_FAMILIES + ("fourier_decay", "krawtchouk", "asymptotic_ratio", "maximal_ratio")
EXPLICIT = {"prop41", "prop41_shift"}
KRAWTCHOUK_FLOOR = 0.2


@dataclass
class SweepDescriptor:
    family: str
    pairs: list[tuple[int, int]]
    samples: int = 1000
    seed: int = 0
    output: str | None = None
    n: int | None = None
    dyadic_max_exp: int = 2

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise PreconditionError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        self.pairs = [tuple(int(v) for v in p) for p in self.pairs]
        if not self.pairs or any(len(p) != 2 for p in self.pairs):
            raise PreconditionError("a sweep needs a non-empty list of pairs")
        if self.samples < 1:
            raise PreconditionError("samples must be positive")

    @classmethod
    def from_json(cls, path: str | Path) -> "SweepDescriptor":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        if "output" in raw and raw["output"] is not None:
            out = Path(raw["output"])
            if not out.is_absolute():
                raw["output"] = str(Path(path).resolve().parent / out)
        return cls(**raw)


@dataclass(frozen=True)
class SweepRow:
    family: str
    d: int
    lam: int
    seed: int
    max_ratio: float
    argmax: str


def sample_torus(d: int, size: int, seed: int, pair_index: int, chunk_index: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, pair_index, chunk_index])))
    return canonical(rng.random((size, d)) - 0.5)


def _fmt_point(xi: np.ndarray) -> str:
    return ";".join(format(float(v), ".17g") for v in xi)


# ---- ratio families on sampled frequencies -----------------------------------------


def _ratio_prop41(d, lam, xi, m):
    k2 = lam / d
    return np.abs(m - 1) / (2 * math.pi**2 * k2 * batch_norms(xi) ** 2)


def _ratio_prop41_shift(d, lam, xi, m):
    k2 = lam / d
    sign = -1.0 if lam % 2 else 1.0
    return np.abs(m - sign) / (2 * math.pi**2 * k2 * batch_norms(xi + 0.5) ** 2)


def _ratio_prop42(d, lam, xi, m):
    k = math.sqrt(lam / d)
    rhs = (
        np.exp(-2 * math.pi * k * batch_norms(xi))
        + np.exp(-2 * math.pi * k * batch_norms(xi + 0.5))
        + lam**-2.0
        + math.exp(-0.1 * d)
    )
    return np.abs(m) / rhs


def _ratio_prop61(d, lam, xi, m):
    k = math.sqrt(lam / d)
    rhs = 1 / (k * batch_norms(xi)) + 1 / (k * batch_norms(xi + 0.5)) + k**-4.0
    return np.abs(m) / rhs


def _trig_sums(xi):
    s = np.sum(np.sin(np.pi * xi) ** 2, axis=1)
    c = np.sum(np.cos(np.pi * xi) ** 2, axis=1)
    return s, c


def _ratio_prop71(d, lam, xi, m):
    k2 = lam / d
    if k2 > 1 / 25:
        raise PreconditionError(f"prop71 needs kappa <= 1/5, got kappa^2 = {k2:g}")
    c = constants.load()["krawtchouk_c"]
    s, co = _trig_sums(xi)
    first = np.sum(np.abs(xi) > 0.25, axis=1) <= d / 2
    sign = -1.0 if lam % 2 else 1.0
    approx = np.where(first, np.exp(-k2 * s), sign * np.exp(-k2 * co))
    t = np.where(first, s, co)
    rhs = np.minimum(np.exp(-c * k2 * t / 400), k2 * t)
    return np.abs(m - approx) / rhs


def _ratio_prop72(d, lam, xi, m):
    k2 = lam / d
    c = constants.load()["krawtchouk_c"]
    s, co = _trig_sums(xi)
    return np.abs(m) / (np.exp(-c * k2 * s / 100) + np.exp(-c * k2 * co / 100))


_RATIOS: dict[str, Callable] = {
    "prop41": _ratio_prop41,
    "prop41_shift": _ratio_prop41_shift,
    "prop42": _ratio_prop42,
    "prop61": _ratio_prop61,
    "prop71": _ratio_prop71,
    "prop72": _ratio_prop72,
}


def _chunk_task(args) -> tuple[float, str]:
    family, d, lam, size, seed, pair_index, chunk_index, n = args
    xi = sample_torus(d, size, seed, pair_index, chunk_index)
    if family == "resid_e":
        n = isqrt(lam) + 1 if n is None else n
        bound = d ** (0.75 * d) / lam ** (0.25 * d - 1)
        ratios = np.array([abs(decompose(d, lam, x, n).residual) / bound for x in xi])
    else:
        m = m_exact_batch(d, lam, xi)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = _RATIOS[family](d, lam, xi, m)
        ratios = np.where(np.isnan(ratios), 0.0, ratios)
    i = int(np.argmax(ratios))
    return float(ratios[i]), _fmt_point(xi[i])


def _reduce(results: Sequence[tuple[float, str]]) -> tuple[float, str]:
    best, where = -math.inf, ""
    for value, point in results:
        if value > best:
            best, where = value, point
    return best, where


# ---- families without frequency samples ---------------------------------------------


def _pair_task(args) -> tuple[float, str] | list[tuple[str, float, str]]:
    family, a, b, desc_seed, samples, dyadic_max_exp = args
    if family == "fourier_decay":
        grid = np.linspace(0.0, float(b), samples + 1)
        rep = check_fourier_decay(a, grid)
        return [("exp", rep.a_exp, rep.exp_argmax), ("pow", rep.a_pow, rep.pow_argmax)]
    if family == "krawtchouk":
        best, where = 0.0, ""
        for n in range(2, a + 1):
            for k in range(1, n // 2 + 1):
                for x in range(1, n // 2 + 1):
                    num = abs(_krawtchouk_numerator(n, k, x))
                    if num == 0:
                        continue
                    ratio = num / math.comb(n, k) / math.exp(-KRAWTCHOUK_FLOOR * k * x / n)
                    if ratio > best:
                        best, where = ratio, f"n={n};k={k};x={x}"
        return best, where
    if family == "asymptotic_ratio":
        tail = 1e-7 if a <= 8 else 1e-10
        series = singular_series(a, b, tail)
        r = asymptotic_ratio(sphere_count(table_for(a, b), a, b).log_value, a, b, series)
        return abs(r - 1), f"R={format(r, '.17g')}"
    if family == "maximal_ratio":
        rows = ratio_experiment(a, b, DyadicSet.up_to(dyadic_max_exp), samples, desc_seed)
        best = max((r for r in rows if r.trial not in ("max", "mean")), key=lambda r: r.ratio)
        return best.ratio, f"trial={best.trial}"
    raise PreconditionError(f"unknown family {family!r}")


def _map(fn, tasks: list, threads: int) -> list:
    if threads <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks))


def sweep_bounds(desc: SweepDescriptor, threads: int = 1) -> list[SweepRow]:
    rows: list[SweepRow] = []
    if desc.family in XI_FAMILIES:
        tasks, owners = [], []
        for pi, (d, lam) in enumerate(desc.pairs):
            for ci in range(0, desc.samples, CHUNK):
                size = min(CHUNK, desc.samples - ci)
                tasks.append((desc.family, d, lam, size, desc.seed, pi, ci // CHUNK, desc.n))
                owners.append(pi)
        results = _map(_chunk_task, tasks, threads)
        for pi, (d, lam) in enumerate(desc.pairs):
            best, where = _reduce([r for r, o in zip(results, owners) if o == pi])
            rows.append(SweepRow(desc.family, d, lam, desc.seed, best, where))
        return rows
    tasks = [(desc.family, a, b, desc.seed, desc.samples, desc.dyadic_max_exp) for a, b in desc.pairs]
    for (a, b), res in zip(desc.pairs, _map(_pair_task, tasks, threads)):
        if isinstance(res, list):
            for tag, value, rho in res:
                rows.append(SweepRow(desc.family, a, b, desc.seed, value, f"{tag}:rho={format(float(rho), '.17g')}"))
        else:
            rows.append(SweepRow(desc.family, a, b, desc.seed, res[0], res[1]))
    return rows


def regression_limit(family: str, frozen: dict[str, float]) -> float:
    if family in EXPLICIT:
        return 1 + EXPLICIT_SLACK
    if family == "krawtchouk":
        return 1.0
    return frozen[family]


def check_rows(rows: Sequence[SweepRow], frozen: dict[str, float] | None = None) -> list[str]:
    """Names of rows whose ratio is not finite or exceeds its frozen limit."""
    frozen = constants.load() if frozen is None else frozen
    bad = []
    for r in rows:
        limit = regression_limit(r.family, frozen)
        if not math.isfinite(r.max_ratio) or r.max_ratio > limit:
            bad.append(f"{r.family}(d={r.d}, lambda={r.lam}): {r.max_ratio:.6g} > {limit:.6g}")
    return bad


def calibrate(rows: Sequence[SweepRow], path: Path = constants.CONSTANTS_PATH) -> dict[str, float]:
    """Freeze max observed ratio times the headroom factor for an implicit-constant family."""
    family = rows[0].family
    if family in EXPLICIT or family == "krawtchouk":
        raise PreconditionError(f"{family} has an explicit constant; nothing to calibrate")
    values = constants.load(path)
    values[family] = max(r.max_ratio for r in rows) * HEADROOM
    header = constants.read_text(path).splitlines()
    comments = "\n".join(line[2:] for line in header if line.startswith("# "))
    constants.save(values, path, comments)
    return values


def build_id() -> str:
    """git-style blob hash over the package sources, in sorted path order."""
    root = Path(__file__).parent
    h = hashlib.sha1()
    for path in sorted(root.rglob("*.py")):
        data = path.read_bytes()
        h.update(f"{path.relative_to(root).as_posix()}\0blob {len(data)}\0".encode())
        h.update(data)
    return h.hexdigest()[:12]


def preamble(seed: int, family: str) -> list[str]:
    return [
        f"tool=spheremax {__version__}",
        f"build={build_id()}",
        f"bump_profile={BUMP_PROFILE}",
        f"constants_sha256={constants.digest()}",
        f"family={family}",
        f"seed={seed}",
    ]


def write_sweep_csv(rows: Sequence[SweepRow], out: TextIO, seed: int, family: str) -> None:
    for line in preamble(seed, family):
        out.write(f"# {line}\r\n")
    writer = csv.writer(out, lineterminator="\r\n")
    writer.writerow(["family", "d", "lambda", "seed", "max_ratio", "argmax_xi"])
    for r in rows:
        writer.writerow([r.family, r.d, r.lam, r.seed, format(r.max_ratio, ".17g"), r.argmax])
