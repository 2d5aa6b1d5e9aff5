"""Frozen calibration constants, stored as key=value lines in data/constants.txt."""

from __future__ import annotations

import hashlib
from pathlib import Path

CONSTANTS_PATH = Path(__file__).with_name("data") / "constants.txt"


def read_text(path: Path = CONSTANTS_PATH) -> str:
    return path.read_text(encoding="utf-8")


def load(path: Path = CONSTANTS_PATH) -> dict[str, float]:
    out: dict[str, float] = {}
    for line in read_text(path).splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        out[key.strip()] = float(value)
    return out


def digest(path: Path = CONSTANTS_PATH) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def save(values: dict[str, float], path: Path = CONSTANTS_PATH, header: str = "") -> None:
    lines = [f"# {h}" for h in header.splitlines() if h]
    lines += [f"{key} = {values[key]!r}" for key in sorted(values)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
