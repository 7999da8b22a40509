"""Experiment configuration, loadable from a JSON file that mirrors the CLI flags."""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass

__all__ = ["ExperimentConfig", "load_config", "config_hash", "check_resolution", "parse_grid", "parse_box"]


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one harness invocation.

    ``grid`` and ``box`` of ``None`` let each experiment pick its default;
    ``sigma`` of ``None`` means ``1/(2k)``.
    """

    experiment: str = "identities"
    which: str | None = None
    grid: tuple[int, int, int] | None = None
    box: tuple[float, float, float] | None = None
    seed: int = 0
    out: str | None = None
    format: str = "csv"
    k: int | None = None
    lambdas: tuple[float, ...] | None = None
    deltas: tuple[float, ...] | None = None
    eps: tuple[float, ...] | None = None
    s: float = 0.0
    s0: float = 4.0
    sigma: float | None = None
    p: int | None = None
    a: float | None = None
    corpus_size: int | None = None
    rhs: str = "all"
    budget: int = 6
    verify: str | None = None

    def __post_init__(self):
        if self.format not in ("csv", "json"):
            raise ValueError(f"unknown format {self.format!r}")
        if self.grid is not None and (len(self.grid) != 3 or min(self.grid) < 2):
            raise ValueError("grid needs three counts >= 2")
        if self.box is not None and (len(self.box) != 3 or min(self.box) <= 0):
            raise ValueError("box needs three positive half-extents")

    def replace(self, **kw) -> "ExperimentConfig":
        return dataclasses.replace(self, **kw)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d.pop("out")  # the destination does not change results
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in d.items()}


_TUPLES = {"grid": int, "box": float, "lambdas": float, "deltas": float, "eps": float}


def _coerce(key, value):
    if value is None:
        return None
    if key in _TUPLES:
        if isinstance(value, str):
            value = parse_grid(value) if key == "grid" else [float(v) for v in value.split(",")]
        return tuple(_TUPLES[key](v) for v in value)
    return value


def load_config(path, **overrides) -> ExperimentConfig:
    """Read a JSON config; keys are the CLI flag names, ``None`` overrides are ignored.

    Raises
    ------
    ValueError
        On unknown keys.
    """
    with open(path) as fh:
        raw = json.load(fh)
    raw.update({k: v for k, v in overrides.items() if v is not None})
    return from_mapping(raw)


def from_mapping(raw: dict) -> ExperimentConfig:
    names = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(raw) - names
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(**{k: _coerce(k, v) for k, v in raw.items()})


def config_hash(cfg: ExperimentConfig) -> str:
    blob = json.dumps(cfg.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def parse_grid(text: str) -> tuple[int, int, int]:
    """``"64x64x128"`` -> ``(64, 64, 128)``."""
    parts = text.lower().split("x")
    if len(parts) != 3:
        raise ValueError(f"grid must look like N1xN2xN3, got {text!r}")
    return tuple(int(p) for p in parts)


def parse_box(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError(f"box must look like R1,R2,R3, got {text!r}")
    return tuple(float(p) for p in parts)


def check_resolution(n3: int, r3: float, freqs) -> None:
    """Reject t-carriers ``exp(i f t)`` with fewer than 8 points per period (4 plus factor 2).

    For ``h_lambda`` the carrier is ``f = lambda^2``.

    Raises
    ------
    ValueError
        Naming the first offending frequency.
    """
    for f in freqs:
        need = math.ceil(8 * f * r3 / math.pi)
        if n3 < need:
            raise ValueError(f"N3={n3} under-resolves carrier {f:g}: need N3 >= {need}")
