"""Conic cutoff symbols, anisotropic weights and smoothing symbols.

All transitions are built from the exp-glued step ``S`` so every symbol is
C-infinity.  The cone symbols are functions of the ratio ``xi3/|xi|`` (or
``|xi3|/|xi|``) and of ``|xi|``; they are homogeneous of degree zero once
``|xi| >= 1``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .spectral import GridSpec

__all__ = [
    "smooth_step",
    "smooth_step_derivative",
    "ConeCutoffSpec",
    "MultiplierSpec",
    "PLUS",
    "ZERO",
    "MINUS",
    "STAR",
    "cone",
    "eval_symbol",
    "make_multiplier",
    "partition_floor",
    "psi_bounds",
    "export_symbol_csv",
]


def _f(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    with np.errstate(over="ignore"):  # -1/x -> -inf for subnormal x; exp gives 0
        out[pos] = np.exp(-1.0 / x[pos])
    return out


def smooth_step(x):
    """``S(x) = f(x) / (f(x) + f(1 - x))`` with ``f(x) = exp(-1/x)`` for ``x > 0``.

    ``S`` vanishes for ``x <= 0``, equals one for ``x >= 1`` and is smooth
    and strictly increasing in between.

    Examples
    --------
    >>> float(smooth_step(0.5))
    0.5
    """
    x = np.asarray(x, dtype=float)
    a, b = _f(x), _f(1.0 - x)
    out = a / np.where(a + b > 0, a + b, 1.0)
    return out if out.ndim else float(out)


def smooth_step_derivative(x):
    """Closed-form ``S'(x)``; zero outside ``(0, 1)``."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    m = (x > 0) & (x < 1)
    xm = x[m]
    # S = 1 / (1 + exp(1/x - 1/(1-x)))
    g = 1.0 / xm - 1.0 / (1.0 - xm)
    dg = -1.0 / xm**2 - 1.0 / (1.0 - xm) ** 2
    e = np.exp(-np.abs(g))
    # S' = -dg * exp(g) / (1 + exp(g))^2, written to avoid overflow
    out[m] = -dg * e / (1.0 + e) ** 2
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class ConeCutoffSpec:
    """Conic cutoff ``gamma`` of kind ``plus``, ``zero``, ``minus`` or ``star``.

    For ``plus``/``minus`` the ratio is ``+-xi3/|xi|`` and the symbol rises
    from 0 at ``inner_threshold`` to 1 at ``outer_threshold``.  For ``zero``
    the ratio is ``|xi3|/|xi|`` and the symbol falls from 1 at
    ``inner_threshold`` to 0 at ``outer_threshold``.  For ``star`` it rises
    in ``|xi3|/|xi|``.  The radial factor rises from 0 at ``radial_floor`` to
    1 at ``radial_plateau``; for ``zero`` it only switches the angular
    cutoff on, so ``gamma^0 = 1`` near the origin.
    """

    kind: str
    inner_threshold: float
    outer_threshold: float
    radial_floor: float
    radial_plateau: float

    def __post_init__(self):
        if self.kind not in ("plus", "zero", "minus", "star"):
            raise ValueError(f"unknown cone kind {self.kind!r}")
        if not 0 < self.inner_threshold < self.outer_threshold < 1:
            raise ValueError("thresholds must satisfy 0 < inner < outer < 1")
        if not 0 <= self.radial_floor < self.radial_plateau <= 1:
            raise ValueError("radial transition must sit inside [0, 1]")


PLUS = ConeCutoffSpec("plus", 4 / 9, 5 / 9, 0.5, 1.0)
MINUS = ConeCutoffSpec("minus", 4 / 9, 5 / 9, 0.5, 1.0)
ZERO = ConeCutoffSpec("zero", 2 / 3, 5 / 6, 0.5, 1.0)
STAR = ConeCutoffSpec("star", 1 / 6, 1 / 3, 1 / 3, 0.5)

_CONES = {"plus": PLUS, "minus": MINUS, "zero": ZERO, "star": STAR}


def cone(kind: str) -> ConeCutoffSpec:
    """Default cutoff of the given kind."""
    return _CONES[kind]


@dataclass(frozen=True)
class MultiplierSpec:
    """A named Fourier symbol.

    ``symbol_kind`` is one of ``lambda_s`` (``(1+|xi|^2)^{s/2}``),
    ``psi_s`` (``(1+xi3^2)^{s/2} gamma*``), ``cone``, ``smoother_S``
    (``chi(delta xi)``) or ``smoother_K`` (``omega(delta xi3) gamma^+``).
    Specs multiply with ``*`` into a ``product`` spec whose symbol is the
    pointwise product, e.g. ``Psi^s Gamma^+``.
    """

    symbol_kind: str
    s: float = 0.0
    delta: float = 0.0
    cone: ConeCutoffSpec | None = None
    factors: tuple = ()

    def __post_init__(self):
        kinds = ("lambda_s", "psi_s", "cone", "smoother_S", "smoother_K", "product")
        if self.symbol_kind not in kinds:
            raise ValueError(f"unknown symbol kind {self.symbol_kind!r}")
        if self.symbol_kind == "cone" and self.cone is None:
            raise ValueError("cone symbols need a ConeCutoffSpec")
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")
        if abs(self.s) > 64:
            raise ValueError("|s| > 64 overflows the lattice symbol")

    def __mul__(self, other: "MultiplierSpec") -> "MultiplierSpec":
        left = self.factors if self.symbol_kind == "product" else (self,)
        right = other.factors if other.symbol_kind == "product" else (other,)
        return MultiplierSpec("product", factors=left + right)


def _cone_symbol(c: ConeCutoffSpec, xi1, xi2, xi3):
    r = np.sqrt(xi1**2 + xi2**2 + xi3**2)
    safe = np.where(r > 0, r, 1.0)
    if c.kind == "plus":
        ratio = np.where(r > 0, xi3 / safe, 0.0)
    elif c.kind == "minus":
        ratio = np.where(r > 0, -xi3 / safe, 0.0)
    else:
        ratio = np.where(r > 0, np.abs(xi3) / safe, 0.0)
    width = c.outer_threshold - c.inner_threshold
    radial = smooth_step((r - c.radial_floor) / (c.radial_plateau - c.radial_floor))
    if c.kind == "zero":
        angular = smooth_step((c.outer_threshold - ratio) / width)
        return 1.0 - radial * (1.0 - angular)
    angular = smooth_step((ratio - c.inner_threshold) / width)
    return radial * angular


def _profile(x):
    # chi / omega profile: 1 for |x| <= 1, 0 for |x| >= 2
    return smooth_step(2.0 - np.abs(x))


def eval_symbol(spec: MultiplierSpec, xi1, xi2, xi3):
    """Evaluate a symbol at frequencies ``(xi1, xi2, xi3)`` (broadcastable).

    Examples
    --------
    >>> float(eval_symbol(MultiplierSpec("cone", cone=PLUS), 0.0, 0.0, 1.0))
    1.0
    """
    xi1, xi2, xi3 = (np.asarray(v, dtype=float) for v in (xi1, xi2, xi3))
    k = spec.symbol_kind
    if k == "lambda_s":
        out = (1.0 + xi1**2 + xi2**2 + xi3**2) ** (spec.s / 2)
    elif k == "psi_s":
        out = (1.0 + xi3**2) ** (spec.s / 2) * _cone_symbol(STAR, xi1, xi2, xi3)
    elif k == "cone":
        out = _cone_symbol(spec.cone, xi1, xi2, xi3)
    elif k == "smoother_S":
        d = spec.delta
        out = _profile(d * np.sqrt(xi1**2 + xi2**2 + xi3**2))
    elif k == "smoother_K":
        out = _profile(spec.delta * xi3) * _cone_symbol(PLUS, xi1, xi2, xi3)
    else:
        out = 1.0
        for f in spec.factors:
            out = out * eval_symbol(f, xi1, xi2, xi3)
    out = np.asarray(out, dtype=float)
    return out if out.ndim else float(out)


@lru_cache(maxsize=16)
def _table(grid: GridSpec, spec: MultiplierSpec) -> np.ndarray:
    xi1, xi2, xi3 = grid.freqs()
    tab = np.broadcast_to(eval_symbol(spec, xi1, xi2, xi3), grid.shape)
    if not np.all(np.isfinite(tab)):
        raise FloatingPointError(f"symbol {spec} is not finite on the lattice")
    tab = np.array(tab, dtype=float)
    tab.flags.writeable = False
    return tab


def make_multiplier(grid: GridSpec, spec: MultiplierSpec) -> np.ndarray:
    """Lattice table of ``spec`` in FFT order (cached, read-only)."""
    return _table(grid, spec)


def partition_floor(grid: GridSpec) -> float:
    """Minimum of ``gamma^+ + gamma^0 + gamma^-`` over lattice points with ``|xi| >= 1``.

    Raises
    ------
    ArithmeticError
        If the minimum is not positive.
    """
    tot = sum(make_multiplier(grid, MultiplierSpec("cone", cone=c)) for c in (PLUS, ZERO, MINUS))
    xi1, xi2, xi3 = grid.freqs()
    r = np.sqrt(xi1**2 + xi2**2 + xi3**2)
    mask = np.broadcast_to(r >= 1.0, grid.shape)
    floor = float(tot[mask].min())
    if floor <= 0:
        raise ArithmeticError(f"cone partition degenerates: floor {floor}")
    return floor


def psi_bounds(grid: GridSpec, s: float) -> tuple[float, float]:
    """Constants ``c, C`` with ``c Lambda^s gamma* <= psi^s <= C Lambda^s gamma*`` on the star support."""
    xi1, xi2, xi3 = grid.freqs()
    star = make_multiplier(grid, MultiplierSpec("cone", cone=STAR))
    lam = np.broadcast_to((1.0 + xi1**2 + xi2**2 + xi3**2) ** (s / 2), grid.shape)
    psi = make_multiplier(grid, MultiplierSpec("psi_s", s=s))
    m = star > 0
    q = psi[m] / (lam[m] * star[m])
    return float(q.min()), float(q.max())


def export_symbol_csv(grid: GridSpec, spec: MultiplierSpec, path) -> None:
    """Write ``(i, j, k, xi1, xi2, xi3, value)`` rows, lattice index centred at 0."""
    tab = make_multiplier(grid, spec)
    idx = [grid.freq_index(j) for j in range(3)]
    fx = [grid.freq_axis(j) for j in range(3)]
    order = [np.argsort(i) for i in idx]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["i", "j", "k", "xi1", "xi2", "xi3", "value"])
        for a in order[0]:
            for b in order[1]:
                for c in order[2]:
                    w.writerow([idx[0][a], idx[1][b], idx[2][c],
                                repr(float(fx[0][a])), repr(float(fx[1][b])),
                                repr(float(fx[2][c])), repr(float(tab[a, b, c]))])
