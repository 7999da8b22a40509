"""Periodic 3-D grids, discrete Fourier transforms and Sobolev norms.

Coordinates are ``x1 = Re z``, ``x2 = Im z`` and ``x3 = t`` on the box
``[-R1, R1] x [-R2, R2] x [-R3, R3]`` sampled at ``x = -R + h j``.  The
forward transform carries the spatial cell measure ``h1 h2 h3`` and the
phase of the box origin, so that ``transform(u)`` approximates the
continuum integral ``int exp(-i x.xi) u(x) dx`` on the lattice
``xi_j = (pi / R_j) m``.  Frequency-domain inner products carry the lattice
cell measure ``prod 1 / (2 R_j)``, which makes Parseval exact.

Multiplication by the non-periodic coordinates ``z``, ``zbar`` or ``t`` is
only meaningful for fields that vanish near the boundary of the box;
:func:`support_check` guards that assumption.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
import scipy.fft as sfft

__all__ = [
    "GridSpec",
    "Field",
    "FrameShift",
    "SupportReport",
    "make_grid",
    "sample",
    "inner_product",
    "norm",
    "transform",
    "inverse_transform",
    "apply_symbol",
    "apply_multiplier",
    "sobolev_norm",
    "support_check",
    "translate_frame",
    "translate_rule",
    "derivative",
]

EvaluationRule = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on a centred box.

    Parameters
    ----------
    half_extents : tuple of float
        ``(R1, R2, R3)``.
    counts : tuple of int
        ``(N1, N2, N3)``, each even.
    """

    half_extents: tuple[float, float, float]
    counts: tuple[int, int, int]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.counts

    @property
    def spacings(self) -> tuple[float, float, float]:
        return tuple(2.0 * R / N for R, N in zip(self.half_extents, self.counts))

    @property
    def cell(self) -> float:
        """Spatial cell measure ``h1 h2 h3``."""
        return math.prod(self.spacings)

    @property
    def volume(self) -> float:
        return math.prod(2.0 * R for R in self.half_extents)

    @property
    def nyquist(self) -> tuple[float, float, float]:
        return tuple(math.pi / h for h in self.spacings)

    def axis(self, j: int) -> np.ndarray:
        """Node coordinates along axis ``j``."""
        R, N = self.half_extents[j], self.counts[j]
        return -R + (2.0 * R / N) * np.arange(N)

    def coords(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Broadcastable (sparse) coordinate arrays ``x1, x2, x3``."""
        return tuple(
            self.axis(j).reshape([-1 if i == j else 1 for i in range(3)])
            for j in range(3)
        )

    def freq_axis(self, j: int) -> np.ndarray:
        """Lattice frequencies along axis ``j`` in FFT order."""
        R, N = self.half_extents[j], self.counts[j]
        return (math.pi / R) * np.fft.fftfreq(N, 1.0 / N)

    def freq_index(self, j: int) -> np.ndarray:
        """Integer lattice index ``m`` along axis ``j`` in FFT order."""
        N = self.counts[j]
        return np.fft.fftfreq(N, 1.0 / N).astype(int)

    def freqs(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Broadcastable (sparse) frequency arrays ``xi1, xi2, xi3``."""
        return tuple(
            self.freq_axis(j).reshape([-1 if i == j else 1 for i in range(3)])
            for j in range(3)
        )

    @cached_property
    def _phase(self) -> np.ndarray:
        # exp(i R xi_m) = (-1)^m, separable over the three axes
        p = [(-1.0) ** (self.freq_index(j) % 2) for j in range(3)]
        return p[0][:, None, None] * p[1][None, :, None] * p[2][None, None, :]


def make_grid(half_extents, counts) -> GridSpec:
    """Build a :class:`GridSpec`.

    Raises
    ------
    ValueError
        For non-positive extents, odd counts or counts below 8.

    Examples
    --------
    >>> make_grid((4, 4, 4), (64, 64, 64)).spacings
    (0.125, 0.125, 0.125)
    """
    ext = tuple(float(R) for R in half_extents)
    cnt = tuple(int(N) for N in counts)
    if len(ext) != 3 or len(cnt) != 3:
        raise ValueError("need three extents and three counts")
    if any(not math.isfinite(R) or R <= 0 for R in ext):
        raise ValueError(f"half extents must be positive, got {ext}")
    if any(N < 8 or N % 2 for N in cnt):
        raise ValueError(f"counts must be even and >= 8, got {cnt}")
    if any(N != c for N, c in zip(cnt, counts)):
        raise ValueError(f"counts must be integers, got {counts}")
    return GridSpec(ext, cnt)


class Field:
    """Complex samples on a :class:`GridSpec`.

    Samples are stored read-only; arithmetic returns new fields.  Frequency
    fields are stored in FFT order.
    """

    __slots__ = ("grid", "samples", "domain")

    def __init__(self, grid: GridSpec, samples, domain: str = "spatial"):
        if domain not in ("spatial", "frequency"):
            raise ValueError(f"unknown domain tag {domain!r}")
        arr = np.array(samples, dtype=np.complex128)
        if arr.shape != grid.shape:
            arr = np.broadcast_to(arr, grid.shape).copy()
        if not np.all(np.isfinite(arr)):
            raise FloatingPointError("field samples contain NaN or Inf")
        arr.flags.writeable = False
        self.grid = grid
        self.samples = arr
        self.domain = domain

    def _check(self, other: "Field"):
        if other.grid != self.grid:
            raise ValueError("grid mismatch")
        if other.domain != self.domain:
            raise ValueError("domain tag mismatch")

    def _lift(self, other):
        if isinstance(other, Field):
            self._check(other)
            return other.samples
        return other

    def __add__(self, other):
        return Field(self.grid, self.samples + self._lift(other), self.domain)

    __radd__ = __add__

    def __sub__(self, other):
        return Field(self.grid, self.samples - self._lift(other), self.domain)

    def __rsub__(self, other):
        return Field(self.grid, self._lift(other) - self.samples, self.domain)

    def __mul__(self, other):
        return Field(self.grid, self.samples * self._lift(other), self.domain)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Field(self.grid, self.samples / self._lift(other), self.domain)

    def __neg__(self):
        return Field(self.grid, -self.samples, self.domain)

    def conj(self) -> "Field":
        return Field(self.grid, self.samples.conj(), self.domain)

    def __repr__(self):
        return f"Field({self.domain}, counts={self.grid.counts}, box={self.grid.half_extents})"


def sample(grid: GridSpec, rule: EvaluationRule) -> Field:
    """Evaluate a pointwise rule at the grid nodes.

    The rule receives broadcastable coordinate arrays ``(x1, x2, x3)``.
    """
    x1, x2, x3 = grid.coords()
    try:
        with np.errstate(all="raise", under="ignore"):
            vals = np.asarray(rule(x1, x2, x3), dtype=np.complex128)
    except (FloatingPointError, ValueError, ZeroDivisionError) as exc:
        with np.errstate(all="ignore"):
            vals = np.asarray(rule(x1, x2, x3), dtype=np.complex128)
        bad = np.argwhere(~np.isfinite(np.broadcast_to(vals, grid.shape)))
        if bad.size == 0:
            raise
        i, j, k = bad[0]
        node = (x1.ravel()[i], x2.ravel()[j], x3.ravel()[k])
        raise ValueError(f"rule {rule!r} failed at node {node}: {exc}") from exc
    return Field(grid, np.broadcast_to(vals, grid.shape))


def inner_product(u: Field, v: Field) -> complex:
    """Discrete L2 pairing ``(u, v)``, linear in ``u``."""
    u._check(v)
    w = u.grid.cell if u.domain == "spatial" else 1.0 / u.grid.volume
    return complex(w * np.vdot(v.samples, u.samples))


def norm(u: Field) -> float:
    w = u.grid.cell if u.domain == "spatial" else 1.0 / u.grid.volume
    return math.sqrt(w * float(np.vdot(u.samples, u.samples).real))


def transform(u: Field) -> Field:
    """Forward transform ``int exp(-i x.xi) u(x) dx`` on the lattice."""
    if u.domain != "spatial":
        raise ValueError("transform expects a spatial field")
    g = u.grid
    return Field(g, g.cell * g._phase * sfft.fftn(u.samples), "frequency")


def inverse_transform(uhat: Field) -> Field:
    if uhat.domain != "frequency":
        raise ValueError("inverse_transform expects a frequency field")
    g = uhat.grid
    return Field(g, sfft.ifftn(uhat.samples * g._phase) / g.cell, "spatial")


def apply_symbol(u: Field, table: np.ndarray) -> Field:
    """Apply a lattice symbol table (FFT order, broadcastable) to ``u``.

    The origin phase and cell measure cancel, so this is a plain
    ``ifftn(symbol * fftn(u))``.
    """
    if u.domain != "spatial":
        raise ValueError("multipliers act on spatial fields")
    table = np.asarray(table)
    if not np.all(np.isfinite(table)):
        raise FloatingPointError("symbol is not finite on the lattice")
    return Field(u.grid, sfft.ifftn(table * sfft.fftn(u.samples)))


def apply_multiplier(u: Field, spec) -> Field:
    """Apply the Fourier multiplier described by ``spec``.

    ``spec`` is a :class:`heislab.microlocal.MultiplierSpec` or an explicit
    lattice table.
    """
    if isinstance(spec, np.ndarray):
        return apply_symbol(u, spec)
    from .microlocal import make_multiplier

    return apply_symbol(u, make_multiplier(u.grid, spec))


def _weighted_norm(u: Field, weight2: np.ndarray) -> float:
    uh = sfft.fftn(u.samples)
    # |transform|^2 / V = cell^2 |fft|^2 / V = cell |fft|^2 / Ntot
    tot = float(np.sum(weight2 * (uh.real**2 + uh.imag**2)))
    return math.sqrt(u.grid.cell * tot / uh.size)


def sobolev_norm(u: Field, s: float, flavor: str = "lambda") -> float:
    """``||Lambda^s u||`` (flavor ``lambda``) or ``||Psi^s u||`` (``psi``)."""
    if u.domain != "spatial":
        raise ValueError("sobolev_norm expects a spatial field")
    from .microlocal import MultiplierSpec, make_multiplier

    if flavor == "lambda":
        kind = "lambda_s"
    elif flavor == "psi":
        kind = "psi_s"
    else:
        raise ValueError(f"unknown flavor {flavor!r}")
    if s == 0 and kind == "lambda_s":
        return norm(u)
    table = make_multiplier(u.grid, MultiplierSpec(kind, s=float(s)))
    return _weighted_norm(u, table**2)


def derivative(u: Field, axis: int, order: int = 1) -> Field:
    """Spectral partial derivative along one axis (1-D transforms only)."""
    xi = u.grid.freq_axis(axis)
    shape = [1, 1, 1]
    shape[axis] = -1
    mult = ((1j * xi) ** order).reshape(shape)
    return Field(u.grid, sfft.ifft(mult * sfft.fft(u.samples, axis=axis), axis=axis))


@dataclass(frozen=True)
class SupportReport:
    boundary_fraction: float
    margin_fraction: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.boundary_fraction <= self.tol

    def __bool__(self):
        return self.passed


def support_check(u: Field, margin_fraction: float = 0.1, tol: float = 1e-10) -> SupportReport:
    """Fraction of L2 mass within ``margin_fraction`` of the box boundary."""
    if not 0 < margin_fraction < 0.5:
        raise ValueError("margin_fraction must lie in (0, 0.5)")
    g = u.grid
    inner = np.ones(g.shape, dtype=bool)
    for j, x in enumerate(g.coords()):
        inner = inner & (np.abs(x) <= (1.0 - margin_fraction) * g.half_extents[j])
    m2 = u.samples.real**2 + u.samples.imag**2
    total = float(m2.sum())
    frac = 0.0 if total == 0.0 else float(m2[~inner].sum()) / total
    return SupportReport(frac, margin_fraction, tol)


@dataclass(frozen=True)
class FrameShift:
    """Heisenberg frame centred at ``(alpha, t0)``.

    The shifted coordinates are ``z^a = z - alpha`` and
    ``x3^a = -2 a2 x1 + 2 a1 x2 + x3 - t0``.
    """

    alpha: complex = 0j
    t0: float = 0.0

    def coordinates(self, x1, x2, x3):
        a1, a2 = self.alpha.real, self.alpha.imag
        return x1 - a1, x2 - a2, -2 * a2 * x1 + 2 * a1 * x2 + x3 - self.t0

    def source_points(self, y1, y2, y3):
        """Original coordinates of the point whose shifted coordinates are ``y``."""
        a1, a2 = self.alpha.real, self.alpha.imag
        return y1 + a1, y2 + a2, y3 + 2 * a2 * y1 - 2 * a1 * y2 + self.t0

    def inverse(self) -> "FrameShift":
        # composing x -> x^a with the shift by (-a, -t0) gives the identity
        return FrameShift(-complex(self.alpha), -self.t0)


def translate_rule(rule: EvaluationRule, shift: FrameShift) -> EvaluationRule:
    """Rule ``y -> rule(x(y))`` expressing ``rule`` in shifted coordinates."""

    def shifted(y1, y2, y3):
        return rule(*shift.source_points(y1, y2, y3))

    return shifted


def translate_frame(u: Field, shift: FrameShift, tol: float = 1e-10) -> Field:
    """Resample ``u`` in the shifted coordinates of ``shift``.

    The result ``v`` satisfies ``v(y) = u(x(y))``; the left-invariant
    operators ``L``, ``Lbar`` and ``T`` commute with this change of frame.
    Resampling is spectral: a phase shift in ``x1, x2`` followed by a
    column-dependent phase shift in ``t``.

    Raises
    ------
    ValueError
        If ``u`` or its translate puts mass in the boundary margin.
    """
    if not support_check(u, 0.1, tol):
        raise ValueError("field is not margin-supported before shifting")
    a1, a2 = shift.alpha.real, shift.alpha.imag
    g = u.grid
    xi1, xi2, xi3 = g.freqs()
    y1, y2, _ = g.coords()
    spec = sfft.fft2(u.samples, axes=(0, 1)) * np.exp(1j * (xi1 * a1 + xi2 * a2))
    v = sfft.ifft2(spec, axes=(0, 1))
    s = 2 * a2 * y1 - 2 * a1 * y2 + shift.t0
    v = sfft.ifft(sfft.fft(v, axis=2) * np.exp(1j * xi3 * s), axis=2)
    out = Field(g, v)
    if not support_check(out, 0.1, tol):
        raise ValueError("shifted field leaves the margin-supported region")
    return out
