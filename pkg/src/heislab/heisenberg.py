"""Heisenberg vector fields as spectral grid operators.

    L  = d/dz    + i zbar d/dt,      Lbar = d/dzbar - i z d/dt,
    T  = -i d/dt,  X_1k = zbar^k L,  X_2 = Lbar,
    E_k = -Lbar |z|^{2k} L - L Lbar.

Derivatives are spectral, coordinate multiplications are pointwise.  The
coordinate factors are not periodic, so operators that multiply by ``z``
refuse fields with mass near the box boundary unless ``strict=False``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from . import ncalg
from .spectral import Field, inner_product, norm, sobolev_norm, support_check

__all__ = [
    "FieldOpSpec",
    "apply",
    "apply_Ek",
    "adjoint_of",
    "adjoint_defect",
    "energy_defect",
    "form_value",
    "numeric_commutator",
    "commutator_defect",
    "evaluate",
]

KINDS = ("L", "Lbar", "T", "X1k", "X2", "Ek")


@dataclass(frozen=True)
class FieldOpSpec:
    """Operator selector; ``k`` is used by ``X1k`` and ``Ek``."""

    kind: str
    k: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.k < 0:
            raise ValueError("k must be nonnegative")


def _z(u: Field):
    x1, x2, _ = u.grid.coords()
    return x1 + 1j * x2


def _dz_pair(a: np.ndarray, grid):
    """``(d/dz a, d/dzbar a)`` via one 2-D transform."""
    xi1, xi2, _ = grid.freqs()
    ah = sfft.fft2(a, axes=(0, 1))
    # d/dz <-> (i xi1 + xi2) / 2, d/dzbar <-> (i xi1 - xi2) / 2
    dz = sfft.ifft2(0.5 * (1j * xi1 + xi2) * ah, axes=(0, 1))
    dzb = sfft.ifft2(0.5 * (1j * xi1 - xi2) * ah, axes=(0, 1))
    return dz, dzb


def _dt(a: np.ndarray, grid):
    xi3 = grid.freq_axis(2)
    return sfft.ifft(1j * xi3 * sfft.fft(a, axis=2), axis=2)


def _L(a, grid, z):
    dz, _ = _dz_pair(a, grid)
    return dz + 1j * np.conj(z) * _dt(a, grid)


def _Lbar(a, grid, z):
    _, dzb = _dz_pair(a, grid)
    return dzb - 1j * z * _dt(a, grid)


def _L_Lbar(a, grid, z):
    dz, dzb = _dz_pair(a, grid)
    at = _dt(a, grid)
    return dz + 1j * np.conj(z) * at, dzb - 1j * z * at


def _guard(u: Field, strict: bool):
    if strict and not support_check(u, 0.1, 1e-10):
        raise ValueError("coordinate-multiplying operator applied to a field "
                         "with mass in the boundary margin (use strict=False to override)")


def apply(op: FieldOpSpec, u: Field, strict: bool = True) -> Field:
    """Apply ``op`` to ``u``.

    Raises
    ------
    ValueError
        In strict mode, when ``op`` multiplies by ``z`` and ``u`` is not
        margin-supported.
    """
    if u.domain != "spatial":
        raise ValueError("operators act on spatial fields")
    g, a = u.grid, u.samples
    if op.kind == "T":
        return Field(g, -1j * _dt(a, g))
    _guard(u, strict)
    z = _z(u)
    if op.kind == "L":
        out = _L(a, g, z)
    elif op.kind in ("Lbar", "X2"):
        out = _Lbar(a, g, z)
    elif op.kind == "X1k":
        out = np.conj(z) ** op.k * _L(a, g, z)
    else:
        return apply_Ek(u, op.k, strict=False)
    return Field(g, out)


def apply_Ek(u: Field, k: int, strict: bool = True) -> Field:
    """``E_k u = -Lbar(|z|^{2k} L u) - L(Lbar u)``."""
    _guard(u, strict)
    g, z = u.grid, _z(u)
    Lu, Lbu = _L_Lbar(u.samples, g, z)
    w = np.abs(z) ** (2 * k) * Lu
    return Field(g, -_Lbar(w, g, z) - _L(Lbu, g, z))


def adjoint_of(op: FieldOpSpec):
    """Claimed adjoint as a callable ``u -> Field``."""
    if op.kind == "L":
        return lambda v: -apply(FieldOpSpec("Lbar"), v)
    if op.kind in ("Lbar", "X2"):
        return lambda v: -apply(FieldOpSpec("L"), v)
    if op.kind == "T":
        return lambda v: apply(op, v)
    if op.kind == "X1k":
        return lambda v: -apply(FieldOpSpec("Lbar"), v * _z(v) ** op.k)
    return lambda v: apply_Ek(v, op.k)


def adjoint_defect(op: FieldOpSpec, u: Field, v: Field) -> float:
    """``|(op u, v) - (u, op^+ v)| / (||op u|| ||v|| + ||u|| ||op^+ v||)``."""
    Au, Bv = apply(op, u), adjoint_of(op)(v)
    scale = norm(Au) * norm(v) + norm(u) * norm(Bv)
    if scale == 0:
        return 0.0
    return abs(inner_product(Au, v) - inner_product(u, Bv)) / scale


def energy_defect(u: Field) -> float:
    """Relative defect of ``||Lu||^2 = 2 (Tu, u) + ||Lbar u||^2``, scaled by ``||u||_1^2``.

    Raises
    ------
    ArithmeticError
        If ``(Tu, u)`` has a non-negligible imaginary part.
    """
    s1 = sobolev_norm(u, 1.0)
    if s1 == 0:
        return 0.0
    Lu = apply(FieldOpSpec("L"), u)
    Lbu = apply(FieldOpSpec("Lbar"), u)
    tuu = inner_product(apply(FieldOpSpec("T"), u), u)
    if abs(tuu.imag) > 1e-12 * s1**2:
        raise ArithmeticError(f"(Tu, u) is not real: {tuu}")
    return abs(norm(Lu) ** 2 - 2 * tuu.real - norm(Lbu) ** 2) / s1**2


def form_value(u: Field, k: int) -> tuple[float, float]:
    """``(Re (E_k u, u), ||zbar^k L u||^2 + ||Lbar u||^2)``."""
    lhs = inner_product(apply_Ek(u, k), u).real
    rhs = norm(apply(FieldOpSpec("X1k", k), u)) ** 2 + norm(apply(FieldOpSpec("Lbar"), u)) ** 2
    return lhs, rhs


def _as_callable(op):
    # inputs are guarded once by the caller; intermediates are not re-checked
    if isinstance(op, FieldOpSpec):
        return lambda u: apply(op, u, strict=False)
    if isinstance(op, ncalg.NCExpr):
        return lambda u: evaluate(op, u, strict=False)
    return op


def numeric_commutator(opA, opB, u: Field, strict: bool = True) -> Field:
    """``A(B u) - B(A u)``; operators may be specs, NC expressions or callables."""
    _guard(u, strict)
    A, B = _as_callable(opA), _as_callable(opB)
    return A(B(u)) - B(A(u))


def commutator_defect(opA, opB, expected, u: Field, strict: bool = True) -> float:
    """``||[A, B]u - expected u|| / (||ABu|| + ||BAu||)``."""
    _guard(u, strict)
    A, B, C = _as_callable(opA), _as_callable(opB), _as_callable(expected)
    ab, ba = A(B(u)), B(A(u))
    scale = norm(ab) + norm(ba)
    return 0.0 if scale == 0 else norm(ab - ba - C(u)) / scale


def evaluate(expr: ncalg.NCExpr, u: Field, lam2: float | None = None, strict: bool = True) -> Field:
    """Apply an :class:`~heislab.ncalg.NCExpr` word by word (rightmost first).

    ``Phi`` factors are not supported; ``lam2`` must be given when the
    expression depends on it.
    """
    _guard(u, strict)
    g = u.grid
    z = _z(u)
    acc = np.zeros(g.shape, dtype=complex)
    for (deg, word), c in expr.terms.items():
        if deg and lam2 is None:
            raise ValueError("expression depends on lam2")
        a = u.samples
        for gen in reversed(word):
            r = gen[0]
            if r == ncalg._Z:
                a = z * a
            elif r == ncalg._ZB:
                a = np.conj(z) * a
            elif r == ncalg._T:
                a = -1j * _dt(a, g)
            elif r == ncalg._L:
                a = _L(a, g, z)
            elif r == ncalg._LB:
                a = _Lbar(a, g, z)
            else:
                raise ValueError("Phi factors cannot be evaluated on the grid")
        acc = acc + float(c) * (lam2**deg if deg else 1.0) * a
    return Field(g, acc)
