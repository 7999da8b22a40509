"""Independent closed-form and quadrature values for the witness families."""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import integrate

from ..witnesses import CutoffSpec

__all__ = ["tau_moments", "g_plateau_oracle", "g_quadrature_oracle", "prop2_center_coefficient",
           "ek_u_delta_expr", "derivative_sup"]


@lru_cache(maxsize=None)
def tau_moments(a: float) -> tuple[float, float]:
    """``(||tau||^2, ||tau'||^2)`` over the real line."""
    c = CutoffSpec(a)
    pts = [-a, a]
    t2 = integrate.quad(lambda t: float(c.tau(t)) ** 2, -2 * a, 2 * a, points=pts, limit=400,
                        epsabs=0, epsrel=1e-13)[0]
    tp2 = integrate.quad(lambda t: float(c.tau_prime(t)) ** 2, -2 * a, 2 * a, points=pts, limit=400,
                         epsabs=0, epsrel=1e-13)[0]
    return t2, tp2


def g_plateau_oracle(lam: float, a: float, k: int) -> dict:
    """Gaussian integrals for ``g_lambda`` with ``eta`` replaced by 1.

    With ``mu = lam^{5/2}``:
    ``||g||^2 = pi/(2mu) ||tau||^2``,
    ``||zbar^k L g||^2 = pi (k+1)!/(2mu)^{k+2} (4mu^2 ||tau||^2 + ||tau'||^2)``,
    ``||Lbar g||^2 = pi ||tau'||^2 / (4mu^2)``.
    The last one is not plateau dominated: the ``eta`` transition contributes
    at relative size ``~ exp(-2 sqrt(lam)) mu^2``.
    """
    mu = lam**2.5
    t2, tp2 = tau_moments(a)
    return {
        "norm2": math.pi / (2 * mu) * t2,
        "X1k2": math.pi * math.factorial(k + 1) / (2 * mu) ** (k + 2) * (4 * mu**2 * t2 + tp2),
        "Lbar2": math.pi * tp2 / (4 * mu**2),
    }


def g_quadrature_oracle(lam: float, a: float, k: int) -> dict:
    """Exact separable integrals for ``g_lambda`` including the ``eta`` transition.

    ``L g = zbar [(lam eta'(lam r)/(2r) - 2 mu eta) tau + i eta tau'] e`` and
    ``Lbar g = z [(lam eta'(lam r)/(2r)) tau - i eta tau'] e`` with
    ``|e| = exp(-mu r^2)``; the cross terms are imaginary and drop out.
    """
    mu = lam**2.5
    c = CutoffSpec(a)
    t2, tp2 = tau_moments(a)
    rmax = 2.0 / lam
    pts = [1.0 / lam]

    def rad(f):
        return 2 * math.pi * integrate.quad(lambda r: f(r) * math.exp(-2 * mu * r * r), 0, rmax,
                                            points=pts, limit=400, epsabs=0, epsrel=1e-12)[0]

    def eta(r):
        return float(c.eta(lam * r))

    def deta(r):
        return float(c.eta_prime(lam * r)) * lam / (2 * r) if r > 0 else 0.0

    norm2 = rad(lambda r: r * eta(r) ** 2) * t2
    x1k = (rad(lambda r: r ** (2 * k + 3) * (deta(r) - 2 * mu * eta(r)) ** 2) * t2
           + rad(lambda r: r ** (2 * k + 3) * eta(r) ** 2) * tp2)
    lbar = rad(lambda r: r**3 * deta(r) ** 2) * t2 + rad(lambda r: r**3 * eta(r) ** 2) * tp2
    return {"norm2": norm2, "X1k2": x1k, "Lbar2": lbar}


@lru_cache(maxsize=None)
def prop2_center_coefficient(p: int) -> float:
    """Symbolic ``|d^p/dt^p [(-i t)^p log(delta - i t)]_{t=0}| / log(1/delta)``."""
    import sympy as sp

    t = sp.Symbol("t", real=True)
    d = sp.Symbol("delta", positive=True)
    expr = (-sp.I * t) ** p * sp.log(d - sp.I * t)
    val = sp.diff(expr, t, p).subs(t, 0)
    coef = sp.simplify(val / sp.log(d))
    if coef.free_symbols:
        raise ArithmeticError(f"center derivative is not proportional to log(delta): {val}")
    return float(sp.Abs(coef))


@lru_cache(maxsize=None)
def ek_u_delta_expr(p: int, k: int):
    """Symbolic ``E_k u_delta`` in real variables ``(x, y, t, delta)``.

    Built by applying the vector fields to the closed form of ``u_delta``;
    returns ``(expr, (x, y, t, delta))``.
    """
    import sympy as sp

    x, y, t = sp.symbols("x y t", real=True)
    d = sp.Symbol("delta", positive=True)
    z, zb = x + sp.I * y, x - sp.I * y

    def dz(f):
        return (sp.diff(f, x) - sp.I * sp.diff(f, y)) / 2

    def dzb(f):
        return (sp.diff(f, x) + sp.I * sp.diff(f, y)) / 2

    def L(f):
        return dz(f) + sp.I * zb * sp.diff(f, t)

    def Lb(f):
        return dzb(f) - sp.I * z * sp.diff(f, t)

    w = x**2 + y**2 - sp.I * t
    u = w**p * sp.log(w + d)
    ek = -Lb((x**2 + y**2) ** k * L(u)) - L(Lb(u))
    return ek, (x, y, t, d)


@lru_cache(maxsize=None)
def _derivative_funcs(p: int, k: int):
    import itertools

    import sympy as sp

    expr, (x, y, t, d) = ek_u_delta_expr(p, k)
    order = p + k - 1
    variables = (x, y, t)
    # D^b from D^{b - e_i}, so every partial is differentiated once
    memo = {(0, 0, 0): expr}
    funcs = []
    for b in sorted(itertools.product(range(order + 1), repeat=3), key=lambda b: (sum(b), b)):
        if sum(b) > order:
            continue
        if b not in memo:
            i = next(j for j in range(3) if b[j])
            prev = tuple(b[j] - (j == i) for j in range(3))
            memo[b] = sp.diff(memo[prev], variables[i])
        funcs.append(sp.lambdify((x, y, t, d), memo[b], "numpy", cse=True))
    return tuple(funcs)


def derivative_sup(p: int, k: int, deltas, points) -> np.ndarray:
    """``max_{|beta| <= p+k-1} max_points |D^beta E_k u_delta|`` for each delta.

    ``points`` is an ``(n, 3)`` array of ``(x, y, t)``.
    """
    pts = np.asarray(points, dtype=float)
    out = np.zeros(len(deltas))
    for f in _derivative_funcs(p, k):
        for i, dl in enumerate(deltas):
            v = np.abs(np.asarray(f(pts[:, 0], pts[:, 1], pts[:, 2], dl), dtype=complex))
            if not np.all(np.isfinite(v)):
                raise ArithmeticError(f"non-finite derivative of E_k u_delta at delta={dl}")
            out[i] = max(out[i], float(np.max(np.broadcast_to(v, pts.shape[:1]))))
    return out
