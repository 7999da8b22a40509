"""Explicit test functions: cutoffs, CR witnesses and appendix localizers.

Every family is a closed-form pointwise rule ``rule(x1, x2, t)`` so it can be
sampled on any grid.  Rules are frozen dataclasses, hence hashable and
reproducible from their parameters.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np
from scipy.interpolate import BSpline

from .microlocal import smooth_step, smooth_step_derivative

__all__ = [
    "CutoffSpec",
    "WitnessSpec",
    "Cutoff",
    "CutoffMu",
    "GLambda",
    "HLambda",
    "UDelta",
    "Product",
    "Ehrenpreis",
    "make_cutoff",
    "companion_mu",
    "make_g_lambda",
    "make_h_lambda",
    "make_u_delta",
    "make_ehrenpreis",
    "make_witness",
    "dj_sequence",
    "appendix_product_log",
]


@dataclass(frozen=True)
class CutoffSpec:
    """``rho(z, t) = eta(|z|) tau(t)``.

    ``eta`` is 1 on ``|z| <= 1`` and 0 on ``|z| >= 2``; ``tau`` is 1 on
    ``|t| <= a`` and 0 on ``|t| >= 2a``.
    """

    a: float = 1.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("plateau half-width a must be positive")

    def eta(self, r):
        return smooth_step(2.0 - np.asarray(r, dtype=float))

    def eta_prime(self, r):
        return -smooth_step_derivative(2.0 - np.asarray(r, dtype=float))

    def tau(self, t):
        return smooth_step(2.0 - np.abs(np.asarray(t, dtype=float)) / self.a)

    def tau_prime(self, t):
        t = np.asarray(t, dtype=float)
        return -np.sign(t) / self.a * smooth_step_derivative(2.0 - np.abs(t) / self.a)


@dataclass(frozen=True)
class Cutoff:
    spec: CutoffSpec
    scale: float = 1.0  # rho(scale * z, t)

    def __call__(self, x1, x2, t):
        r = self.scale * np.sqrt(x1**2 + x2**2)
        return self.spec.eta(r) * self.spec.tau(t)


@dataclass(frozen=True)
class CutoffMu:
    """``mu = (D_z eta / zbar) tau + i eta tau'`` so that ``L rho = zbar mu``."""

    spec: CutoffSpec

    def __call__(self, x1, x2, t):
        r = np.sqrt(x1**2 + x2**2)
        # D_z eta(|z|) = eta'(r) zbar / (2r); eta' vanishes for r < 1
        q = np.where(r > 0.5, self.spec.eta_prime(r) / (2 * np.where(r > 0.5, r, 1.0)), 0.0)
        return q * self.spec.tau(t) + 1j * self.spec.eta(r) * self.spec.tau_prime(t)


@dataclass(frozen=True)
class HLambda:
    """``h = exp(-lam^2 (|z|^2 - i t))``; annihilated by ``Lbar``."""

    lam: float

    def __call__(self, x1, x2, t):
        return np.exp(-self.lam**2 * (x1**2 + x2**2 - 1j * t))


@dataclass(frozen=True)
class GLambda:
    """``g = rho(lam z, t) exp(-lam^{5/2} (|z|^2 - i t))``."""

    lam: float
    cutoff: CutoffSpec

    @property
    def mu(self) -> float:
        """Carrier exponent ``lam^{5/2}``; the t-frequency of ``g``."""
        return self.lam**2.5

    def modulus(self, x1, x2, t):
        return Cutoff(self.cutoff, self.lam)(x1, x2, t) * np.exp(-self.mu * (x1**2 + x2**2))

    def __call__(self, x1, x2, t):
        rho = Cutoff(self.cutoff, self.lam)(x1, x2, t)
        return rho * np.exp(-self.mu * (x1**2 + x2**2 - 1j * t))


@dataclass(frozen=True)
class UDelta:
    """``(|z|^2 - i t)^p log(|z|^2 + delta - i t)`` on the principal branch.

    The logarithm is real on real arguments, and ``Lbar`` annihilates it since
    ``|z|^2 - i t`` is the boundary value of ``-z_2``.
    """

    delta: float
    p: int

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if self.p < 0:
            raise ValueError("p must be nonnegative")

    def __call__(self, x1, x2, t):
        w = x1**2 + x2**2 - 1j * np.asarray(t)
        return w**self.p * np.log(w + self.delta)

    def center_t_derivative(self, radius: float | None = None, n: int = 64) -> complex:
        """``d^p/dt^p u(0, 0, t)`` at ``t = 0`` by a Cauchy contour in complex ``t``.

        The singularity sits at ``t = -i delta``; the default radius
        ``delta / 2`` gives trapezoid error of order ``2^-n``.
        """
        rho = self.delta / 2 if radius is None else radius
        th = 2 * np.pi * np.arange(n) / n
        tc = rho * np.exp(1j * th)
        f = self(0.0, 0.0, tc)
        return complex(math.factorial(self.p) * np.mean(f * np.exp(-1j * self.p * th)) / rho**self.p)


@dataclass(frozen=True)
class Product:
    """Pointwise product of rules, e.g. ``rho * h``."""

    factors: tuple

    def __call__(self, x1, x2, t):
        out = 1.0
        for f in self.factors:
            out = out * f(x1, x2, t)
        return out


@dataclass(frozen=True)
class Ehrenpreis:
    """1-D localizer ``psi = 1_I * B^{*M}`` with ``M = 2N + 2`` boxes of width ``e/M``.

    ``psi`` equals 1 on ``[-core, core]`` and vanishes outside
    ``[-core - e, core + e]``.  Its ``r``-th derivative, ``r >= 1``, is a
    difference of two non-overlapping translates of the ``(r-1)``-th
    derivative of ``B^{*M}``, so
    ``max|psi^(r)| = (M/e)^r max|N_M^(r-1)|`` with ``N_M`` the cardinal
    B-spline of order ``M``.
    """

    N: int
    e: float = 1.0
    core: float = 1.0

    def __post_init__(self):
        if self.N < 1 or not self.e > 0 or not self.core > 0:
            raise ValueError("need N >= 1, e > 0, core > 0")

    @property
    def M(self) -> int:
        return 2 * self.N + 2

    @cached_property
    def _basis(self):
        return BSpline.basis_element(np.arange(self.M + 1, dtype=float), extrapolate=False)

    @cached_property
    def _cdf(self):
        return self._basis.antiderivative()

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        half = self.core + self.e / 2
        F = self._cdf
        M = self.M

        def cdf(s):
            x = s / (self.e / M) + M / 2
            return np.where(x <= 0, 0.0, np.where(x >= M, 1.0, np.nan_to_num(F(np.clip(x, 0, M)))))

        return cdf(t + half) - cdf(t - half)

    def derivative(self, t, r: int):
        """``psi^(r)(t)`` evaluated exactly from the B-spline representation."""
        if r == 0:
            return self(t)
        t = np.asarray(t, dtype=float)
        half = self.core + self.e / 2
        b = self._basis.derivative(r - 1) if r > 1 else self._basis
        w = self.e / self.M

        def piece(s):
            x = s / w + self.M / 2
            return np.nan_to_num(b(x)) / w**r

        return piece(t + half) - piece(t - half)

    def max_derivative(self, r: int, per_unit: int = 200) -> float:
        """``max |psi^(r)|`` sampled on ``per_unit`` points per knot interval."""
        if r == 0:
            return 1.0
        b = self._basis.derivative(r - 1) if r > 1 else self._basis
        xs = np.linspace(0, self.M, self.M * per_unit + 1)
        return float(np.nanmax(np.abs(b(xs)))) * (self.M / self.e) ** r

    def normalized_constant(self, r: int) -> float:
        """Smallest ``C`` with ``max|psi^(r)| <= (C/e)^{r+1} N^r``."""
        q = self.max_derivative(r) * self.e ** (r + 1) / self.N**r
        return q ** (1.0 / (r + 1))


@dataclass(frozen=True)
class WitnessSpec:
    """Family selector with the parameters each family needs."""

    family: str
    lam: float | None = None
    delta: float | None = None
    p: int = 0
    k: int = 0
    cutoff: CutoffSpec = CutoffSpec()
    N: int | None = None
    e: float = 1.0

    def __post_init__(self):
        need = {"g": ("lam",), "h": ("lam",), "u_delta": ("delta",),
                "cutoff": (), "ehrenpreis": ("N",)}
        if self.family not in need:
            raise ValueError(f"unknown family {self.family!r}")
        for name in need[self.family]:
            if getattr(self, name) is None:
                raise ValueError(f"family {self.family} needs {name}")


def make_cutoff(spec: CutoffSpec) -> Cutoff:
    """``rho`` as a pointwise rule.

    Examples
    --------
    >>> float(make_cutoff(CutoffSpec(1.0))(0.0, 0.0, 0.0))
    1.0
    """
    return Cutoff(spec)


def companion_mu(spec: CutoffSpec) -> CutoffMu:
    return CutoffMu(spec)


def make_g_lambda(lam: float, cutoff: CutoffSpec = CutoffSpec()) -> GLambda:
    if not lam > 0:
        raise ValueError("lambda must be positive")
    return GLambda(float(lam), cutoff)


def make_h_lambda(lam: float) -> HLambda:
    if not lam > 0:
        raise ValueError("lambda must be positive")
    return HLambda(float(lam))


def make_u_delta(delta: float, p: int) -> UDelta:
    return UDelta(float(delta), int(p))


def make_ehrenpreis(N: int, e: float = 1.0, core: float = 1.0) -> Ehrenpreis:
    return Ehrenpreis(int(N), float(e), float(core))


def make_witness(spec: WitnessSpec):
    """Dispatch a :class:`WitnessSpec` to its rule."""
    if spec.family == "g":
        return make_g_lambda(spec.lam, spec.cutoff)
    if spec.family == "h":
        return make_h_lambda(spec.lam)
    if spec.family == "u_delta":
        return make_u_delta(spec.delta, spec.p)
    if spec.family == "cutoff":
        return make_cutoff(spec.cutoff)
    return make_ehrenpreis(spec.N, spec.e)


def dj_sequence(d, J: int) -> list[Fraction]:
    """Distances ``d_j`` proportional to ``1/(j+1)^2``, ``j = 0..J-1``, summing to ``d`` exactly.

    Floats are converted exactly (``Fraction(0.1)`` is the binary value).

    Examples
    --------
    >>> sum(dj_sequence(1, 5))
    Fraction(1, 1)
    """
    if J < 1:
        raise ValueError("J must be at least 1")
    d = Fraction(d)
    if d <= 0:
        raise ValueError("d must be positive")
    w = [Fraction(1, (j + 1) ** 2) for j in range(J)]
    tot = sum(w)
    return [d * x / tot for x in w]


def appendix_product_log(p: int) -> float:
    """``log prod_{1 <= j <= log_{4/3} p} (j^2)^{(3/4)^j p}``."""
    if p < 1:
        raise ValueError("p must be positive")
    jmax = int(math.floor(math.log(p) / math.log(4 / 3) + 1e-12))
    return sum(2 * p * 0.75**j * math.log(j) for j in range(1, jmax + 1))
