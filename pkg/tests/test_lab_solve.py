import numpy as np
import pytest
from hypothesis import given, strategies as st

from heislab import heisenberg as H
from heislab.lab.solve import (
    CENTRED, ConvergenceError, EkSystem, SOLVE_BOX, SOLVE_GRID, _fields, conjugate_gradient, regularization_scale,
)
from heislab.spectral import Field, make_grid, sample


def _spd(n, seed, cond=50.0):
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return q @ np.diag(np.geomspace(1, cond, n)) @ q.T


@given(st.integers(0, 10_000))
def test_cg_solves_spd_with_monotone_energy(seed):
    A = _spd(30, seed)
    b = np.random.default_rng(seed + 1).standard_normal(30)
    res = conjugate_gradient(lambda v: A @ v, b.astype(complex), rtol=1e-12, maxiter=200)
    assert res.converged
    assert np.allclose(res.x.real, np.linalg.solve(A, b), atol=1e-9)
    assert res.energy_increase() <= 1e-10


def test_ritz_extremes_bracket_spectrum():
    A = _spd(40, 3, cond=200.0)
    res = conjugate_gradient(lambda v: A @ v, np.ones(40, complex), rtol=1e-14, maxiter=400)
    lo, hi = res.ritz_extremes()
    ev = np.linalg.eigvalsh(A)
    assert ev[0] - 1e-8 <= lo and hi <= ev[-1] + 1e-8
    assert hi == pytest.approx(ev[-1], rel=1e-3)


def test_zero_rhs():
    res = conjugate_gradient(lambda v: v, np.zeros(4, complex))
    assert res.converged and res.residual == 0 and res.iterations == 0


@pytest.fixture(scope="module")
def small():
    g = make_grid(SOLVE_BOX, SOLVE_GRID)
    return g, dict(_fields(g, 0, 0))["h_2.25"]


def test_regularization_scale():
    assert regularization_scale(make_grid((2.0, 1.0, 4.0), (8, 8, 8))) == pytest.approx((np.pi / 4) ** 2)


def test_known_solution_is_recovered(small):
    g, v = small
    sysk = EkSystem(g, 1)
    f = Field(g, H.apply_Ek(v, 1, strict=False).samples)
    res = sysk.solve(f)
    assert res.residual <= 1e-8 and res.energy_increase() <= 1e-10
    err = np.linalg.norm(res.x - v.samples) / np.linalg.norm(v.samples)
    assert err <= 1e-6
    assert np.allclose(sysk.scipy_solve(f), res.x, atol=1e-8 * np.abs(res.x).max())


def test_iteration_cap_raises_with_diagnosis(small):
    g, v = small
    f = Field(g, H.apply_Ek(v, 2, strict=False).samples)
    with pytest.raises(ConvergenceError, match="condition"):
        EkSystem(g, 2).solve(f, maxiter=3)


def test_nonzero_mean_forcing_is_rejected(small):
    g, _ = small
    bump = sample(g, CENTRED)
    with pytest.raises(ValueError, match="mean"):
        EkSystem(g, 1).solve(bump)


def test_k_zero_is_rejected(small):
    with pytest.raises(ValueError):
        EkSystem(small[0], 0)
