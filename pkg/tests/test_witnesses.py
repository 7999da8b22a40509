import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from heislab import heisenberg as H
from heislab.spectral import make_grid, norm, sample
from heislab.witnesses import (
    Cutoff, CutoffSpec, Ehrenpreis, GLambda, HLambda, Product, UDelta, WitnessSpec,
    appendix_product_log, companion_mu, dj_sequence, make_cutoff, make_ehrenpreis, make_g_lambda,
    make_h_lambda, make_u_delta, make_witness,
)

x, y, t = sp.symbols("x y t", real=True)
lam, d = sp.symbols("lambda delta", positive=True)


def lbar(f):
    z = x + sp.I * y
    return (sp.diff(f, x) + sp.I * sp.diff(f, y)) / 2 - sp.I * z * sp.diff(f, t)


def test_h_lambda_is_annihilated_by_lbar():
    h = sp.exp(-lam**2 * (x**2 + y**2 - sp.I * t))
    assert sp.simplify(lbar(h)) == 0


@pytest.mark.parametrize("p", [0, 1, 3])
def test_u_delta_is_annihilated_by_lbar(p):
    w = x**2 + y**2 - sp.I * t
    u = w**p * sp.log(w + d)
    assert sp.simplify(lbar(u)) == 0


@pytest.mark.parametrize("p,delta", [(1, 0.1), (2, 0.01), (3, 0.3)])
def test_center_derivative_matches_sympy(p, delta):
    tt = sp.symbols("tt")
    w = -sp.I * tt
    ref = complex(sp.diff(w**p * sp.log(w + sp.Float(delta, 30)), tt, p).subs(tt, 0).evalf(20))
    got = make_u_delta(delta, p).center_t_derivative()
    assert abs(got - ref) <= 1e-10 * abs(ref)


def test_u_delta_validation():
    with pytest.raises(ValueError):
        UDelta(0.0, 1)
    with pytest.raises(ValueError):
        UDelta(0.1, -1)


def test_cutoff_profile():
    spec = CutoffSpec(0.5)
    assert spec.eta(np.array([0.0, 1.0])).tolist() == [1.0, 1.0]
    assert spec.eta(2.0) == 0.0
    assert spec.tau(0.5) == 1.0 and spec.tau(1.0) == 0.0
    with pytest.raises(ValueError):
        CutoffSpec(0.0)


@given(st.floats(-1.9, 1.9))
def test_tau_prime_matches_difference(tv):
    spec = CutoffSpec(1.0)
    h = 1e-6
    fd = (spec.tau(tv + h) - spec.tau(tv - h)) / (2 * h)
    assert spec.tau_prime(tv) == pytest.approx(fd, rel=1e-5, abs=1e-8)


@given(st.floats(1.05, 1.95))
def test_eta_prime_matches_difference(r):
    spec = CutoffSpec(1.0)
    h = 1e-6
    fd = (spec.eta(r + h) - spec.eta(r - h)) / (2 * h)
    assert spec.eta_prime(r) == pytest.approx(fd, rel=1e-5, abs=1e-8)


def test_companion_mu_satisfies_L_rho_equals_zbar_mu():
    g = make_grid((2.5, 2.5, 2.5), (96, 96, 96))
    spec = CutoffSpec(1.0)
    rho = sample(g, make_cutoff(spec))
    mu = sample(g, companion_mu(spec))
    x1, x2, _ = g.coords()
    lhs = H.apply(H.FieldOpSpec("L"), rho)
    rhs = mu * (x1 - 1j * x2)
    assert norm(lhs - rhs) <= 1e-3 * norm(lhs)


def test_scaled_cutoff_support():
    c = Cutoff(CutoffSpec(1.0), 2.0)
    assert c(0.45, 0.0, 0.0) == 1.0 and c(1.0, 0.0, 0.0) == 0.0


def test_g_lambda_structure():
    g = make_g_lambda(4.0, CutoffSpec(0.5))
    assert g.mu == pytest.approx(32.0)
    v = g(0.01, 0.02, 0.3)
    assert abs(v) == pytest.approx(g.modulus(0.01, 0.02, 0.3))
    with pytest.raises(ValueError):
        make_g_lambda(0.0)


def test_h_lambda_and_product():
    h = make_h_lambda(2.0)
    assert h(0.0, 0.0, 0.0) == 1
    p = Product((h, Cutoff(CutoffSpec(1.0))))
    assert p(0.0, 0.0, 0.0) == 1 and p(0.0, 0.0, 3.0) == 0
    with pytest.raises(ValueError):
        make_h_lambda(-1)


@pytest.mark.parametrize("spec,cls", [
    (WitnessSpec("g", lam=3.0), GLambda), (WitnessSpec("h", lam=3.0), HLambda),
    (WitnessSpec("u_delta", delta=0.1, p=1), UDelta), (WitnessSpec("cutoff"), Cutoff),
    (WitnessSpec("ehrenpreis", N=4), Ehrenpreis),
])
def test_make_witness_dispatch(spec, cls):
    assert isinstance(make_witness(spec), cls)


@pytest.mark.parametrize("kw", [{"family": "q"}, {"family": "g"}, {"family": "ehrenpreis"}])
def test_witness_spec_validation(kw):
    with pytest.raises(ValueError):
        WitnessSpec(**kw)


# --- Ehrenpreis localizer ----------------------------------------------------

@pytest.mark.parametrize("N", [1, 4, 8])
def test_ehrenpreis_plateau_and_support(N):
    psi = make_ehrenpreis(N, e=0.5)
    assert psi(np.array([-1.0, 0.0, 1.0])).tolist() == pytest.approx([1.0, 1.0, 1.0])
    assert psi(np.array([-1.6, 1.6, 3.0])).tolist() == [0.0, 0.0, 0.0]
    ts = np.linspace(-2, 2, 401)
    v = psi(ts)
    assert v.min() >= -1e-15 and v.max() <= 1 + 1e-12


@pytest.mark.parametrize("r", [1, 2, 3])
def test_ehrenpreis_derivative_matches_difference(r):
    psi = make_ehrenpreis(4)
    ts = np.linspace(1.1, 1.9, 9)
    h = 1e-4
    fd = (psi.derivative(ts + h, r - 1) - psi.derivative(ts - h, r - 1)) / (2 * h)
    np.testing.assert_allclose(psi.derivative(ts, r), fd, rtol=1e-5, atol=1e-5 * np.abs(fd).max())


def test_ehrenpreis_max_derivative_against_dense_sampling():
    psi = make_ehrenpreis(4)
    ts = np.linspace(-2.01, 2.01, 40001)
    for r in (1, 2, 5):
        dense = np.abs(psi.derivative(ts, r)).max()
        # sampled at 200 points per knot interval, so exact to ~1e-6
        assert dense <= psi.max_derivative(r) * (1 + 1e-5)
        assert dense >= psi.max_derivative(r) * (1 - 1e-3)


def test_ehrenpreis_constants_are_uniform():
    cs = [make_ehrenpreis(N).normalized_constant(r) for N in (4, 8) for r in range(1, 2 * N + 1)]
    assert max(cs) <= 2 * float(np.median(cs))


def test_ehrenpreis_validation():
    with pytest.raises(ValueError):
        Ehrenpreis(0)
    assert Ehrenpreis(3).M == 8


# --- d_j and the appendix product -------------------------------------------

@given(st.one_of(st.fractions(min_value=Fraction(1, 1000), max_value=100),
                 st.floats(1e-3, 1e3)), st.integers(1, 60))
def test_dj_sequence_sums_exactly(dv, J):
    ds = dj_sequence(dv, J)
    assert sum(ds) == Fraction(dv)
    assert all(a > b > 0 for a, b in zip(ds, ds[1:])) or J == 1
    assert all(ds[j] / ds[0] == Fraction(1, (j + 1) ** 2) for j in range(J))


@pytest.mark.parametrize("args", [(1, 0), (0, 3), (-1, 3)])
def test_dj_sequence_validation(args):
    with pytest.raises(ValueError):
        dj_sequence(*args)


@pytest.mark.parametrize("p", [1, 8, 20, 50])  # the float product overflows beyond ~60
def test_appendix_product_log_matches_direct_product(p):
    jmax = 0
    while (4 / 3) ** (jmax + 1) <= p * (1 + 1e-12):
        jmax += 1
    direct = math.log(math.prod((j * j) ** (0.75**j * p) for j in range(1, jmax + 1)))
    assert appendix_product_log(p) == pytest.approx(direct, rel=1e-12, abs=1e-12)
    with pytest.raises(ValueError):
        appendix_product_log(0)
