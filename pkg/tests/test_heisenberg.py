import math

import numpy as np
import pytest

from heislab import heisenberg as H
from heislab import ncalg
from heislab.spectral import Field, make_grid, norm, sample
from heislab.witnesses import make_h_lambda

OPS = [H.FieldOpSpec("L"), H.FieldOpSpec("Lbar"), H.FieldOpSpec("T"), H.FieldOpSpec("X2"),
       H.FieldOpSpec("X1k", 1), H.FieldOpSpec("X1k", 2), H.FieldOpSpec("Ek", 1), H.FieldOpSpec("Ek", 2)]


@pytest.mark.parametrize("kind,k", [("Q", 0), ("L", -1)])
def test_field_op_spec_validation(kind, k):
    with pytest.raises(ValueError):
        H.FieldOpSpec(kind, k)


@pytest.mark.parametrize("op", OPS, ids=lambda o: f"{o.kind}{o.k}")
def test_adjoints_are_exact_on_the_lattice(op, bumps48):
    u, v = bumps48[0], bumps48[1]
    assert H.adjoint_defect(op, u, v) <= 1e-12


def test_energy_identity(bumps48):
    for u in bumps48:
        assert H.energy_defect(u) <= 1e-7


# products of coordinates and derivatives obey the Leibniz rule only up to
# resolution; 48^3 gives ~1e-7 here, the 64^3 bound of 1e-9 is an acceptance check


def test_commutator_L_Lbar_is_2T(bumps48):
    two_t = lambda u: 2 * H.apply(H.FieldOpSpec("T"), u)
    for u in bumps48:
        assert H.commutator_defect(H.FieldOpSpec("L"), H.FieldOpSpec("Lbar"), two_t, u) <= 1e-6


@pytest.mark.parametrize("k", [0, 1, 2])
def test_form_identity_and_sign(k, bumps48):
    for u in bumps48:
        lhs, rhs = H.form_value(u, k)
        assert rhs >= 0
        assert lhs == pytest.approx(rhs, rel=1e-10)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_ek_matches_its_normal_ordered_expansion(k, bumps48):
    u = bumps48[2]
    a = H.apply_Ek(u, k)
    b = H.evaluate(ncalg.ek_expand(k), u)
    assert norm(a - b) <= 1e-4 * norm(a)


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_ek_h_lambda_sign_is_positive(k):
    # e^{i lam^2 t} is periodic on t in [-pi, pi] for lam = 2; |z| <= 3 holds the z-tail
    lam = 2.0
    g = make_grid((3.0, 3.0, math.pi), (64, 64, 32))
    h = sample(g, make_h_lambda(lam))
    ek = H.apply_Ek(h, k, strict=False).samples
    x1, x2, _ = g.coords()
    r2 = np.broadcast_to(x1**2 + x2**2, g.shape)
    inner = r2 <= 1.0
    expected = 2 * (k + 1) * lam**2 * r2**k * h.samples
    err = np.abs(ek - expected)[inner].max() / np.abs(h.samples).max()
    assert err <= 1e-9


def test_strict_guard(grid32):
    wide = sample(grid32, lambda x1, x2, x3: np.exp(-(x1**2 + x2**2 + x3**2) / 9))
    with pytest.raises(ValueError, match="boundary margin"):
        H.apply(H.FieldOpSpec("L"), wide)
    H.apply(H.FieldOpSpec("L"), wide, strict=False)
    # T multiplies by nothing, so it needs no guard
    H.apply(H.FieldOpSpec("T"), wide)


def test_frequency_fields_are_rejected(bumps48):
    from heislab.spectral import transform

    with pytest.raises(ValueError):
        H.apply(H.FieldOpSpec("L"), transform(bumps48[0]))


def test_numeric_commutator_of_callables_and_exprs(bumps48):
    u = bumps48[0]
    c1 = H.numeric_commutator(ncalg.L, ncalg.LB, u)
    c2 = H.numeric_commutator(H.FieldOpSpec("L"), lambda v: H.apply(H.FieldOpSpec("Lbar"), v, strict=False), u)
    assert norm(c1 - c2) <= 1e-12 * norm(c1)


def test_evaluate_rejects_phi_and_missing_lam2(bumps48):
    with pytest.raises(ValueError):
        H.evaluate(ncalg.phi(0), bumps48[0])
    with pytest.raises(ValueError):
        H.evaluate(ncalg.LAM2 * ncalg.T, bumps48[0])
    out = H.evaluate(ncalg.LAM2 * ncalg.T, bumps48[0], lam2=3.0)
    ref = 3.0 * H.apply(H.FieldOpSpec("T"), bumps48[0])
    assert norm(out - ref) <= 1e-14 * norm(ref)


def test_zero_field_has_zero_defects(grid32):
    z = Field(grid32, 0.0)
    assert H.energy_defect(z) == 0.0
    assert H.adjoint_defect(H.FieldOpSpec("L"), z, z) == 0.0
