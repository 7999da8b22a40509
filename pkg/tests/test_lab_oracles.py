import math

import numpy as np
import pytest

from heislab.lab import oracles
from heislab.witnesses import make_u_delta


def test_tau_moments_scale_with_plateau():
    t1, p1 = oracles.tau_moments(1.0)
    t2, p2 = oracles.tau_moments(2.0)
    assert t2 == pytest.approx(2 * t1, rel=1e-12)
    assert p2 == pytest.approx(p1 / 2, rel=1e-12)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_quadrature_and_plateau_oracles_agree_where_the_plateau_dominates(k):
    # the plateau form drops the ramp contribution, worth a few 1e-3 here
    q = oracles.g_quadrature_oracle(8.0, 0.4, k)
    p = oracles.g_plateau_oracle(8.0, 0.4, k)
    assert q["norm2"] == pytest.approx(p["norm2"], rel=1e-2)
    assert q["X1k2"] == pytest.approx(p["X1k2"], rel=1e-2)


@pytest.mark.parametrize("p", [1, 2, 3])
def test_center_coefficient_is_factorial(p):
    assert oracles.prop2_center_coefficient(p) == pytest.approx(math.factorial(p))


def test_center_coefficient_matches_contour_values():
    for p in (1, 2):
        c = oracles.prop2_center_coefficient(p)
        a, b = (abs(make_u_delta(d, p).center_t_derivative()) for d in (1e-3, 1e-6))
        assert (b - a) / (math.log(1e6) - math.log(1e3)) == pytest.approx(c, rel=1e-9)


def test_ek_u_delta_expr_evaluates():
    expr, (x, y, t, d) = oracles.ek_u_delta_expr(1, 1)
    val = complex(expr.subs({x: 0.1, y: -0.2, t: 0.3, d: 0.5}).evalf())
    assert math.isfinite(val.real) and math.isfinite(val.imag)


def test_derivative_sup_is_bounded_in_delta():
    pts = np.array([[0.0, 0.0, 0.0], [0.1, 0.0, -0.1], [0.0, 0.2, 0.3]])
    sups = oracles.derivative_sup(1, 1, [1e-1, 1e-3], pts)
    assert np.all(np.isfinite(sups)) and max(sups) / min(sups) < 10
