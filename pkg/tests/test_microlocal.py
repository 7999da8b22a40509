import csv

import numpy as np
import pytest
from hypothesis import given, strategies as st

from heislab.microlocal import (
    MINUS, PLUS, STAR, ZERO, ConeCutoffSpec, MultiplierSpec, cone, eval_symbol, export_symbol_csv,
    make_multiplier, partition_floor, psi_bounds, smooth_step, smooth_step_derivative,
)
from heislab.spectral import make_grid

unit = st.floats(-0.5, 1.5, allow_nan=False)


@given(unit, unit)
def test_smooth_step_monotone_and_bounded(a, b):
    lo, hi = sorted((a, b))
    assert 0 <= smooth_step(lo) <= smooth_step(hi) <= 1


@given(st.floats(-1, 2))
def test_smooth_step_symmetry(x):
    assert smooth_step(x) + smooth_step(1 - x) == pytest.approx(1.0)


@given(st.floats(0.02, 0.98))
def test_smooth_step_derivative_matches_difference(x):
    h = 1e-6
    fd = (smooth_step(x + h) - smooth_step(x - h)) / (2 * h)
    assert smooth_step_derivative(x) == pytest.approx(fd, rel=1e-5, abs=1e-9)


def test_smooth_step_flat_outside():
    assert smooth_step(-0.1) == 0 and smooth_step(1.3) == 1
    np.testing.assert_array_equal(smooth_step_derivative(np.array([-1.0, 0.0, 1.0, 2.0])), 0)


@pytest.mark.parametrize("args", [("side", 0.4, 0.5, 0.5, 1), ("plus", 0.5, 0.4, 0.5, 1),
                                  ("plus", 0.4, 0.5, 1.0, 0.5), ("plus", 0.4, 0.5, 0.5, 2)])
def test_cone_spec_validation(args):
    with pytest.raises(ValueError):
        ConeCutoffSpec(*args)


def test_multiplier_spec_validation():
    with pytest.raises(ValueError):
        MultiplierSpec("cone")
    with pytest.raises(ValueError):
        MultiplierSpec("wavelet")
    with pytest.raises(ValueError):
        MultiplierSpec("smoother_S", delta=-1)


def test_cone_lookup():
    assert cone("plus") is PLUS and cone("zero") is ZERO


@pytest.mark.parametrize("xi,expected", [
    ((0, 0, 10), {"plus": 1, "minus": 0, "zero": 0}),
    ((0, 0, -10), {"plus": 0, "minus": 1, "zero": 0}),
    ((10, 0, 0), {"plus": 0, "minus": 0, "zero": 1}),
    ((0, 0, 0), {"plus": 0, "minus": 0, "zero": 1}),
])
def test_cone_values_on_axes(xi, expected):
    for kind, v in expected.items():
        assert eval_symbol(MultiplierSpec("cone", cone=cone(kind)), *xi) == pytest.approx(v)


@given(st.floats(-50, 50), st.floats(-50, 50), st.floats(-50, 50), st.floats(1.01, 10))
def test_cones_are_homogeneous_of_degree_zero(a, b, c, t):
    if a * a + b * b + c * c < 1:
        return
    for kind in (PLUS, MINUS, ZERO, STAR):
        spec = MultiplierSpec("cone", cone=kind)
        assert eval_symbol(spec, a, b, c) == pytest.approx(eval_symbol(spec, t * a, t * b, t * c), abs=1e-12)


def test_product_spec_multiplies():
    g = make_grid((2, 2, 2), (8, 8, 8))
    a, b = MultiplierSpec("lambda_s", s=1.0), MultiplierSpec("cone", cone=PLUS)
    prod = a * b
    assert prod.symbol_kind == "product" and len((prod * a).factors) == 3
    np.testing.assert_allclose(make_multiplier(g, prod), make_multiplier(g, a) * make_multiplier(g, b))


def test_multiplier_tables_are_read_only():
    g = make_grid((2, 2, 2), (8, 8, 8))
    tab = make_multiplier(g, MultiplierSpec("psi_s", s=1.0))
    with pytest.raises(ValueError):
        tab[0, 0, 0] = 2


def test_partition_floor_positive():
    assert partition_floor(make_grid((4, 4, 4), (16, 16, 16))) > 0.5


def test_psi_bounds_bracket_one():
    lo, hi = psi_bounds(make_grid((4, 4, 4), (16, 16, 16)), 1.0)
    assert 0 < lo <= hi <= 1 + 1e-12


def test_smoothers():
    s = MultiplierSpec("smoother_S", delta=0.1)
    assert eval_symbol(s, 0, 0, 5) == 1 and eval_symbol(s, 0, 0, 25) == 0
    k = MultiplierSpec("smoother_K", delta=0.1)
    assert eval_symbol(k, 0, 0, 5) == 1 and eval_symbol(k, 0, 0, -5) == 0


def test_export_symbol_csv(tmp_path):
    g = make_grid((2, 2, 2), (8, 8, 8))
    path = tmp_path / "sym.csv"
    export_symbol_csv(g, MultiplierSpec("cone", cone=PLUS), path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["i", "j", "k", "xi1", "xi2", "xi3", "value"]
    assert len(rows) == 1 + 8**3
    assert rows[1][:3] == ["-4", "-4", "-4"]
