import math

import pytest
from hypothesis import assume, given, strategies as st

from heislab.lab.fitting import fit_linear, fit_power_law


def test_square_law():
    assert fit_power_law([(2, 4), (4, 16), (8, 64)]).slope == pytest.approx(2.0)


def test_constant_has_zero_slope():
    f = fit_power_law([(1, 1), (2, 1), (4, 1)])
    assert f.slope == 0 and f.r2 == 1


@given(st.floats(-4, 4), st.floats(0.1, 10), st.lists(st.floats(0.1, 100), min_size=4, max_size=8, unique=True))
def test_exact_power_laws_are_recovered(k, c, xs):
    assume(max(xs) / min(xs) > 1.5)
    f = fit_power_law((x, c * x**k) for x in xs)
    assert f.slope == pytest.approx(k, abs=1e-9)
    assert f.intercept == pytest.approx(math.log(c), abs=1e-8)


@pytest.mark.parametrize("pairs", [[(1, 1), (2, 0), (3, 1)], [(1, 1), (-2, 1), (3, 1)],
                                   [(1, 1), (2, float("inf")), (3, 1)], [(1, 1), (2, 2)]])
def test_bad_data(pairs):
    with pytest.raises(ValueError):
        fit_power_law(pairs)


def test_min_points():
    with pytest.raises(ValueError):
        fit_power_law([(1, 1), (2, 2), (3, 3)], min_points=4)


def test_linear_r2_and_stderr():
    f = fit_linear([0, 1, 2, 3], [1, 3, 5, 7.5])
    assert 0.99 < f.r2 < 1 and f.stderr > 0
