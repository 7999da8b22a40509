from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from heislab import ncalg
from heislab.ncalg import LAM2, LB, ONE, T, Z, ZB, L, NCExpr, phi

GENS = [Z, ZB, T, L, LB, phi(0), phi(1)]
words = st.lists(st.sampled_from(range(len(GENS))), min_size=0, max_size=5).map(
    lambda idx: NCExpr.word(*[next(iter(GENS[i].terms))[1][0] for i in idx]))
exprs = st.lists(st.tuples(words, st.integers(-3, 3)), max_size=3).map(
    lambda ts: sum((w * c for w, c in ts), NCExpr()))


@given(exprs)
def test_normal_order_is_idempotent(e):
    n = ncalg.normal_order(e)
    assert ncalg.normal_order(n).terms == n.terms


@given(exprs, exprs, exprs)
def test_normal_ordered_product_is_associative(a, b, c):
    nf = ncalg.normal_order
    assert nf(nf(a * b) * c).terms == nf(a * nf(b * c)).terms


@given(exprs, exprs)
def test_commutator_is_antisymmetric(a, b):
    assert ncalg.commutator(a, b) == -ncalg.commutator(b, a)


@given(exprs, exprs)
def test_adjoint_reverses_products(a, b):
    assert ncalg.adjoint(a * b) == ncalg.adjoint(b) * ncalg.adjoint(a)
    assert ncalg.adjoint(ncalg.adjoint(a)) == a


@pytest.mark.parametrize("a,b,expected", [
    (L, LB, 2 * T), (L, Z, ONE), (LB, ZB, ONE), (L, ZB, NCExpr()), (T, phi(2), phi(3)),
    (L, phi(0), -(ZB * phi(1))), (LB, phi(1), Z * phi(2)),
])
def test_relation_table(a, b, expected):
    assert ncalg.commutator(a, b) == expected


def test_jacobi_and_confluence_hold():
    assert ncalg.jacobi_residuals(2) == {}
    assert ncalg.confluence_residuals(1) == {}


@pytest.mark.parametrize("k", range(5))
def test_bracket_towers_span(k):
    full = [LB, ncalg.bracket_tower(k, k), ncalg.bracket_tower(k, k + 1)]
    assert ncalg.span_rank_at_origin(full) == 3
    assert ncalg.span_rank_at_origin([LB] + [ncalg.bracket_tower(k, j) for j in range(k + 1)]) < 3


def test_tower_bottom_rung():
    assert ncalg.bracket_tower(0, 1) == 2 * T
    with pytest.raises(ValueError):
        ncalg.bracket_tower(-1, 0)


def test_span_rank_rejects_higher_order():
    with pytest.raises(ValueError):
        ncalg.span_rank_at_origin([L * LB])


@pytest.mark.parametrize("k", range(5))
def test_ek_on_h_has_positive_sign(k):
    st_ = ncalg.apply_to_h(ncalg.ek_expand(k))
    assert st_.as_dict() == {(k, k, 1): Fraction(2 * (k + 1))}


@pytest.mark.parametrize("k", range(4))
def test_ek_is_formally_selfadjoint(k):
    e = ncalg.ek_expand(k)
    assert ncalg.adjoint(e) == e


@pytest.mark.parametrize("k", [1, 2, 3])
def test_s11_final_line_holds(k):
    res = ncalg.verify_s11_expansion(k)
    assert res[-1].is_zero()
    assert not res[0].is_zero()


@pytest.mark.parametrize("p1,p2", [(0, 1), (1, 0), (1, 1), (2, 1), (1, 3), (2, 2)])
def test_localization_relations(p1, p2):
    assert ncalg.verify_31(p1, p2).passed


def test_localization_needs_the_2T_normalization():
    assert not ncalg.verify_31(1, 1, t_scale=1).passed


def test_localization_budget():
    with pytest.raises(ValueError):
        ncalg.t_localization(4, 3, budget=6)


def test_str_and_lam2():
    assert str(NCExpr()) == "0"
    assert "lam2" in str(LAM2 * T)


# --- sympy oracle: act with words on an explicit function and compare ---------

x, y, t = sp.symbols("x y t", real=True)
_phi = sp.Function("phi")(t)
_f = sp.exp(x - 2 * y + sp.I * t) * (x * y + t**2)
_z, _zb = x + sp.I * y, x - sp.I * y


def _dz(f):
    return (sp.diff(f, x) - sp.I * sp.diff(f, y)) / 2


def _dzb(f):
    return (sp.diff(f, x) + sp.I * sp.diff(f, y)) / 2


def _act(e: NCExpr, f):
    out = 0
    for (deg, word), c in e.terms.items():
        assert deg == 0
        g = f
        for gen in reversed(word):
            r, idx = gen
            if r == 0:
                g = _z * g
            elif r == 1:
                g = _zb * g
            elif r == 2:
                g = (-sp.I) ** idx * sp.diff(_phi, t, idx) * g
            elif r == 3:
                g = -sp.I * sp.diff(g, t)
            elif r == 4:
                g = _dz(g) + sp.I * _zb * sp.diff(g, t)
            else:
                g = _dzb(g) - sp.I * _z * sp.diff(g, t)
        out += sp.Rational(c.numerator, c.denominator) * g
    return out


@pytest.mark.parametrize("e", [L * LB, LB * Z * L, phi(0) * L * T, L * L * ZB * LB, LB * phi(1) * Z * L],
                         ids=str)
def test_normal_order_agrees_with_differential_operators(e):
    diff = _act(e, _f) - _act(ncalg.normal_order(e), _f)
    assert sp.simplify(sp.expand(diff)) == 0
