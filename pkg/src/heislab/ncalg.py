"""Exact noncommutative algebra of the Heisenberg operators.

Generators are the multiplications ``Z`` (by z), ``Zb`` (by zbar) and
``Phi_r`` (by the t-derivative ``(-i d/dt)^r phi``), and the derivations
``T = -i d/dt``, ``L`` and ``Lb``.  Words are normal ordered as

    Z^a Zb^b Phi_r... T^c L^d Lb^e

using the commutation relations

    [L, Lb] = 2T,  [L, Z] = 1,  [Lb, Zb] = 1,
    [L, Phi_r] = -Zb Phi_{r+1},  [Lb, Phi_r] = Z Phi_{r+1},
    [T, Phi_r] = Phi_{r+1},

all other pairs commuting.  Coefficients are exact rationals; the only
formal parameter is ``lambda^2`` (written ``lam2``), tracked as an integer
degree attached to each term.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

__all__ = [
    "Z",
    "ZB",
    "T",
    "L",
    "LB",
    "ONE",
    "LAM2",
    "phi",
    "NCExpr",
    "HState",
    "normal_order",
    "commutator",
    "adjoint",
    "bracket_tower",
    "span_rank_at_origin",
    "ek_expand",
    "s11_lines",
    "verify_s11_expansion",
    "apply_to_h",
    "t_localization",
    "verify_31",
    "RELATIONS",
    "jacobi_residuals",
    "confluence_residuals",
]

# generator = (rank, index); rank fixes the normal order
_Z, _ZB, _PHI, _T, _L, _LB = range(6)
_NAMES = {_Z: "Z", _ZB: "Zb", _T: "T", _L: "L", _LB: "Lb"}


def _gen_name(g):
    return f"Phi_{g[1]}" if g[0] == _PHI else _NAMES[g[0]]


class NCExpr:
    """Finite sum of ``coefficient * lam2^deg * word``.

    Terms are stored as ``{(deg, word): Fraction}``.  Products concatenate
    words without reordering; use :func:`normal_order` for the canonical
    form.  ``==`` compares canonical forms.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for key, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[key] = c
        self.terms = clean

    @classmethod
    def word(cls, *gens, coeff=1, deg=0):
        return cls({(deg, tuple(gens)): coeff})

    def _coerce(self, other):
        if isinstance(other, NCExpr):
            return other
        if isinstance(other, (int, Fraction)):
            return NCExpr({(0, ()): other})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = defaultdict(Fraction, self.terms)
        for k, c in other.terms.items():
            out[k] += c
        return NCExpr(out)

    __radd__ = __add__

    def __neg__(self):
        return NCExpr({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return NCExpr({k: c * other for k, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = defaultdict(Fraction)
        for (d1, w1), c1 in self.terms.items():
            for (d2, w2), c2 in other.terms.items():
                out[(d1 + d2, w1 + w2)] += c1 * c2
        return NCExpr(out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __pow__(self, n: int):
        out = ONE
        for _ in range(n):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return normal_order(self - other).is_zero()

    def __hash__(self):
        return hash(frozenset(normal_order(self).terms.items()))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kc: (kc[0][0], len(kc[0][1]), kc[0][1]))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (deg, word), c in self.sorted_terms():
            factors = [_gen_name(g) for g in word]
            if deg:
                factors.insert(0, "lam2" if deg == 1 else f"lam2^{deg}")
            parts.append(f"{c}" + "".join("*" + f for f in factors))
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


ONE = NCExpr({(0, ()): 1})
LAM2 = NCExpr({(1, ()): 1})
Z = NCExpr.word((_Z, 0))
ZB = NCExpr.word((_ZB, 0))
T = NCExpr.word((_T, 0))
L = NCExpr.word((_L, 0))
LB = NCExpr.word((_LB, 0))


def phi(r: int = 0) -> NCExpr:
    """The multiplication generator ``Phi_r``."""
    if r < 0:
        raise ValueError("phi index must be nonnegative")
    return NCExpr.word((_PHI, r))


def _bracket_table(x, g):
    """``[x, g]`` for generators with ``x > g``, as ``[(coeff, word)]``."""
    rx, ry = x[0], g[0]
    if rx == _L:
        if ry == _Z:
            return [(1, ())]
        if ry == _PHI:
            return [(-1, ((_ZB, 0), (_PHI, g[1] + 1)))]
        return []
    if rx == _LB:
        if ry == _ZB:
            return [(1, ())]
        if ry == _PHI:
            return [(1, ((_Z, 0), (_PHI, g[1] + 1)))]
        if ry == _L:
            return [(-2, ((_T, 0),))]
        return []
    if rx == _T and ry == _PHI:
        return [(1, ((_PHI, g[1] + 1),))]
    return []


RELATIONS = {
    "[L,Lb]": "2*T",
    "[L,Z]": "1",
    "[L,Zb]": "0",
    "[Lb,Zb]": "1",
    "[Lb,Z]": "0",
    "[T,Z]": "0",
    "[T,Zb]": "0",
    "[T,L]": "0",
    "[T,Lb]": "0",
    "[L,Phi_r]": "-Zb*Phi_{r+1}",
    "[Lb,Phi_r]": "Z*Phi_{r+1}",
    "[T,Phi_r]": "Phi_{r+1}",
}


@lru_cache(maxsize=None)
def _right_mul(word: tuple, g: tuple) -> tuple:
    """Normal form of ``word * g`` for a normal-ordered ``word``.

    Returns a tuple of ``(word, Fraction)`` pairs.
    """
    if not word or word[-1] <= g:
        return ((word + (g,), Fraction(1)),)
    x, head = word[-1], word[:-1]
    acc = defaultdict(Fraction)
    # head x g = (head g) x + head [x, g]
    for w, c in _right_mul(head, g):
        for w2, c2 in _right_mul(w, x):
            acc[w2] += c * c2
    for cb, bw in _bracket_table(x, g):
        for w, c in _mul_word(head, bw):
            acc[w] += cb * c
    return tuple((w, c) for w, c in acc.items() if c)


@lru_cache(maxsize=None)
def _mul_word(left: tuple, right: tuple) -> tuple:
    """Normal form of ``left * right`` with ``left`` normal ordered."""
    cur = {left: Fraction(1)}
    for g in right:
        nxt = defaultdict(Fraction)
        for w, c in cur.items():
            for w2, c2 in _right_mul(w, g):
                nxt[w2] += c * c2
        cur = {w: c for w, c in nxt.items() if c}
    return tuple(cur.items())


def normal_order(e: NCExpr) -> NCExpr:
    """Canonical form ``Z^a Zb^b Phi.. T^c L^d Lb^e``.

    Terminates because each rewrite either sorts an adjacent pair or
    replaces it by a bracket of strictly smaller degree in ``L, Lb``
    derivations.  Idempotent.
    """
    out = defaultdict(Fraction)
    for (deg, word), c in e.terms.items():
        for w, c2 in _mul_word((), word):
            out[(deg, w)] += c * c2
    return NCExpr(out)


def commutator(a: NCExpr, b: NCExpr) -> NCExpr:
    """``normal_order(a b - b a)``."""
    return normal_order(a * b - b * a)


def adjoint(e: NCExpr) -> NCExpr:
    """Formal L2 adjoint: reverse words, ``L -> -Lb``, ``Lb -> -L``,
    ``T -> T``, ``Z <-> Zb``, ``Phi_r -> (-1)^r Phi_r`` (real ``phi``)."""
    out = defaultdict(Fraction)
    for (deg, word), c in e.terms.items():
        sign = 1
        new = []
        for g in reversed(word):
            r = g[0]
            if r == _L:
                sign, g = -sign, (_LB, 0)
            elif r == _LB:
                sign, g = -sign, (_L, 0)
            elif r == _Z:
                g = (_ZB, 0)
            elif r == _ZB:
                g = (_Z, 0)
            elif r == _PHI and g[1] % 2:
                sign = -sign
            new.append(g)
        out[(deg, tuple(new))] += sign * c
    return NCExpr(out)


def _test_generators(max_phi: int):
    gens = [("Z", Z), ("Zb", ZB), ("T", T), ("L", L), ("Lb", LB)]
    return gens + [(f"Phi_{r}", phi(r)) for r in range(max_phi + 1)]


def jacobi_residuals(max_phi: int = 2) -> dict:
    """Nonzero ``[[a,b],c] + [[b,c],a] + [[c,a],b]`` over generator triples.

    An empty dict means the relation table satisfies the Jacobi identity.
    """
    gens = _test_generators(max_phi)
    out = {}
    for (na, a), (nb, b), (nc, c) in product(gens, repeat=3):
        r = (commutator(commutator(a, b), c) + commutator(commutator(b, c), a)
             + commutator(commutator(c, a), b))
        if not r.is_zero():
            out[(na, nb, nc)] = r
    return out


def confluence_residuals(max_phi: int = 2) -> dict:
    """Nonzero ``nf(nf(a b) c) - nf(a nf(b c))`` over generator triples.

    The two sides resolve the overlap ``a b c`` starting from opposite ends;
    an empty dict means the rewriting system is locally confluent there.
    """
    gens = _test_generators(max_phi)
    out = {}
    for (na, a), (nb, b), (nc, c) in product(gens, repeat=3):
        r = normal_order(normal_order(a * b) * c) - normal_order(a * normal_order(b * c))
        r = normal_order(r)
        if not r.is_zero():
            out[(na, nb, nc)] = r
    return out


def bracket_tower(k: int, j: int) -> NCExpr:
    """``A_k^j``: ``A_k^0 = Zb^k L`` and ``A_k^j = [A_k^{j-1}, Lb]``."""
    if k < 0 or j < 0:
        raise ValueError("k and j must be nonnegative")
    a = normal_order(ZB**k * L)
    for _ in range(j):
        a = commutator(a, LB)
    return a


def _rank(rows) -> int:
    m = [list(map(Fraction, r)) for r in rows]
    rank, ncol = 0, len(m[0]) if m else 0
    for col in range(ncol):
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col] / m[rank][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def span_rank_at_origin(exprs) -> int:
    """Rank at ``z = 0`` of the directions ``(d_z, d_zbar, d_t)`` of first-order expressions.

    At the origin ``L = d_z``, ``Lb = d_zbar`` and ``T = -i d_t``; the
    constant factor ``-i`` does not change the rank.

    Raises
    ------
    ValueError
        For words with more than one derivation, ``Phi`` factors or
        ``lam2`` dependence.
    """
    col = {_L: 0, _LB: 1, _T: 2}
    rows = []
    for e in exprs:
        row = [Fraction(0)] * 3
        for (deg, word), c in normal_order(e).terms.items():
            ders = [g for g in word if g[0] in col]
            if len(ders) > 1 or deg or any(g[0] == _PHI for g in word):
                raise ValueError(f"not a first-order vector field: {e}")
            mult = [g for g in word if g[0] in (_Z, _ZB)]
            if ders and not mult:
                row[col[ders[0][0]]] += c
        rows.append(row)
    return _rank(rows) if rows else 0


def ek_expand(k: int) -> NCExpr:
    """Canonical form of ``E_k = -Lb |z|^{2k} L - L Lb``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    zz = (Z * ZB) ** k
    return normal_order(-(LB * zz * L) - L * LB)


def _zpow(a: int, b: int) -> NCExpr:
    return Z**a * ZB**b


def s11_lines(k: int) -> tuple[NCExpr, list[NCExpr]]:
    """Left side ``Lb^2 |z|^{2k} L`` and the three displayed right sides, as words.

    Terms with a negative power of ``zbar`` (possible for ``k < 2``) are
    dropped together with their vanishing coefficient.
    """
    if k < 1:
        raise ValueError("the displayed expansion needs k >= 1")
    zz = (Z * ZB) ** k
    lhs = LB * LB * zz * L
    line1 = -k * (LB * _zpow(k, k - 1) * L) + LB * zz * LB * L
    line2 = (-(k * k) * (LB * (Z * ZB) ** (k - 1)) + LB * L * _zpow(k, k - 1)
             - 2 * k * (_zpow(k, k - 1) * T) + LB * zz * L * LB - 2 * (zz * T * LB))
    kk = k * (k - 1) * (L * _zpow(k, k - 2)) if k >= 2 else NCExpr()
    line3 = (-(k * k) * (LB * (Z * ZB) ** (k - 1)) - 4 * k * (_zpow(k, k - 1) * T) + kk
             + k * (L * _zpow(k, k - 1) * LB) + LB * zz * L * LB - 2 * (zz * T * LB))
    return lhs, [line1, line2, line3]


def verify_s11_expansion(k: int) -> list[NCExpr]:
    """Residuals ``normal_order(lhs - line_i)`` for the three displayed lines.

    A zero entry confirms the line; anything else is the exact correction
    needed to make the line true.
    """
    lhs, lines = s11_lines(k)
    return [normal_order(lhs - line) for line in lines]


@dataclass(frozen=True)
class HState:
    """``sum c * lam2^deg * Z^a Zb^b`` times the state ``h``.

    ``terms`` maps ``(a, b, deg)`` to a nonzero Fraction.
    """

    terms: tuple

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(sorted((k, Fraction(c)) for k, c in d.items() if c)))

    def as_dict(self):
        return dict(self.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for (a, b, deg), c in self.terms:
            f = [f"lam2^{deg}" if deg > 1 else "lam2"] if deg else []
            f += ["Z"] * a + ["Zb"] * b
            out.append(f"{c}" + "".join("*" + x for x in f) + "*h")
        return " + ".join(out).replace("+ -", "- ")


def apply_to_h(e: NCExpr) -> HState:
    """Reduce ``e h`` with ``L h = -2 lam2 Zb h``, ``Lb h = 0`` and ``T h = lam2 h``."""
    out = defaultdict(Fraction)
    for (deg, word), c in normal_order(e).terms.items():
        cnt = defaultdict(int)
        for g in word:
            if g[0] == _PHI:
                raise ValueError("Phi factors have no action on the h state")
            cnt[g[0]] += 1
        if cnt[_LB]:
            continue
        d, tt = cnt[_L], cnt[_T]
        out[(cnt[_Z], cnt[_ZB] + d, deg + d + tt)] += c * (-2) ** d
    return HState.from_dict(out)


def t_localization(p1: int, p2: int, shift: int = 0, t_scale: int = 2, budget: int = 6) -> NCExpr:
    """Balanced localization ``(T^{p1,p2})_phi`` with ``phi`` replaced by ``phi^{(shift)}``.

    Each term is ``L^a Z^a S^{p1-a} Phi_{a+b} S^{p2-b} Zb^b Lb^b / (a! b!)``
    where ``S = t_scale * T``.  The default ``t_scale = 2`` is the
    normalization ``S = -2i d/dt``, for which ``[L, Lb] = S``; the
    commutation relations with ``L`` and ``Lb`` only telescope in that
    normalization.
    """
    if p1 < 0 or p2 < 0:
        raise ValueError("p1 and p2 must be nonnegative")
    if p1 + p2 > budget:
        raise ValueError(f"p1 + p2 = {p1 + p2} exceeds the budget {budget}")
    S = t_scale * T
    out = NCExpr()
    for a in range(p1 + 1):
        for b in range(p2 + 1):
            w = (L**a * Z**a * S ** (p1 - a) * phi(a + b + shift) * S ** (p2 - b)
                 * ZB**b * LB**b)
            out = out + w * Fraction(1, math.factorial(a) * math.factorial(b))
    return out


def _error_word(p1, p2, q1, q2, extra, shift, t_scale):
    # L^{m1} Z^{m1} S^{q1} Phi_{m1+m2+1} S^{q2} Zb^{m2} Lb^{m2}, one optional extra Z or Zb
    m1, m2 = p1 - q1, p2 - q2
    S = t_scale * T
    za = m1 + (extra == "Z")
    zb = m2 + (extra == "Zb")
    return (L**m1 * Z**za * S**q1 * phi(m1 + m2 + 1 + shift) * S**q2 * ZB**zb * LB**m2)


def _solve_span(target: NCExpr, basis: list[NCExpr]):
    """Exact least-squares-free solve ``target = sum c_i basis_i``; None if impossible."""
    tgt = normal_order(target)
    cols = [normal_order(b) for b in basis]
    keys = sorted(set(tgt.terms).union(*[c.terms for c in cols]))
    if not keys:
        return []
    n = len(cols)
    rows = [[c.terms.get(k, Fraction(0)) for c in cols] + [tgt.terms.get(k, Fraction(0))]
            for k in keys]
    # Gauss-Jordan on the augmented matrix
    piv_cols, r = [], 0
    for col in range(n):
        p = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pv = rows[r][col]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        piv_cols.append(col)
        r += 1
    if any(row[n] != 0 for row in rows[r:]):
        return None
    sol = [Fraction(0)] * n
    for i, col in enumerate(piv_cols):
        sol[col] = rows[i][n]
    return sol


@dataclass
class Relation31Report:
    p1: int
    p2: int
    residuals: dict
    decompositions: dict
    ok: dict

    @property
    def passed(self) -> bool:
        return all(self.ok.values())


def verify_31(p1: int, p2: int, t_scale: int = 2, budget: int = 6) -> Relation31Report:
    """Check the four commutation relations of the balanced localization.

    For each relation the residual (claimed right side subtracted) is
    normal ordered and decomposed exactly over error words
    ``L^{m1} Z^{m1} S^{q1} Phi_{m1+m2+1} S^{q2} Zb^{m2} Lb^{m2}`` with
    ``q1 = 0`` or ``q2 = 0`` (all free powers of ``S`` on one side of
    ``Phi``), allowing one extra ``Z`` or ``Zb`` factor.  The ``z`` and
    ``zbar`` relations are exact, so their residual must vanish.  The
    ``L`` and ``z`` relations need ``p1 >= 1``, the other two ``p2 >= 1``.
    """
    loc = t_localization(p1, p2, 0, t_scale, budget)
    res = {}
    if p1 >= 1:
        lower = t_localization(p1 - 1, p2, 1, t_scale, budget)
        res["L"] = commutator(L, loc) - normal_order(L * lower)
        res["z"] = commutator(loc, Z) - normal_order(lower * Z)
    if p2 >= 1:
        lower = t_localization(p1, p2 - 1, 1, t_scale, budget)
        res["Lb"] = commutator(LB, loc) - normal_order(lower * LB)
        res["zb"] = commutator(loc, ZB) - normal_order(ZB * lower)
    basis_keys = [(q1, q2, x) for q1, q2, x in product(range(p1 + 1), range(p2 + 1), ("", "Z", "Zb"))
                  if q1 == 0 or q2 == 0]
    basis = [_error_word(p1, p2, q1, q2, x, 0, t_scale) for q1, q2, x in basis_keys]
    decomp, ok = {}, {}
    for name, r in res.items():
        r = normal_order(r)
        if name in ("z", "zb"):
            ok[name] = r.is_zero()
            decomp[name] = {}
            continue
        sol = _solve_span(r, basis)
        ok[name] = sol is not None
        decomp[name] = {} if sol is None else {
            basis_keys[i]: c for i, c in enumerate(sol) if c != 0}
    return Relation31Report(p1, p2, {k: normal_order(v) for k, v in res.items()}, decomp, ok)
