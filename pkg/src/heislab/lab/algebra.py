"""Exact algebra checks driven from the harness."""
from __future__ import annotations

from .. import ncalg
from ..ncalg import LB, L, T, Z, ZB
from .report import Report

__all__ = ["run_algebra", "VERIFY_CHOICES"]

VERIFY_CHOICES = ("relations", "towers", "ek", "s11", "localization")


def _relations(rep: Report):
    jac = ncalg.jacobi_residuals()
    conf = ncalg.confluence_residuals()
    for key, r in sorted(jac.items()):
        rep.add_row(item="jacobi", key=",".join(key), value=str(r))
    for key, r in sorted(conf.items()):
        rep.add_row(item="confluence", key=",".join(key), value=str(r))
    rep.check("jacobi_nonzero_triples", len(jac), 0, not jac)
    rep.check("confluence_nonzero_triples", len(conf), 0, not conf)
    br = ncalg.commutator(L, LB)
    rep.add_row(item="bracket", key="[L,Lb]", value=str(br))
    rep.check("[L,Lb]=2T", 0 if br == 2 * T else 1, 0, br == 2 * T)
    adj_ok = all(ncalg.adjoint(ncalg.adjoint(g)) == g for g in (Z, ZB, T, L, LB))
    rep.check("adjoint_involution", 0 if adj_ok else 1, 0, adj_ok)


def _towers(rep: Report, kmax: int = 4):
    x2 = LB
    for k in range(kmax + 1):
        full = ncalg.span_rank_at_origin([x2, ncalg.bracket_tower(k, k), ncalg.bracket_tower(k, k + 1)])
        short = ncalg.span_rank_at_origin([x2] + [ncalg.bracket_tower(k, j) for j in range(k + 1)])
        rep.add_row(item="tower", key=f"k={k}", value=f"A^k={ncalg.bracket_tower(k, k)}; "
                    f"A^(k+1)={ncalg.bracket_tower(k, k + 1)}")
        rep.check(f"rank_with_order_{k + 1}_k{k}", full, 3, full == 3)
        rep.check(f"rank_below_order_{k + 1}_k{k}", short, "< 3", short < 3)


def _ek(rep: Report, kmax: int = 4):
    for k in range(kmax + 1):
        state = ncalg.apply_to_h(ncalg.ek_expand(k))
        plus = ncalg.HState.from_dict({(k, k, 1): 2 * (k + 1)})
        minus = ncalg.HState.from_dict({(k, k, 1): -2 * (k + 1)})
        sign = "+" if state == plus else "-" if state == minus else "?"
        rep.add_row(item="ek_h", key=f"k={k}", value=str(state))
        rep.check(f"ek_h_reduces_k{k}", 0 if sign != "?" else 1, 0, sign != "?", f"sign {sign}")
        e = ncalg.ek_expand(k)
        sa = ncalg.adjoint(e) == e
        rep.check(f"ek_selfadjoint_k{k}", 0 if sa else 1, 0, sa)


def _s11(rep: Report, kmax: int = 4):
    for k in range(1, kmax + 1):
        res = ncalg.verify_s11_expansion(k)
        for i, r in enumerate(res, 1):
            rep.add_row(item="s11", key=f"k={k},line={i}", value=str(r))
        # only the final displayed form is asserted; earlier lines are reported
        rep.check(f"s11_final_line_k{k}", len(res[-1].terms), 0, res[-1].is_zero(),
                  f"intermediate nonzero lines: {[i for i, r in enumerate(res[:-1], 1) if not r.is_zero()]}")


def _localization(rep: Report, budget: int):
    for p1 in range(budget + 1):
        for p2 in range(budget + 1 - p1):
            if p1 + p2 == 0:
                continue
            r = ncalg.verify_31(p1, p2, budget=budget)
            for name in sorted(r.ok):
                d = r.decompositions[name]
                rep.add_row(item="localization", key=f"p=({p1},{p2}),{name}",
                            value="exact" if not d else "; ".join(
                                f"{c}*E{q}" for q, c in sorted(d.items())))
            rep.check(f"relations_31_p{p1}_{p2}", 0 if r.passed else 1, 0, r.passed)


def run_algebra(verify: str, budget: int = 6) -> Report:
    """Run one exact check family; every check has zero tolerance."""
    if verify not in VERIFY_CHOICES:
        raise ValueError(f"verify must be one of {VERIFY_CHOICES}")
    rep = Report(f"algebra_{verify}", ("item", "key", "value"))
    if verify == "relations":
        _relations(rep)
    elif verify == "towers":
        _towers(rep)
    elif verify == "ek":
        _ek(rep)
    elif verify == "s11":
        _s11(rep)
    else:
        _localization(rep, budget)
    rep.meta["budget"] = budget
    return rep
