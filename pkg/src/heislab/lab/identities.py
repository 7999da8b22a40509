"""Numeric identity suite on a random bump corpus."""
from __future__ import annotations

from ..spectral import make_grid, sample
from .. import heisenberg as H
from .. import microlocal, ncalg
from .config import ExperimentConfig
from .corpus import IDENTITY_BOX, make_corpus
from .report import Report

__all__ = ["run_identity_suite", "IDENTITY_TOL", "NONNEG_TOL"]

IDENTITY_TOL = 1e-9
NONNEG_TOL = -1e-12

_ADJOINT_OPS = [H.FieldOpSpec("L"), H.FieldOpSpec("Lbar"), H.FieldOpSpec("T"),
                H.FieldOpSpec("X1k", 1), H.FieldOpSpec("X1k", 2),
                H.FieldOpSpec("Ek", 1), H.FieldOpSpec("Ek", 2)]


def _two_T(u):
    return 2 * H.apply(H.FieldOpSpec("T"), u)


def run_identity_suite(cfg: ExperimentConfig = ExperimentConfig(), fields=None) -> Report:
    """Energy, adjoint, commutator and form identities plus the cone partition floor.

    ``fields`` overrides the random corpus (a list of sampled fields).
    """
    grid = make_grid(cfg.box or IDENTITY_BOX, cfg.grid or (64, 64, 64))
    if fields is None:
        rules = make_corpus(cfg.corpus_size or 50, cfg.seed, grid.half_extents)
        fields = [sample(grid, r) for r in rules]
    rep = Report("identities", ("identity", "sample", "defect"))
    worst: dict[str, float] = {}
    min_form = float("inf")

    def rec(name, i, d):
        rep.add_row(identity=name, sample=i, defect=float(d))
        worst[name] = max(worst.get(name, 0.0), float(d))

    ks = (0, 1, 2) if cfg.k is None else (cfg.k,)
    towers = [(k, ncalg.bracket_tower(k, 1)) for k in ks if k >= 1]
    n = len(fields)
    for i, u in enumerate(fields):
        v = fields[(i + 1) % n]
        rec("energy", i, H.energy_defect(u))
        for op in _ADJOINT_OPS:
            rec(f"adjoint_{op.kind}{op.k if op.kind in ('X1k', 'Ek') else ''}", i,
                H.adjoint_defect(op, u, v))
        rec("commutator_L_Lbar", i, H.commutator_defect(H.FieldOpSpec("L"), H.FieldOpSpec("Lbar"), _two_T, u))
        for k, tower in towers:
            rec(f"tower_X1{k}_X2", i,
                H.commutator_defect(H.FieldOpSpec("X1k", k), H.FieldOpSpec("X2"), tower, u))
        for k in ks:
            lhs, rhs = H.form_value(u, k)
            rec(f"form_k{k}", i, abs(lhs - rhs) / rhs if rhs > 0 else abs(lhs))
            if rhs > 0:
                min_form = min(min_form, lhs / rhs)
            elif lhs < NONNEG_TOL:
                min_form = min(min_form, lhs)
    for name in sorted(worst):
        rep.check(name, worst[name], IDENTITY_TOL, worst[name] <= IDENTITY_TOL)
    if min_form != float("inf"):
        rep.check("form_nonnegative", min_form, NONNEG_TOL, min_form >= NONNEG_TOL,
                  "min of (E_k u, u) / rhs")
    floor = microlocal.partition_floor(grid)
    rep.check("partition_floor", floor, "> 0", floor > 0)
    rep.meta.update(grid="x".join(map(str, grid.shape)), box=",".join(map(repr, grid.half_extents)),
                    samples=n)
    return rep
