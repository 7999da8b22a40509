"""Recover a known solution of E_k u = f with preconditioned CG.

Run: python3 demos/solve_known.py   (about 5 s)
"""
import numpy as np

from heislab import heisenberg as H
from heislab.lab.solve import SOLVE_BOX, SOLVE_GRID, EkSystem, _fields
from heislab.spectral import make_grid, norm, Field

grid = make_grid(SOLVE_BOX, SOLVE_GRID)
v = dict(_fields(grid, 0, 0))["h_2.5"]
for k in (1, 2):
    system = EkSystem(grid, k)
    f = H.apply_Ek(v, k, strict=False)
    res = system.solve(f)
    lo, hi = res.ritz_extremes()
    err = norm(Field(grid, res.x) - v) / norm(v)
    print(f"k={k}: {res.iterations:5d} iterations, residual {res.residual:.1e}, "
          f"recovery error {err:.1e}, condition ~{hi / lo:.0f}, "
          f"energy monotone: {res.energy_increase() <= 1e-10}")
    assert np.isfinite(err)
