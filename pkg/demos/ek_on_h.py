"""E_k acting on h_lambda: exact reduction next to the spectral computation.

Run: python3 demos/ek_on_h.py
"""
import math

import numpy as np

from heislab import heisenberg as H
from heislab import ncalg
from heislab.spectral import make_grid, sample
from heislab.witnesses import make_h_lambda

lam = 2.0
# t-box pi makes exp(i lam^2 t) periodic; the z-box must hold the Gaussian
grid = make_grid((3.0, 3.0, math.pi), (64, 64, 32))
h = sample(grid, make_h_lambda(lam))
x1, x2, _ = grid.coords()
r2 = x1**2 + x2**2

for k in range(4):
    exact = ncalg.apply_to_h(ncalg.ek_expand(k))
    eh = H.apply_Ek(h, k, strict=False).samples
    pred = 2 * (k + 1) * lam**2 * r2**k * h.samples
    inner = np.broadcast_to(r2 <= 1, eh.shape)
    err = np.abs(eh - pred)[inner].max() / np.abs(pred[inner]).max()
    print(f"k={k}: symbolic E_k h = {exact}")
    print(f"      spectral vs +2(k+1) lam^2 |z|^2k h on |z|<=1: rel. error {err:.2e}")
