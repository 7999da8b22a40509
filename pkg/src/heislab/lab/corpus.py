"""Random smooth, margin-supported test fields."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["GaussianBumps", "make_corpus", "IDENTITY_BOX"]

# Box half-extent for which the default width/centre ranges leave boundary
# mass below 1e-24 while staying resolved at 64 points per axis.
IDENTITY_BOX = (4.5, 4.5, 4.5)


@dataclass(frozen=True)
class GaussianBumps:
    """Superposition ``sum_j a_j exp(-sum_i ((x_i - c_ji)/w_ji)^2 + i q_j . x)``."""

    centers: tuple
    widths: tuple
    amps: tuple
    phases: tuple

    def __call__(self, x1, x2, x3):
        out = 0.0
        for c, w, a, q in zip(self.centers, self.widths, self.amps, self.phases):
            e = -((x1 - c[0]) / w[0]) ** 2 - ((x2 - c[1]) / w[1]) ** 2 - ((x3 - c[2]) / w[2]) ** 2
            out = out + a * np.exp(e + 1j * (q[0] * x1 + q[1] * x2 + q[2] * x3))
        return out


def make_corpus(n: int, seed: int, box=IDENTITY_BOX, max_bumps: int = 3,
                width_range=(0.5, 0.7), center_range: float = 0.5, phase_scale: float = 0.5):
    """``n`` random bump superpositions, reproducible from ``seed``.

    Widths and centres are given for :data:`IDENTITY_BOX` and scale with the
    box half-extent on each axis.
    """
    rng = np.random.default_rng(seed)
    scale = np.asarray(box, dtype=float) / np.asarray(IDENTITY_BOX)
    out = []
    for _ in range(n):
        m = int(rng.integers(1, max_bumps + 1))
        c = rng.uniform(-center_range, center_range, (m, 3)) * scale
        w = rng.uniform(*width_range, (m, 3)) * scale
        a = rng.normal(size=m) + 1j * rng.normal(size=m)
        q = rng.normal(size=(m, 3)) * phase_scale / scale
        out.append(GaussianBumps(tuple(map(tuple, c.tolist())), tuple(map(tuple, w.tolist())),
                                 tuple(complex(x) for x in a), tuple(map(tuple, q.tolist()))))
    return out
