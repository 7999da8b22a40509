"""Why no subelliptic estimate holds for k >= 1.

The form (E_k g, g) stays O(1) along g_lambda while ||g_lambda||_eps^2 grows
like lambda^{2 eps}.  For k = 0 the same ratio stays bounded.

Run: python3 demos/ratio_growth.py   (about 10 s)
"""
from heislab.lab.config import ExperimentConfig
from heislab.lab.scaling import run_scaling

rep = run_scaling(ExperimentConfig(), "prop1")
for c in rep.checks:
    if "ratio" in c.name or "mechanism" in c.name:
        print(f"{c.name:32s} slope {c.measured:+.3f}  want {c.threshold}  {'ok' if c.passed else 'FAIL'}")
