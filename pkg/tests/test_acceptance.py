"""End-to-end acceptance criteria 1-10, one printed verdict line each.

Thresholds live in the runners; each test aggregates the checks that make up
its criterion.  Criterion 4 compares against exponents that the measured
scalings do not attain; it is left failing rather than relaxed.
"""
import time

import pytest

from heislab.lab import algebra, estimates, identities, scaling
from heislab.lab.cli import main
from heislab.lab.config import ExperimentConfig
from heislab.lab.solve import run_solve

pytestmark = pytest.mark.acceptance


@pytest.fixture
def verdict(capsys):
    t0 = time.perf_counter()

    def report(n, title, checks):
        bad = [c for c in checks if not c.passed]
        line = f"CRITERION {n:>2} {'PASS' if not bad else 'FAIL'}  {title}  ({len(checks)} checks, " \
               f"{time.perf_counter() - t0:.0f}s)"
        with capsys.disabled():
            print("\n" + line)
            for c in bad:
                print(f"    failed {c.name}: measured {c.measured:.4g}, threshold {c.threshold}")
        assert checks, "criterion produced no checks"
        assert not bad, "; ".join(f"{c.name}={c.measured:.4g} vs {c.threshold}" for c in bad)

    return report


def _checks(*reports, pick=lambda name: True):
    return [c for r in reports for c in r.checks if pick(c.name)]


def test_criterion_01_exact_algebra(verdict):
    reps = [algebra.run_algebra(v, budget=6) for v in algebra.VERIFY_CHOICES]
    verdict(1, "exact algebra: relations, towers, E_k h, localization p1+p2 <= 6", _checks(*reps))


def test_criterion_02_numeric_identities(verdict):
    rep = identities.run_identity_suite(ExperimentConfig(grid=(64, 64, 64), corpus_size=50))
    verdict(2, "numeric identities at 64^3 on 50 fields", _checks(rep))


def test_criterion_03_prop1_ratio(verdict):
    rep = scaling.run_scaling(ExperimentConfig(), "prop1")
    verdict(3, "g_lambda ratio growth and Gaussian oracles", _checks(rep))


def test_criterion_04_prop3_scalings(verdict):
    # the claimed exponents; the oracle-exponent checks in the same report pass
    rep = scaling.run_scaling(ExperimentConfig(s0=4.0), "prop3")
    verdict(4, "h_lambda scalings at the claimed exponents",
            _checks(rep, pick=lambda n: "oracle" not in n))


def test_criterion_05_slab(verdict):
    rep = scaling.run_scaling(ExperimentConfig(), "slab")
    verdict(5, "slab exponent and 1-D rescaling law", _checks(rep))


def test_criterion_06_prop2(verdict):
    rep = scaling.run_scaling(ExperimentConfig(), "prop2")
    verdict(6, "log(1/delta) growth at the centre, bounded E_k u_delta", _checks(rep))


def test_criterion_07_estimates(verdict):
    reps = [estimates.run_estimate(ExperimentConfig(grid=(64, 64, 64)), w) for w in estimates.ESTIMATE_CHOICES]
    assert any(c.name == "rhs_lowered_growth" for c in _checks(*reps))
    verdict(7, "bounded-constant protocol for all estimates, apriori stressor", _checks(*reps))


def test_criterion_08_solve(verdict):
    rep = run_solve(ExperimentConfig(experiment="solve", rhs="all"))
    verdict(8, "CG residual, recovery and bounded ratio for k in {1,2}", _checks(rep))


def test_criterion_09_appendix(verdict):
    rep = scaling.run_scaling(ExperimentConfig(), "product")
    verdict(9, "Ehrenpreis constant, exact d_j sums, log product linear", _checks(rep))


def test_criterion_10_determinism(verdict, tmp_path):
    from heislab.lab.report import Check

    runs = [["scaling", "--which", "product"],
            ["identities", "--grid", "32x32x32", "--corpus-size", "4"],
            ["solve", "--k", "1", "--rhs", "known", "--corpus-size", "2"]]
    checks = []
    for argv in runs:
        for fmt in ("csv", "json"):
            paths = [tmp_path / f"{argv[0]}_{i}.{fmt}" for i in range(2)]
            codes = [main(argv + ["--seed", "3", "--format", fmt, "--out", str(p)]) for p in paths]
            same = paths[0].read_bytes() == paths[1].read_bytes()
            checks.append(Check(f"{argv[0]}.{fmt}.identical", 0 if same else 1, 0, same and codes[0] == codes[1]))
    verdict(10, "byte-identical CSV and JSON on repeated runs", checks)
