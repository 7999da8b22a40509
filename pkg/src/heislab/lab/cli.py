"""Command-line runner: ``heislab <experiment> [options]``.

Exit status is 0 when every check of the invocation passes, 1 when some check
fails and 2 on invalid input or a numerical breakdown (e.g. CG stalling).
"""
from __future__ import annotations

import argparse
import sys

from .. import __version__
from .algebra import VERIFY_CHOICES, run_algebra
from .config import ExperimentConfig, config_hash, from_mapping, load_config, parse_box, parse_grid
from .estimates import ESTIMATE_CHOICES, run_estimate
from .identities import run_identity_suite
from .report import emit_report
from .scaling import SCALING_CHOICES, run_scaling
from .solve import RHS_CHOICES, run_solve

__all__ = ["main", "build_parser", "config_from_args", "run_experiment"]

EXPERIMENTS = ("identities", "scaling", "estimate", "solve", "algebra")
_ESTIMATE_SHORT = {"gain0": "gain_zero", "gainminus": "gain_minus", "gainplus0": "gain_plus_k0"}


def _floats(text):
    return tuple(float(v) for v in text.split(","))


def _global_flags() -> argparse.ArgumentParser:
    # SUPPRESS keeps unset flags out of the namespace, so they may appear on
    # either side of the subcommand and config-file values survive
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    p.add_argument("--config", help="JSON file whose keys mirror these flags")
    p.add_argument("--grid", type=parse_grid, help="N1xN2xN3")
    p.add_argument("--box", type=parse_box, help="half-extents R1,R2,R3")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("csv", "json"))
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(prog="heislab", parents=[common],
                                     description="Numerical checks for the Heisenberg-type operators E_k.")
    parser.add_argument("--version", action="version", version=f"heislab {__version__}")
    sub = parser.add_subparsers(dest="experiment", metavar="EXPERIMENT")

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_, argument_default=argparse.SUPPRESS)

    p = add("identities", "numeric identities on a random corpus")
    p.add_argument("--corpus-size", dest="corpus_size", type=int)

    p = add("scaling", "parameter sweeps with power-law fits")
    p.add_argument("--which", choices=SCALING_CHOICES + ("appendix_product", "all"))
    p.add_argument("--k", type=int)
    p.add_argument("--lambdas", type=_floats)
    p.add_argument("--deltas", type=_floats)
    p.add_argument("--eps", type=_floats)
    p.add_argument("--p", type=int)
    p.add_argument("--a", type=float, help="cutoff plateau half-width in t")

    p = add("estimate", "bounded-constant ratio checks")
    p.add_argument("--which", choices=ESTIMATE_CHOICES + tuple(_ESTIMATE_SHORT) + ("all",))
    p.add_argument("--k", type=int)
    p.add_argument("--s", type=float)
    p.add_argument("--s0", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--corpus-size", dest="corpus_size", type=int)

    p = add("solve", "conjugate-gradient solve of (E_k + eps) u = f")
    p.add_argument("--k", type=int)
    p.add_argument("--rhs", choices=RHS_CHOICES)
    p.add_argument("--corpus-size", dest="corpus_size", type=int)

    p = add("algebra", "exact symbolic checks")
    p.add_argument("--verify", choices=VERIFY_CHOICES + ("all",))
    p.add_argument("--budget", type=int)
    return parser


def config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    """Merge a config file (if any) with explicit flags; flags win."""
    values = {k: v for k, v in vars(ns).items() if k != "config" and v is not None}
    if "config" in ns:
        return load_config(ns.config, **values)
    return from_mapping(values)


def _expand(choice, choices):
    return list(choices) if choice == "all" else [choice]


def run_experiment(cfg: ExperimentConfig) -> list:
    """Run the experiment named by ``cfg`` and return its reports."""
    exp = cfg.experiment
    if exp == "identities":
        return [run_identity_suite(cfg)]
    if exp == "scaling":
        if cfg.which is None:
            raise ValueError("scaling needs --which")
        return [run_scaling(cfg, w) for w in _expand(cfg.which, SCALING_CHOICES)]
    if exp == "estimate":
        if cfg.which is None:
            raise ValueError("estimate needs --which")
        names = _expand(cfg.which, ESTIMATE_CHOICES)
        return [run_estimate(cfg, _ESTIMATE_SHORT.get(w, w)) for w in names]
    if exp == "solve":
        return [run_solve(cfg)]
    if exp == "algebra":
        verify = cfg.verify or "all"
        return [run_algebra(v, cfg.budget) for v in _expand(verify, VERIFY_CHOICES)]
    raise ValueError(f"unknown experiment {exp!r}; choose from {EXPERIMENTS}")


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        if "experiment" not in vars(ns) or ns.experiment is None:
            if "config" not in ns:
                parser.error("an experiment is required")
        reports = run_experiment(cfg)
        header = {"version": __version__, "experiment": cfg.experiment, "config_hash": config_hash(cfg)}
        header.update({f"config.{k}": v for k, v in cfg.to_dict().items() if v is not None})
        text = emit_report(reports, cfg.out, cfg.format, header)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"heislab: error: {exc}", file=sys.stderr)
        return 2
    if cfg.out is None:
        sys.stdout.write(text)
    ok = True
    for rep in reports:
        for c in rep.checks:
            ok &= c.passed
            print(f"{'PASS' if c.passed else 'FAIL'} {rep.name}.{c.name} measured={c.measured:.6g} "
                  f"threshold={c.threshold}", file=sys.stderr)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
