"""Command line entry point.

Subcommands select the experiment; a config file provides the base
settings and flags override individual fields.  Exit codes: 0 success,
1 configuration error, 2 numerical/internal-consistency error, 3 I/O
error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .config import ExperimentConfig, parse_config_file, serialize_config
from .errors import (
    ConfigError,
    EnumerationLimitError,
    InternalConsistencyError,
    OutputError,
)
from .report import (
    AuditResult,
    CostTableResult,
    LossTableResult,
    SweepResult,
    emit_csv,
    emit_svg_chart,
)
from .schemes import ALL_SCHEMES
from .sweeps import run_experiment

_SUBCOMMANDS = {
    "sweep-r": "sweep_r",
    "sweep-eps": "sweep_eps",
    "cost-table": "cost_table",
    "loss": "loss",
    "privacy-audit": "privacy_audit",
}

_KIND_DEFAULTS = {
    # the coupling sweep is a two-agent experiment; the budget sweep and
    # the budgeted point losses use the three-agent model
    "sweep_r": {"k_agents": 2},
    "sweep_eps": {"k_agents": 3},
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vflcost",
        description="Exact predictive losses and decentralization costs for "
                    "the four vertical-FL collaboration schemes",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, kind in _SUBCOMMANDS.items():
        p = sub.add_parser(name, help=f"run the {kind} experiment")
        p.add_argument("--config", metavar="PATH",
                       help="INI config file (flags override it)")
        p.add_argument("--out", metavar="PATH", help="CSV output path")
        p.add_argument("--svg", metavar="PATH", help="SVG chart output path")
        p.add_argument("--fig", metavar="PATH",
                       help="matplotlib figure output path (.png/.pdf/...)")
        p.add_argument("--workers", type=int, metavar="N",
                       help="worker processes (0 = available parallelism)")
        p.add_argument("--quadrature-nodes", type=int, metavar="N",
                       dest="quadrature_nodes",
                       help="Gauss-Legendre nodes per prior axis")
        p.add_argument("--backend", choices=("conjugate", "quadrature"),
                       help="prior-integration backend")
        p.add_argument("--N", type=int, dest="n_samples", metavar="N",
                       help="training sample count")
        p.add_argument("--k", type=int, dest="k_agents", metavar="K",
                       help="agent count (2 or 3)")
        p.add_argument("--r", type=float, metavar="R",
                       help="equal-value probability of the first two features")
        p.add_argument("--eps", type=float, dest="epsilon", metavar="BITS",
                       help="leakage budget in bits")
        p.add_argument("--s", type=float, metavar="S",
                       help="flip probability (privacy-audit)")
        p.add_argument("--eps-min", type=float, dest="eps_min", metavar="BITS")
        p.add_argument("--eps-max", type=float, dest="eps_max", metavar="BITS")
        p.add_argument("--eps-steps", type=int, dest="eps_steps", metavar="N")
        p.add_argument("--r-min", type=float, dest="r_min", metavar="R")
        p.add_argument("--r-max", type=float, dest="r_max", metavar="R")
        p.add_argument("--r-steps", type=int, dest="r_steps", metavar="N")
        p.add_argument("--max-terms", type=int, dest="max_terms", metavar="N",
                       help="cap on exact-enumeration weighted terms")
        p.add_argument("--print-config", action="store_true",
                       help="print the effective config and exit")
    return parser


_OVERRIDE_FIELDS = ("workers", "quadrature_nodes", "backend", "n_samples",
                    "k_agents", "r", "epsilon", "s", "eps_min", "eps_max",
                    "eps_steps", "r_min", "r_max", "r_steps", "max_terms",
                    "csv", "svg", "fig")


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    kind = _SUBCOMMANDS[args.command]
    cfg = ExperimentConfig(kind=kind, **_KIND_DEFAULTS.get(kind, {}))
    if args.config:
        cfg = parse_config_file(args.config, base=cfg)
        cfg = replace(cfg, kind=kind)
    overrides = {}
    for name in _OVERRIDE_FIELDS:
        if name == "csv":
            value = args.out
        else:
            value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    return replace(cfg, **overrides)


def _print_summary(result) -> None:
    if isinstance(result, SweepResult):
        head = result.rows[0]
        tail = result.rows[-1]
        print(f"{len(result.rows)} sweep rows over {result.axis_label}: "
              f"[{head.sweep_value:.6g} .. {tail.sweep_value:.6g}]")
        for code in ("CL/CI", "CL/DI", "DL/CI", "DL/DI"):
            col = result.column(code)
            print(f"  {code}: first={col[0]:.9f}  last={col[-1]:.9f} bits")
    elif isinstance(result, CostTableResult):
        print("cost identities (loss gap vs conditional MI, bits):")
        for row in result.rows:
            print(f"  {row.scheme_a:>5} - {row.scheme_b:<5}: "
                  f"gap={row.loss_gap_bits:.9f}  cmi={row.cmi_bits:.9f}  "
                  f"|diff|={row.abs_gap:.2e}")
    elif isinstance(result, LossTableResult):
        budget = "unconstrained" if result.epsilon is None \
            else f"budget {result.epsilon:g} bits"
        print(f"per-agent predictive losses ({budget}):")
        for scheme in ALL_SCHEMES:
            losses = result.per_agent[scheme.code]
            cells = "  ".join(f"{v:.9f}" for v in losses)
            print(f"  {scheme.code}: worst={max(losses):.9f}  [{cells}]")
    elif isinstance(result, AuditResult):
        print(f"leakage audit at s={result.s:g}, budget {result.epsilon:g} bits:")
        for row in result.rows:
            closed = ("" if row.closed_form_bits is None
                      else f"  closed-form={row.closed_form_bits:.12f}")
            print(f"  agent {row.agent}: leakage={row.audited_cmi_bits:.12f}"
                  f"{closed}  feasible={row.feasible}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.print_config:
            print(serialize_config(cfg), end="")
            return 0
        result = run_experiment(cfg)
        _print_summary(result)
        if cfg.csv:
            emit_csv(result, cfg.csv)
            print(f"wrote {cfg.csv}")
        if cfg.svg:
            if not isinstance(result, SweepResult):
                raise ConfigError("SVG charts are available for sweeps only")
            emit_svg_chart(result, cfg.svg)
            print(f"wrote {cfg.svg}")
        if cfg.fig:
            if not isinstance(result, SweepResult):
                raise ConfigError("figures are available for sweeps only")
            from .plotting import render_figure
            render_figure(result, cfg.fig)
            print(f"wrote {cfg.fig}")
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (InternalConsistencyError, EnumerationLimitError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2
    except OutputError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
