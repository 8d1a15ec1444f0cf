"""Experiment runners: parameter sweeps, the cost table, single-point runs.

Sweep points are dispatched to a process pool sized by the config
(``workers = 0`` means available parallelism); a single assembler
collects results in sweep order, so output is byte-identical across
worker counts.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence

from .config import ExperimentConfig
from .errors import ConfigError, InternalConsistencyError
from .infomath import binary_entropy
from .model import (
    BetaHyper,
    ParityModelSpec,
    build_parity_model_conjugate,
    build_parity_model_quadrature,
)
from .optimizer import MechanismFamily, private_loss_curve
from .privacy import (
    XorNoiseFamily,
    audit_privacy,
    channel_from_xor_family,
    max_informative_s,
    xor_leakage_closed_form,
)
from .report import (
    AuditResult,
    AuditRow,
    CostTableResult,
    CostTableRow,
    LossTableResult,
    SweepResult,
    SweepRow,
)
from .schemes import (
    ALL_SCHEMES,
    CL_CI,
    COST_CMI_CELLS,
    SchemeSpec,
    cost,
    cost_cmi,
    loss_report,
    nonprivate_losses,
)

__all__ = ["run_sweep_r", "run_sweep_eps", "run_cost_table", "run_loss",
           "run_privacy_audit", "run_experiment", "build_model",
           "ORDER_ATOL"]

#: Row-wise tolerance for the loss ordering asserted before emission.
ORDER_ATOL = 1e-9

R_AXIS_LABEL = "feature mutual information (bits)"
EPS_AXIS_LABEL = "privacy budget (bits)"


def _hyper(cfg: ExperimentConfig) -> BetaHyper:
    return BetaHyper(alpha1=cfg.alpha1, beta1=cfg.beta1,
                     alpha2=cfg.alpha2, beta2=cfg.beta2)


def build_model(cfg: ExperimentConfig, r: float):
    """Instantiate the configured parity model at coupling ``r``."""
    spec = ParityModelSpec(cfg.k_agents, r, _hyper(cfg))
    if cfg.backend == "conjugate":
        return build_parity_model_conjugate(spec)
    return build_parity_model_quadrature(spec, nodes=cfg.quadrature_nodes)


def _resolve_workers(cfg: ExperimentConfig, n_tasks: int) -> int:
    workers = cfg.workers if cfg.workers > 0 else (os.cpu_count() or 1)
    return max(1, min(workers, n_tasks))


def _pool_map(fn: Callable, tasks: Sequence, workers: int) -> list:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def _sweep_r_point(task: tuple[ExperimentConfig, float]) -> dict[str, float]:
    cfg, r = task
    model = build_model(cfg, r)
    reports = nonprivate_losses(model, cfg.n_samples, max_terms=cfg.max_terms)
    return {scheme.code: reports[scheme].worst_case for scheme in ALL_SCHEMES}


def _check_row_ordering(losses: dict[str, float], context: str) -> None:
    clci, cldi, dlci, dldi = (losses["CL/CI"], losses["CL/DI"],
                              losses["DL/CI"], losses["DL/DI"])
    ok = (clci <= min(cldi, dlci) + ORDER_ATOL
          and max(cldi, dlci) <= dldi + ORDER_ATOL)
    if not ok:
        raise InternalConsistencyError(
            f"scheme-loss ordering violated at {context}: {losses}")


def run_sweep_r(cfg: ExperimentConfig) -> SweepResult:
    """Nonprivate losses of the two-agent model over a feature-coupling grid.

    The abscissa is the feature mutual information; couplings r and
    1 - r land on the same abscissa and (for the swap-symmetric default
    prior) their losses must agree within 1e-9, which is checked when
    both branches are on the grid.
    """
    if cfg.k_agents != 2:
        raise ConfigError("sweep_r is defined for the two-agent model")
    grid = cfg.r_grid()
    losses = _pool_map(_sweep_r_point, [(cfg, r) for r in grid],
                       _resolve_workers(cfg, len(grid)))

    for r, row in zip(grid, losses):
        _check_row_ordering(row, f"r={r}")
    hyper_symmetric = (cfg.alpha1 == cfg.beta2 and cfg.beta1 == cfg.alpha2)
    if hyper_symmetric:
        for i, r in enumerate(grid):
            for j, r2 in enumerate(grid):
                if j <= i or abs((1.0 - r) - r2) > 1e-12:
                    continue
                for code, v in losses[i].items():
                    if abs(v - losses[j][code]) > 1e-9:
                        raise InternalConsistencyError(
                            f"{code} losses at r={r} and r={r2} map to the same "
                            f"feature MI but differ by {abs(v - losses[j][code])}")

    order = sorted(range(len(grid)),
                   key=lambda i: (1.0 - binary_entropy(grid[i]), grid[i]))
    rows = tuple(SweepRow(sweep_value=1.0 - binary_entropy(grid[i]),
                          losses=losses[i]) for i in order)
    return SweepResult(kind="r", axis_label=R_AXIS_LABEL, rows=rows)


def _sweep_eps_scheme(task: tuple[ExperimentConfig, str]
                      ) -> tuple[str, tuple, tuple]:
    cfg, code = task
    scheme = SchemeSpec.from_code(code)
    model = build_model(cfg, cfg.r)
    family = MechanismFamily.xor_noise(cfg.k_agents)
    curve = private_loss_curve(model, [scheme], family, cfg.eps_grid(),
                               cfg.n_samples, max_terms=cfg.max_terms)
    return code, curve.losses[scheme], curve.parameters[scheme]


def run_sweep_eps(cfg: ExperimentConfig) -> SweepResult:
    """Leakage-constrained losses of the three-agent model over a budget grid."""
    if cfg.k_agents != 3:
        raise ConfigError("sweep_eps is defined for the three-agent model")
    codes = [s.code for s in ALL_SCHEMES]
    results = dict()
    out = _pool_map(_sweep_eps_scheme, [(cfg, c) for c in codes],
                    _resolve_workers(cfg, len(codes)))
    for code, loss_row, param_row in out:
        results[code] = (loss_row, param_row)
    eps = cfg.eps_grid()
    rows = []
    for i, e in enumerate(eps):
        losses = {code: results[code][0][i] for code in codes}
        rows.append(SweepRow(sweep_value=e, losses=losses,
                             mechanism_s=results[CL_CI.code][1][i]))
    return SweepResult(kind="eps", axis_label=EPS_AXIS_LABEL, rows=tuple(rows))


def run_cost_table(cfg: ExperimentConfig) -> CostTableResult:
    """Loss gaps of the dominated scheme pairs next to their conditional-MI
    values, at the configured coupling.

    Refuses to run when the per-agent losses of any scheme differ beyond
    1e-9: the cost identity is stated for symmetric agents only.
    """
    model = build_model(cfg, cfg.r)
    reports = nonprivate_losses(model, cfg.n_samples, max_terms=cfg.max_terms)
    for scheme, report in reports.items():
        spread = max(report.per_agent_loss) - min(report.per_agent_loss)
        if spread > 1e-9:
            raise InternalConsistencyError(
                f"per-agent losses of {scheme.code} differ by {spread} bits; "
                "the cost identity assumes symmetric agents")
    rows = []
    for (code_a, code_b) in COST_CMI_CELLS:
        a, b = SchemeSpec.from_code(code_a), SchemeSpec.from_code(code_b)
        gap = cost(a, b, reports)
        cmi = cost_cmi(model, (a, b), agent=1, n_samples=cfg.n_samples,
                       max_terms=cfg.max_terms)
        rows.append(CostTableRow(scheme_a=code_a, scheme_b=code_b,
                                 loss_gap_bits=gap, cmi_bits=cmi))
    return CostTableResult(rows=tuple(rows))


def run_loss(cfg: ExperimentConfig) -> LossTableResult:
    """Per-agent losses of all four schemes at one configuration.

    Without a budget the share is unconstrained (identity channel);
    with ``epsilon`` set (three agents only) the collaborative schemes
    use the least-noise feasible XOR share.
    """
    model = build_model(cfg, cfg.r)
    if cfg.epsilon is None:
        reports = nonprivate_losses(model, cfg.n_samples, max_terms=cfg.max_terms)
        return LossTableResult(
            per_agent={s.code: reports[s].per_agent_loss for s in ALL_SCHEMES})
    if cfg.k_agents != 3:
        raise ConfigError("a finite budget needs the three-agent model")
    s_star = max_informative_s(cfg.epsilon, cfg.r)
    channel = channel_from_xor_family(XorNoiseFamily(cfg.k_agents, s_star))
    per_agent = {}
    for scheme in ALL_SCHEMES:
        ch = channel if scheme.collaborative_anywhere else None
        per_agent[scheme.code] = loss_report(
            model, scheme, cfg.n_samples, ch,
            max_terms=cfg.max_terms).per_agent_loss
    return LossTableResult(per_agent=per_agent, epsilon=cfg.epsilon)


def run_privacy_audit(cfg: ExperimentConfig) -> AuditResult:
    """Audit the XOR-noise share at one flip probability against a budget."""
    if cfg.s is None:
        raise ConfigError("privacy_audit needs the flip probability: set s")
    if cfg.epsilon is None:
        raise ConfigError("privacy_audit needs a leakage budget: set epsilon")
    model = build_model(cfg, cfg.r)
    channel = channel_from_xor_family(XorNoiseFamily(cfg.k_agents, cfg.s))
    audit = audit_privacy(channel, model.feature_marginal(), cfg.epsilon)
    rows = []
    for agent, cmi in enumerate(audit.per_agent_cmi, start=1):
        closed = (xor_leakage_closed_form(cfg.s, cfg.r, agent)
                  if cfg.k_agents == 3 else None)
        rows.append(AuditRow(agent=agent, audited_cmi_bits=cmi,
                             closed_form_bits=closed,
                             feasible=cmi <= cfg.epsilon + 1e-12))
    return AuditResult(s=cfg.s, epsilon=cfg.epsilon, rows=tuple(rows))


def run_experiment(cfg: ExperimentConfig):
    """Dispatch on the configured experiment kind."""
    runners = {
        "sweep_r": run_sweep_r,
        "sweep_eps": run_sweep_eps,
        "cost_table": run_cost_table,
        "loss": run_loss,
        "privacy_audit": run_privacy_audit,
    }
    return runners[cfg.kind](cfg)
