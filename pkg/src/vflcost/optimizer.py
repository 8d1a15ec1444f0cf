"""Leakage-constrained minimization of the worst-case scheme loss.

The outer optimization over aggregation mechanisms supports exactly two
family kinds: the analytic XOR-noise family (flip probability s in
[0, 0.5], least-noise feasible member selected in closed form) and
explicit finite channel lists (filtered through the leakage audit).
Anything richer is out of scope by design.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigError
from .infomath import Bits
from .privacy import (
    FEASIBILITY_ATOL,
    AggregationChannel,
    XorNoiseFamily,
    audit_privacy,
    channel_from_xor_family,
    max_informative_s,
    xor_leakage_closed_form,
)
from .schemes import DEFAULT_MAX_TERMS, DL_DI, SchemeSpec, loss_report

__all__ = [
    "MechanismFamily",
    "PrivateLossResult",
    "PrivateLossCurve",
    "private_loss",
    "private_loss_curve",
    "VERIFY_GRID_STEP",
]

#: Flip-probability grid step used to cross-check the analytic optimum.
VERIFY_GRID_STEP = 0.01

#: Loss slack allowed between the analytic optimum and the grid minimum.
_OPTIMALITY_ATOL = 1e-9


@dataclass(frozen=True)
class MechanismFamily:
    """Family of candidate aggregation mechanisms for the outer minimization."""

    kind: str  # "xor_noise" | "generic_list"
    k_agents: int | None = None
    channels: tuple[AggregationChannel, ...] = ()

    def __post_init__(self) -> None:
        if self.kind == "xor_noise":
            if self.k_agents is None or self.k_agents < 2:
                raise ConfigError("xor_noise family needs an agent count >= 2")
        elif self.kind == "generic_list":
            if not self.channels:
                raise ConfigError("generic_list family must not be empty")
        else:
            raise ConfigError(f"unknown mechanism family kind {self.kind!r}")

    @classmethod
    def xor_noise(cls, k_agents: int) -> "MechanismFamily":
        return cls(kind="xor_noise", k_agents=k_agents)

    @classmethod
    def generic_list(cls, channels: Sequence[AggregationChannel],
                     ) -> "MechanismFamily":
        return cls(kind="generic_list", channels=tuple(channels))


@dataclass(frozen=True)
class PrivateLossResult:
    """Optimized loss, the mechanism achieving it, and its parameter."""

    loss: Bits
    mechanism: AggregationChannel | None
    parameter: float | int | None
    grid_fallback: bool = False


@dataclass(frozen=True)
class PrivateLossCurve:
    """Per-scheme losses and chosen mechanism parameters over a budget grid."""

    epsilons: tuple[float, ...]
    losses: Mapping[SchemeSpec, tuple[Bits, ...]]
    parameters: Mapping[SchemeSpec, tuple[float | int | None, ...]]


class _XorWorstCase:
    """Memoized worst-case loss of one scheme as a function of the flip
    probability; reused across budget grid points."""

    def __init__(self, model, scheme: SchemeSpec, n_samples: int, max_terms: int):
        self.model = model
        self.scheme = scheme
        self.n_samples = n_samples
        self.max_terms = max_terms
        self._memo: dict[float, float] = {}

    def __call__(self, s: float) -> Bits:
        got = self._memo.get(s)
        if got is None:
            channel = channel_from_xor_family(
                XorNoiseFamily(self.model.k_agents, s))
            got = loss_report(self.model, self.scheme, self.n_samples, channel,
                              max_terms=self.max_terms).worst_case
            self._memo[s] = got
        return got


def _require_xor_applicable(model, family: MechanismFamily) -> float:
    if family.k_agents != model.k_agents:
        raise ConfigError(
            f"xor_noise family is for {family.k_agents} agents but the model "
            f"has {model.k_agents}")
    if model.k_agents != 3:
        raise ConfigError(
            "the analytic xor_noise path is available for the three-agent "
            "model only; use a generic_list family otherwise")
    spec = getattr(model, "parity_spec", None)
    if spec is None:
        raise ConfigError(
            "xor_noise optimization needs a parity model (the leakage "
            "closed forms are specific to its feature law); use generic_list")
    return spec.r


def private_loss(model, scheme: SchemeSpec, family: MechanismFamily | None,
                 epsilon: Bits, n_samples: int, *,
                 max_terms: int = DEFAULT_MAX_TERMS,
                 verify_grid_step: float | None = VERIFY_GRID_STEP,
                 _cache: _XorWorstCase | None = None) -> PrivateLossResult:
    """Minimize one scheme's worst-case loss over the feasible mechanisms.

    For the XOR-noise family the least feasible noise is located
    analytically; when ``verify_grid_step`` is set, that choice is
    cross-checked against a feasible flip-probability grid and the
    engine falls back to the grid minimum (with a warning) should the
    analytic member ever lose.  The fully decentralized scheme ignores
    the family.
    """
    if epsilon < 0:
        raise ConfigError(f"leakage budget must be nonnegative, got {epsilon}")
    if scheme == DL_DI:
        loss = loss_report(model, scheme, n_samples, None,
                           max_terms=max_terms).worst_case
        return PrivateLossResult(loss=loss, mechanism=None, parameter=None)
    if family is None:
        raise ConfigError(f"{scheme.code} requires a mechanism family")

    if family.kind == "xor_noise":
        r = _require_xor_applicable(model, family)
        evaluate = _cache or _XorWorstCase(model, scheme, n_samples, max_terms)
        s_star = max_informative_s(epsilon, r)
        loss = evaluate(s_star)
        best = PrivateLossResult(
            loss=loss, mechanism=channel_from_xor_family(
                XorNoiseFamily(model.k_agents, s_star)),
            parameter=s_star)
        if verify_grid_step is None:
            return best
        worst = [max(xor_leakage_closed_form(s, r, a) for a in (1, 2, 3))
                 for s in _s_grid(verify_grid_step)]
        feasible = [s for s, w in zip(_s_grid(verify_grid_step), worst)
                    if w <= epsilon + FEASIBILITY_ATOL]
        grid_losses = [evaluate(s) for s in feasible]
        if grid_losses and min(grid_losses) < loss - _OPTIMALITY_ATOL:
            s_min = feasible[int(np.argmin(grid_losses))]
            warnings.warn(
                f"analytic flip probability {s_star} lost to grid member "
                f"{s_min} by {loss - min(grid_losses)} bits; using the grid "
                "minimum", RuntimeWarning)
            return PrivateLossResult(
                loss=min(grid_losses),
                mechanism=channel_from_xor_family(
                    XorNoiseFamily(model.k_agents, s_min)),
                parameter=s_min, grid_fallback=True)
        return best

    # generic list: audit every member, keep the best feasible one
    marginal = model.feature_marginal()
    best = None
    best_idx = None
    for idx, channel in enumerate(family.channels):
        audit = audit_privacy(channel, marginal, epsilon)
        if not audit.feasible:
            continue
        loss = loss_report(model, scheme, n_samples, channel,
                           max_terms=max_terms).worst_case
        if best is None or loss < best:
            best, best_idx = loss, idx
    if best is None:
        raise ConfigError(
            f"no member of the {len(family.channels)}-channel family meets "
            f"the leakage budget {epsilon}")
    return PrivateLossResult(loss=best, mechanism=family.channels[best_idx],
                             parameter=best_idx)


def _s_grid(step: float) -> list[float]:
    n = int(round(0.5 / step))
    return [min(i * step, 0.5) for i in range(n + 1)]


def private_loss_curve(model, schemes: Sequence[SchemeSpec],
                       family: MechanismFamily | None, epsilons: Sequence[float],
                       n_samples: int, *, max_terms: int = DEFAULT_MAX_TERMS,
                       verify_grid_step: float | None = VERIFY_GRID_STEP,
                       ) -> PrivateLossCurve:
    """Losses of several schemes over an ascending budget grid.

    The fully decentralized row is evaluated once and replicated: its
    loss is structurally independent of the budget.  Worst-case losses
    per flip probability are memoized across the grid.
    """
    eps = [float(e) for e in epsilons]
    if not eps:
        raise ConfigError("budget grid must be nonempty")
    if any(b < a for a, b in zip(eps, eps[1:])):
        raise ConfigError("budget grid must be sorted ascending")
    losses: dict[SchemeSpec, tuple[Bits, ...]] = {}
    params: dict[SchemeSpec, tuple[float | int | None, ...]] = {}
    for scheme in schemes:
        if scheme == DL_DI:
            base = private_loss(model, scheme, None, eps[0], n_samples,
                                max_terms=max_terms)
            losses[scheme] = tuple(base.loss for _ in eps)
            params[scheme] = tuple(None for _ in eps)
            continue
        cache = None
        if family is not None and family.kind == "xor_noise":
            cache = _XorWorstCase(model, scheme, n_samples, max_terms)
        row = [private_loss(model, scheme, family, e, n_samples,
                            max_terms=max_terms,
                            verify_grid_step=verify_grid_step, _cache=cache)
               for e in eps]
        losses[scheme] = tuple(r.loss for r in row)
        params[scheme] = tuple(r.parameter for r in row)
    return PrivateLossCurve(epsilons=tuple(eps), losses=losses, parameters=params)
