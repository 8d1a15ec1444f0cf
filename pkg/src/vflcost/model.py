"""Finite Bayesian model classes for the vertical-FL engine.

A model class couples a prior over parameter points with per-parameter
joint distributions P(features, label | param).  Two interchangeable
backends are provided for the built-in parity models:

* :func:`build_parity_model_quadrature` discretizes the product-Beta
  prior on a tensorized Gauss-Legendre grid, yielding a generic
  :class:`ModelClass` that the enumeration engine treats as an opaque
  finite mixture.
* :class:`ConjugateParityModel` keeps the prior continuous and exposes
  exact Beta-moment integrals; it is the authoritative backend for the
  parity models.

Both describe the same data law: symmetric binary features coupled
through an equal-value probability, and a label that is Bernoulli with
one of two unknown success rates keyed on the feature parity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np
from scipy.special import betaln

from .errors import ConfigError
from .probtable import ProbTable, VariableSpec, log_sum_exp
from .privacy import AggregationChannel

__all__ = [
    "BetaHyper",
    "ParityModelSpec",
    "ModelClass",
    "ConjugateParityModel",
    "build_parity_model_quadrature",
    "build_parity_model_conjugate",
    "conjugate_loglik",
    "per_param_visible_table",
    "LABEL_NAME",
]

LABEL_NAME = "y"


@dataclass(frozen=True)
class BetaHyper:
    """Hyperparameters of the independent Beta priors on the two label rates."""

    alpha1: float = 2.0
    beta1: float = 1.5
    alpha2: float = 1.5
    beta2: float = 2.0

    def __post_init__(self) -> None:
        for name in ("alpha1", "beta1", "alpha2", "beta2"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ConfigError(f"{name} must be positive and finite, got {v}")

    @property
    def mean1(self) -> float:
        return self.alpha1 / (self.alpha1 + self.beta1)

    @property
    def mean2(self) -> float:
        return self.alpha2 / (self.alpha2 + self.beta2)


@dataclass(frozen=True)
class ParityModelSpec:
    """Two- or three-agent binary model with parity-keyed label rates.

    ``r`` is the probability that the first two features take equal
    values; with three agents it is also the probability that the third
    feature copies the second.
    """

    k_agents: int
    r: float
    hyper: BetaHyper = field(default_factory=BetaHyper)

    def __post_init__(self) -> None:
        if self.k_agents not in (2, 3):
            raise ConfigError(f"agent count must be 2 or 3, got {self.k_agents}")
        if not 0.0 <= self.r <= 1.0:
            raise ConfigError(f"equal-value probability r={self.r} outside [0, 1]")

    @property
    def feature_vars(self) -> tuple[VariableSpec, ...]:
        return tuple(VariableSpec(f"x{i + 1}", 2) for i in range(self.k_agents))

    @property
    def label_var(self) -> VariableSpec:
        return VariableSpec(LABEL_NAME, 2)

    def feature_probs(self) -> np.ndarray:
        """Joint feature law as a dense array of shape (2,) * k_agents."""
        r = self.r
        pair = np.array([[r / 2, (1 - r) / 2], [(1 - r) / 2, r / 2]])
        if self.k_agents == 2:
            return pair
        third = np.array([[r, 1 - r], [1 - r, r]])  # P(x3 | x2)
        return pair[:, :, None] * third[None, :, :]

    def parity(self) -> np.ndarray:
        """Feature parity (XOR of all coordinates), same shape as the law."""
        grids = np.indices((2,) * self.k_agents)
        out = np.zeros((2,) * self.k_agents, dtype=int)
        for g in grids:
            out ^= g
        return out


@dataclass(frozen=True, eq=False)
class ModelClass:
    """Finite mixture model: prior weights over opaque parameter points.

    ``cond_logmass`` stacks one normalized log table over
    (features..., label) per parameter point, so the enumeration engine
    can treat arbitrary finite model classes uniformly.
    """

    feature_vars: tuple[VariableSpec, ...]
    label_var: VariableSpec
    param_points: tuple
    prior_logweights: np.ndarray
    cond_logmass: np.ndarray
    parity_spec: ParityModelSpec | None = None

    def __post_init__(self) -> None:
        n_params = len(self.param_points)
        cards = tuple(v.cardinality for v in self.feature_vars) + (
            self.label_var.cardinality,)
        if self.prior_logweights.shape != (n_params,):
            raise ValueError("prior_logweights length mismatch")
        if self.cond_logmass.shape != (n_params,) + cards:
            raise ValueError(
                f"cond_logmass shape {self.cond_logmass.shape} != {(n_params,) + cards}")
        total = log_sum_exp(self.prior_logweights)
        if abs(math.expm1(total)) > 1e-12:
            raise ValueError("prior weights do not sum to 1")
        flat = self.cond_logmass.reshape(n_params, -1)
        with np.errstate(divide="ignore"):
            sums = np.exp(flat).sum(axis=1)
        if np.any(np.abs(sums - 1.0) > 1e-12):
            raise ValueError("a conditional table is not normalized")

    @property
    def k_agents(self) -> int:
        return len(self.feature_vars)

    @property
    def variables(self) -> tuple[VariableSpec, ...]:
        return self.feature_vars + (self.label_var,)

    @cached_property
    def cond_mass(self) -> np.ndarray:
        """Linear-space copy of the stacked conditional tables."""
        out = np.exp(self.cond_logmass)
        out.setflags(write=False)
        return out

    def param_index(self, param) -> int:
        try:
            return self.param_points.index(param)
        except ValueError:
            raise KeyError(f"unknown parameter point {param!r}") from None

    def cond_table(self, param) -> ProbTable:
        """The conditional joint over (features..., label) at one point."""
        i = self.param_index(param)
        return ProbTable.from_logmass(self.variables, self.cond_logmass[i])

    @cached_property
    def feature_logmass(self) -> np.ndarray:
        """Prior-predictive feature marginal (log), shape = feature cards."""
        mass = np.tensordot(np.exp(self.prior_logweights),
                            self.cond_mass.sum(axis=-1), axes=(0, 0))
        with np.errstate(divide="ignore"):
            out = np.log(mass)
        out.setflags(write=False)
        return out

    def feature_marginal(self) -> ProbTable:
        return ProbTable.from_logmass(self.feature_vars, self.feature_logmass,
                                      normalize=True)


@dataclass(frozen=True)
class ConjugateParityModel:
    """Parity model with the product-Beta prior integrated exactly.

    The label law depends on the features only through their parity, so
    any prior integral the enumeration engine needs reduces to Beta
    moments E[W^c (1-W)^d]; :meth:`label_moment_log` evaluates them in
    closed form.  Hashable, so downstream mechanisms can memoize on it.
    """

    spec: ParityModelSpec

    @property
    def k_agents(self) -> int:
        return self.spec.k_agents

    @property
    def feature_vars(self) -> tuple[VariableSpec, ...]:
        return self.spec.feature_vars

    @property
    def label_var(self) -> VariableSpec:
        return self.spec.label_var

    @property
    def parity_spec(self) -> ParityModelSpec:
        return self.spec

    @cached_property
    def feature_logmass(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            out = np.log(self.spec.feature_probs())
        out.setflags(write=False)
        return out

    def feature_marginal(self) -> ProbTable:
        return ProbTable.from_logmass(self.feature_vars, self.feature_logmass,
                                      normalize=True)

    def label_moment_log(self, max_power: int) -> tuple[np.ndarray, np.ndarray]:
        """Log moment tables (M1, M2) with M[c, d] = log E[W^c (1-W)^d].

        Valid for all 0 <= c, d <= max_power.
        """
        h = self.spec.hyper
        c = np.arange(max_power + 1)[:, None]
        d = np.arange(max_power + 1)[None, :]
        m1 = betaln(h.alpha1 + c, h.beta1 + d) - betaln(h.alpha1, h.beta1)
        m2 = betaln(h.alpha2 + c, h.beta2 + d) - betaln(h.alpha2, h.beta2)
        return m1, m2


def build_parity_model_conjugate(spec: ParityModelSpec) -> ConjugateParityModel:
    """Exact-integration backend for a parity model."""
    return ConjugateParityModel(spec)


def build_parity_model_quadrature(spec: ParityModelSpec,
                                  nodes: int = 256) -> ModelClass:
    """Discretize the product-Beta prior on a Gauss-Legendre grid.

    Parameter points are (w1, w2) pairs on the tensorized grid mapped
    to (0, 1)^2; prior weights fold the Beta densities into the
    quadrature weights and are renormalized.  The map flattens at the
    endpoints (w = sin^2(pi t / 2)), which removes the algebraic
    endpoint behavior of Beta densities and keeps nodes strictly
    interior, so convergence stays spectral for smooth label laws.
    """
    if nodes < 8:
        raise ConfigError(f"need at least 8 quadrature nodes per axis, got {nodes}")
    h = spec.hyper
    x, wq = np.polynomial.legendre.leggauss(nodes)
    t = 0.5 * (x + 1.0)
    u = np.sin(0.5 * np.pi * t) ** 2
    log_u = 2.0 * np.log(np.sin(0.5 * np.pi * t))
    log_1mu = 2.0 * np.log(np.cos(0.5 * np.pi * t))
    log_wq = np.log(0.5 * wq) + np.log(0.5 * np.pi * np.sin(np.pi * t))
    lw1 = log_wq + (h.alpha1 - 1) * log_u + (h.beta1 - 1) * log_1mu \
        - betaln(h.alpha1, h.beta1)
    lw2 = log_wq + (h.alpha2 - 1) * log_u + (h.beta2 - 1) * log_1mu \
        - betaln(h.alpha2, h.beta2)
    prior = (lw1[:, None] + lw2[None, :]).ravel()
    prior -= log_sum_exp(prior)

    w1 = np.repeat(u, nodes)
    w2 = np.tile(u, nodes)
    param_points = tuple(zip(w1.tolist(), w2.tolist()))

    feat = spec.feature_probs()
    parity = spec.parity()
    p_y1 = np.where(parity[None, ...] == 0,
                    w1.reshape((-1,) + (1,) * spec.k_agents),
                    w2.reshape((-1,) + (1,) * spec.k_agents))
    cond = np.stack([feat[None, ...] * (1.0 - p_y1), feat[None, ...] * p_y1],
                    axis=-1)
    with np.errstate(divide="ignore"):
        cond_logmass = np.log(cond)
    return ModelClass(
        feature_vars=spec.feature_vars,
        label_var=spec.label_var,
        param_points=param_points,
        prior_logweights=prior,
        cond_logmass=cond_logmass,
        parity_spec=spec,
    )


def point_mass_parity_model(spec: ParityModelSpec, w1: float, w2: float) -> ModelClass:
    """Degenerate one-point model class, useful as a sanity fixture."""
    if not (0.0 <= w1 <= 1.0 and 0.0 <= w2 <= 1.0):
        raise ConfigError("label rates must lie in [0, 1]")
    feat = spec.feature_probs()
    parity = spec.parity()
    p_y1 = np.where(parity == 0, w1, w2)
    cond = np.stack([feat * (1.0 - p_y1), feat * p_y1], axis=-1)
    with np.errstate(divide="ignore"):
        cond_logmass = np.log(cond)[None, ...]
    return ModelClass(
        feature_vars=spec.feature_vars,
        label_var=spec.label_var,
        param_points=((w1, w2),),
        prior_logweights=np.zeros(1),
        cond_logmass=cond_logmass,
        parity_spec=spec,
    )


def conjugate_loglik(counts, hyper: BetaHyper) -> float:
    """Log prior integral of the label likelihood for given outcome counts.

    ``counts[y][parity]`` holds how many samples had label ``y`` on a
    feature configuration of that parity.  The result is the log of
    E[W1^n(1,0) (1-W1)^n(0,0) W2^n(1,1) (1-W2)^n(0,1)] under the
    product-Beta prior, i.e. a ratio of Beta functions per axis.
    """
    n = np.asarray(counts)
    if n.shape != (2, 2):
        raise ValueError(f"counts must be 2x2 (label, parity), got shape {n.shape}")
    if np.any(n < 0) or not np.issubdtype(n.dtype, np.integer):
        raise ValueError("counts must be nonnegative integers")
    h = hyper
    return float(
        betaln(h.alpha1 + n[1, 0], h.beta1 + n[0, 0]) - betaln(h.alpha1, h.beta1)
        + betaln(h.alpha2 + n[1, 1], h.beta2 + n[0, 1]) - betaln(h.alpha2, h.beta2))


def per_param_visible_table(model: ModelClass, param,
                            channel: AggregationChannel | None,
                            visible: Iterable[str]) -> ProbTable:
    """Marginal of one parameter's joint (plus optional shared feature)
    onto a visible variable set.

    The shared-feature variable may be requested only when a channel is
    supplied; its per-sample draw is attached to the features before
    marginalizing.
    """
    visible = set(visible)
    table = model.cond_table(param)
    known = set(table.names)
    if channel is not None:
        known.add(channel.output_var.name)
    unknown = visible - known
    if unknown:
        raise ConfigError(f"unknown visible variables {sorted(unknown)}")
    if channel is not None and channel.output_var.name in visible:
        _check_channel_inputs(model, channel)
        table = table.attach(channel.kernel, [channel.output_var],
                             given=[v.name for v in model.feature_vars])
    elif channel is None and visible - set(table.names):
        raise ConfigError("shared-feature variable requested without a channel")
    return table.marginal(visible)


def _check_channel_inputs(model, channel: AggregationChannel) -> None:
    expect = tuple((v.name, v.cardinality) for v in model.feature_vars)
    got = tuple((v.name, v.cardinality) for v in channel.input_vars)
    if expect != got:
        raise ConfigError(
            f"channel inputs {got} do not match model features {expect}")
