"""Aggregation channels and the per-agent leakage constraint.

A channel is a row-stochastic map from the joint feature assignment to
a shared output feature.  A channel is feasible at leakage budget
``epsilon`` when, for every agent, the shared output reveals at most
``epsilon`` bits about that agent's feature given all other features.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigError
from .infomath import Bits, binary_entropy, conditional_mutual_information
from .probtable import LOG_ZERO, NORM_ATOL, ProbTable, VariableSpec, _logsumexp_axes

__all__ = [
    "AggregationChannel",
    "XorNoiseFamily",
    "PrivacyAudit",
    "SHARED_NAME",
    "channel_from_xor_family",
    "identity_channel",
    "audit_privacy",
    "xor_leakage_closed_form",
    "max_informative_s",
    "FEASIBILITY_ATOL",
]

SHARED_NAME = "xhat"

#: Slack when comparing a leakage value against the budget.
FEASIBILITY_ATOL = 1e-12


@dataclass(frozen=True, eq=False)
class AggregationChannel:
    """Stochastic map P(shared | features) over finite alphabets.

    ``kernel`` is a log-space array of shape (input cards..., output
    card); every row must be normalized.
    """

    input_vars: tuple[VariableSpec, ...]
    output_var: VariableSpec
    kernel: np.ndarray

    def __post_init__(self) -> None:
        expect = tuple(v.cardinality for v in self.input_vars) + (
            self.output_var.cardinality,)
        if self.kernel.shape != expect:
            raise ValueError(f"kernel shape {self.kernel.shape} != {expect}")
        if self.output_var.name in {v.name for v in self.input_vars}:
            raise ValueError("output variable shadows an input variable")
        rows = _logsumexp_axes(self.kernel, (self.kernel.ndim - 1,))
        if np.any(np.abs(np.expm1(rows)) > NORM_ATOL):
            raise ValueError("channel rows are not normalized within 1e-12")
        self.kernel.setflags(write=False)

    @property
    def k_agents(self) -> int:
        return len(self.input_vars)


@dataclass(frozen=True)
class XorNoiseFamily:
    """Parity share with an independent flip: output = XOR(features) ^ noise."""

    k_agents: int
    s: float

    def __post_init__(self) -> None:
        if self.k_agents < 2:
            raise ConfigError(f"need at least 2 agents, got {self.k_agents}")
        if not 0.0 <= self.s <= 1.0:
            raise ConfigError(f"flip probability s={self.s} outside [0, 1]")


@dataclass(frozen=True)
class PrivacyAudit:
    """Per-agent leakage of one channel against one feature law."""

    per_agent_cmi: tuple[Bits, ...]
    epsilon: Bits
    feasible: bool

    @property
    def worst_leakage(self) -> Bits:
        return max(self.per_agent_cmi)


def _binary_feature_vars(k: int) -> tuple[VariableSpec, ...]:
    return tuple(VariableSpec(f"x{i + 1}", 2) for i in range(k))


def channel_from_xor_family(family: XorNoiseFamily) -> AggregationChannel:
    """Materialize the XOR-noise channel as an explicit kernel."""
    k, s = family.k_agents, family.s
    grids = np.indices((2,) * k)
    parity = np.zeros((2,) * k, dtype=int)
    for g in grids:
        parity ^= g
    probs = np.empty((2,) * k + (2,))
    probs[..., 0] = np.where(parity == 0, 1.0 - s, s)
    probs[..., 1] = np.where(parity == 1, 1.0 - s, s)
    with np.errstate(divide="ignore"):
        kernel = np.log(probs)
    return AggregationChannel(_binary_feature_vars(k), VariableSpec(SHARED_NAME, 2),
                              kernel)


def identity_channel(feature_vars: tuple[VariableSpec, ...] | list[VariableSpec],
                     ) -> AggregationChannel:
    """Deterministic copy of the full feature tuple.

    The output alphabet is the product alphabet; assignment
    (v1, ..., vK) encodes to its row-major (C-order) mixed-radix index.
    """
    feature_vars = tuple(feature_vars)
    cards = tuple(v.cardinality for v in feature_vars)
    out_card = int(np.prod(cards))
    kernel = np.full(cards + (out_card,), LOG_ZERO)
    flat = kernel.reshape(out_card, out_card)
    np.fill_diagonal(flat, 0.0)
    return AggregationChannel(feature_vars, VariableSpec(SHARED_NAME, out_card),
                              kernel)


def audit_privacy(channel: AggregationChannel, feature_marginal: ProbTable,
                  epsilon: Bits) -> PrivacyAudit:
    """Audit the leakage constraint for every agent.

    The joint of the feature law and the channel output is built
    exactly, then each agent's leakage is the conditional mutual
    information between the shared output and that agent's feature
    given all remaining features.
    """
    if epsilon < 0:
        raise ConfigError(f"leakage budget must be nonnegative, got {epsilon}")
    expect = tuple((v.name, v.cardinality) for v in channel.input_vars)
    got = tuple((v.name, v.cardinality) for v in feature_marginal.variables)
    if expect != got:
        raise ConfigError(
            f"feature marginal over {got} does not match channel inputs {expect}")
    joint = feature_marginal.attach(channel.kernel, [channel.output_var])
    names = [v.name for v in channel.input_vars]
    shared = channel.output_var.name
    cmis = []
    for k, name in enumerate(names):
        others = [n for n in names if n != name]
        cmis.append(conditional_mutual_information(joint, {shared}, {name}, others))
    per_agent = tuple(cmis)
    return PrivacyAudit(per_agent_cmi=per_agent, epsilon=epsilon,
                        feasible=max(per_agent) <= epsilon + FEASIBILITY_ATOL)


def xor_leakage_closed_form(s: float, r: float, agent: int) -> Bits:
    """Closed-form leakage of the three-agent XOR-noise channel, in bits.

    Evaluates, for the requested agent, the exact conditional mutual
    information between the shared output and that agent's feature
    given the other two, as a function of the flip probability ``s``
    and the feature coupling ``r``.
    """
    if not 0.0 <= s <= 1.0:
        raise ConfigError(f"flip probability s={s} outside [0, 1]")
    if not 0.0 <= r <= 1.0:
        raise ConfigError(f"equal-value probability r={r} outside [0, 1]")
    hs = binary_entropy(s)
    if agent == 1:
        return binary_entropy(s * r + (1 - r) * (1 - s)) - hs
    if agent == 2:
        same = (1 - r) ** 2 + r ** 2
        inner = ((1 - r) ** 2 * s + r ** 2 * (1 - s)) / same
        return 2 * r * (1 - r) + same * binary_entropy(inner) - hs
    if agent == 3:
        return binary_entropy(s * (1 - r) + r * (1 - s)) - hs
    raise ConfigError(f"agent must be 1, 2 or 3, got {agent}")


def _worst_leakage(s: float, r: float) -> Bits:
    return max(xor_leakage_closed_form(s, r, agent) for agent in (1, 2, 3))


@lru_cache(maxsize=4096)
def max_informative_s(epsilon: Bits, r: float) -> float:
    """Least flip probability in [0, 0.5] meeting every agent's constraint.

    Exploits that each agent's leakage is nonincreasing in ``s`` on
    [0, 0.5] (a property verified by the test suite): returns 0 when
    the budget already covers the noiseless share, 0.5 when only the
    uninformative share is feasible, and otherwise bisects the worst
    per-agent leakage down to a 1e-10 bracket, returning the feasible
    endpoint.
    """
    if epsilon < 0:
        raise ConfigError(f"leakage budget must be nonnegative, got {epsilon}")
    if _worst_leakage(0.0, r) <= epsilon + FEASIBILITY_ATOL:
        return 0.0
    if epsilon == 0.0:
        # only the uninformative share has exactly zero leakage; bisecting
        # would stall on binary-entropy underflow just below 0.5
        return 0.5
    lo, hi = 0.0, 0.5  # lo infeasible, hi always feasible (zero leakage)
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if _worst_leakage(mid, r) <= epsilon:
            hi = mid
        else:
            lo = mid
    return hi
