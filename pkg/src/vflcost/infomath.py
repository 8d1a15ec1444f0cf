"""Entropy and (conditional) mutual information of exact discrete tables.

All reported quantities are in bits; internal log masses stay in
natural log.  Each metric is computed from its defining expectation and
cross-checked against the chain-rule identity before being returned;
negative values within CLAMP_ATOL of zero clamp to 0, anything more
negative raises :class:`InternalConsistencyError`.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .errors import InternalConsistencyError
from .probtable import ProbTable, _logsumexp_axes

#: Information quantity in bits (log base 2).
Bits = float

LN2 = math.log(2.0)

#: Identity-check tolerance and negative-clamp threshold, in bits.
CLAMP_ATOL = 1e-12


def binary_entropy(r: float) -> Bits:
    """Entropy of a Bernoulli(r) variable in bits; 0*log(0) is 0."""
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"probability {r} outside [0, 1]")
    if r == 0.0 or r == 1.0:
        return 0.0
    return -(r * math.log2(r) + (1.0 - r) * math.log2(1.0 - r))


def _clamp(value: float, what: str) -> Bits:
    if value < -CLAMP_ATOL:
        raise InternalConsistencyError(f"{what} = {value} bits is negative beyond tolerance")
    return max(value, 0.0)


def _entropy_nats(logmass: np.ndarray) -> float:
    with np.errstate(invalid="ignore"):
        terms = np.where(np.isneginf(logmass), 0.0, np.exp(logmass) * logmass)
    return -float(np.sum(terms))


def _as_name_set(names: Iterable[str] | str) -> frozenset[str]:
    if isinstance(names, str):
        return frozenset((names,))
    return frozenset(names)


def entropy(table: ProbTable, targets: Iterable[str] | str) -> Bits:
    """H(targets) of the marginal over ``targets``, in bits."""
    targets = _as_name_set(targets)
    if not targets:
        return 0.0
    marg = table.marginal(targets)
    return _clamp(_entropy_nats(marg.logmass) / LN2, "entropy")


def conditional_entropy(table: ProbTable, targets: Iterable[str] | str,
                        given: Iterable[str] | str) -> Bits:
    """H(targets | given) in bits.

    Computed as the expectation of -log P(targets|given); the chain
    rule H(T,G) - H(G) is asserted to match within CLAMP_ATOL.
    """
    targets = _as_name_set(targets)
    given = _as_name_set(given)
    if targets & given:
        raise ValueError(f"targets and given overlap: {sorted(targets & given)}")
    if not given:
        return entropy(table, targets)
    if not targets:
        return 0.0
    joint = table.marginal(targets | given)
    drop = tuple(i for i, v in enumerate(joint.variables) if v.name in targets)
    lg = _logsumexp_axes(joint.logmass, drop)  # marginal over 'given'
    shape = [1 if v.name in targets else v.cardinality for v in joint.variables]
    lg_b = lg.reshape(shape)
    lj = joint.logmass
    with np.errstate(invalid="ignore"):
        terms = np.where(np.isneginf(lj), 0.0, np.exp(lj) * (lg_b - lj))
    direct = float(np.sum(terms)) / LN2
    chain = entropy(table, targets | given) - entropy(table, given)
    if abs(direct - chain) > CLAMP_ATOL:
        raise InternalConsistencyError(
            f"conditional entropy {direct} violates chain rule value {chain}")
    return _clamp(direct, "conditional entropy")


def mutual_information(table: ProbTable, a: Iterable[str] | str,
                       b: Iterable[str] | str) -> Bits:
    """I(a; b) in bits, from the log-ratio expectation.

    Cross-checked against H(a) - H(a|b) within CLAMP_ATOL.
    """
    a = _as_name_set(a)
    b = _as_name_set(b)
    if a & b:
        raise ValueError(f"variable sets overlap: {sorted(a & b)}")
    if not a or not b:
        return 0.0
    joint = table.marginal(a | b)
    la = _marginal_broadcast(joint, a)
    lb = _marginal_broadcast(joint, b)
    lj = joint.logmass
    with np.errstate(invalid="ignore"):
        terms = np.where(np.isneginf(lj), 0.0, np.exp(lj) * (lj - la - lb))
    direct = float(np.sum(terms)) / LN2
    identity = entropy(table, a) - conditional_entropy(table, a, b)
    if abs(direct - identity) > CLAMP_ATOL:
        raise InternalConsistencyError(
            f"mutual information {direct} disagrees with entropy identity {identity}")
    return _clamp(direct, "mutual information")


def conditional_mutual_information(table: ProbTable, a: Iterable[str] | str,
                                   b: Iterable[str] | str,
                                   given: Iterable[str] | str) -> Bits:
    """I(a; b | given) in bits.

    Computed as the expectation of log(P(a,b|g) / (P(a|g) P(b|g)));
    cross-checked against H(a|g) - H(a|b,g) within CLAMP_ATOL.
    """
    a = _as_name_set(a)
    b = _as_name_set(b)
    given = _as_name_set(given)
    for x, y, tag in ((a, b, "a/b"), (a, given, "a/given"), (b, given, "b/given")):
        if x & y:
            raise ValueError(f"variable sets {tag} overlap: {sorted(x & y)}")
    if not given:
        return mutual_information(table, a, b)
    if not a or not b:
        return 0.0
    joint = table.marginal(a | b | given)
    lag = _marginal_broadcast(joint, a | given)
    lbg = _marginal_broadcast(joint, b | given)
    lg = _marginal_broadcast(joint, given)
    lj = joint.logmass
    with np.errstate(invalid="ignore"):
        terms = np.where(np.isneginf(lj), 0.0, np.exp(lj) * (lj + lg - lag - lbg))
    direct = float(np.sum(terms)) / LN2
    identity = conditional_entropy(table, a, given) - conditional_entropy(
        table, a, b | given)
    if abs(direct - identity) > CLAMP_ATOL:
        raise InternalConsistencyError(
            f"conditional MI {direct} disagrees with entropy identity {identity}")
    return _clamp(direct, "conditional mutual information")


def _marginal_broadcast(joint: ProbTable, keep: frozenset[str]) -> np.ndarray:
    """Log marginal over ``keep``, shaped to broadcast against the joint."""
    drop = tuple(i for i, v in enumerate(joint.variables) if v.name not in keep)
    lm = _logsumexp_axes(joint.logmass, drop)
    shape = [v.cardinality if v.name in keep else 1 for v in joint.variables]
    return lm.reshape(shape)
