"""Exact discrete probability tables over named finite variables.

Tables store natural-log mass densely, one axis per variable, with
``-inf`` as the sentinel for exact zero mass.  All operations are pure;
tables are immutable after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InternalConsistencyError

#: Log-mass sentinel for exact zero probability.
LOG_ZERO = float("-inf")

#: |exp-sum - 1| tolerance for a table to count as normalized.
NORM_ATOL = 1e-12


def log_sum_exp(values: Iterable[float]) -> float:
    """Overflow-safe log(sum(exp(values))); the empty sum is LOG_ZERO."""
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values,
                     dtype=float)
    if arr.size == 0:
        return LOG_ZERO
    hi = float(np.max(arr))
    if hi == LOG_ZERO:
        return LOG_ZERO
    return hi + math.log(float(np.sum(np.exp(arr - hi))))


@dataclass(frozen=True)
class VariableSpec:
    """A named finite-alphabet variable; values are 0..cardinality-1."""

    name: str
    cardinality: int

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("variable name must be nonempty")
        if self.cardinality < 1:
            raise ValueError(f"cardinality must be >= 1, got {self.cardinality}")


def _check_unique_names(variables: Sequence[VariableSpec]) -> None:
    names = [v.name for v in variables]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate variable names in {names}")


class ProbTable:
    """Joint distribution over an ordered tuple of variables.

    ``logmass`` has one axis per variable, in variable order, holding
    natural-log probabilities.  Construction validates (or restores)
    normalization; instances are treated as immutable.
    """

    __slots__ = ("variables", "logmass")

    def __init__(self, variables: Sequence[VariableSpec], logmass: np.ndarray,
                 *, _validated: bool = False):
        _check_unique_names(variables)
        shape = tuple(v.cardinality for v in variables)
        # copy externally supplied arrays so the table truly owns its storage
        logmass = np.asarray(logmass, dtype=float) if _validated else np.array(
            logmass, dtype=float)
        if logmass.shape != shape:
            raise ValueError(f"logmass shape {logmass.shape} != variable shape {shape}")
        self.variables = tuple(variables)
        self.logmass = logmass
        if not _validated:
            self._validate()
        self.logmass.setflags(write=False)

    # -- construction ------------------------------------------------

    @classmethod
    def from_logmass(cls, variables: Sequence[VariableSpec], logmass: np.ndarray,
                     *, normalize: bool = False, total_atol: float = 1e-9) -> "ProbTable":
        """Build from log masses.

        With ``normalize=True`` the total may drift from 1 by up to
        ``total_atol`` (checked, then renormalized exactly); otherwise
        the table must already satisfy the normalization invariant.
        """
        logmass = np.array(logmass, dtype=float)
        if normalize:
            total = log_sum_exp(logmass.ravel())
            if total == LOG_ZERO or not math.isfinite(total):
                raise InternalConsistencyError("table has zero or non-finite total mass")
            if abs(math.expm1(total)) > total_atol:
                raise InternalConsistencyError(
                    f"table mass {math.exp(total)} deviates from 1 beyond {total_atol}")
            logmass = logmass - total
        return cls(variables, logmass)

    @classmethod
    def from_probs(cls, variables: Sequence[VariableSpec], probs: np.ndarray,
                   *, normalize: bool = False) -> "ProbTable":
        """Build from linear-space probabilities (zeros map to the sentinel)."""
        probs = np.asarray(probs, dtype=float)
        if np.any(probs < 0):
            raise ValueError("negative probability mass")
        with np.errstate(divide="ignore"):
            logmass = np.log(probs)
        return cls.from_logmass(variables, logmass, normalize=normalize)

    def _validate(self) -> None:
        if np.any(np.isnan(self.logmass)):
            raise ValueError("NaN in log mass")
        hi = float(np.max(self.logmass)) if self.logmass.size else LOG_ZERO
        if hi > NORM_ATOL:
            raise ValueError(f"log mass {hi} exceeds 0")
        # tiny positive drift from renormalization rounds down to exact 0
        if hi > 0.0:
            lm = self.logmass.copy()
            np.minimum(lm, 0.0, out=lm)
            self.logmass = lm
        total = log_sum_exp(self.logmass.ravel())
        if abs(math.expm1(total)) > NORM_ATOL:
            raise ValueError(f"table mass {math.exp(total)} is not 1 within {NORM_ATOL}")

    # -- introspection -----------------------------------------------

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def axis(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}; table has {self.names}") from None

    def spec(self, name: str) -> VariableSpec:
        return self.variables[self.axis(name)]

    def axes(self, names: Iterable[str]) -> tuple[int, ...]:
        return tuple(self.axis(n) for n in names)

    @property
    def probs(self) -> np.ndarray:
        """Linear-space copy of the table."""
        return np.exp(self.logmass)

    def log_prob(self, assignment: Mapping[str, int]) -> float:
        """Log mass of one full assignment (all variables required)."""
        missing = set(self.names) - set(assignment)
        if missing:
            raise KeyError(f"assignment missing variables {sorted(missing)}")
        idx = tuple(int(assignment[v.name]) for v in self.variables)
        return float(self.logmass[idx])

    # -- operations --------------------------------------------------

    def marginal(self, keep: Iterable[str]) -> "ProbTable":
        """Marginalize onto ``keep`` (original variable order is retained)."""
        keep = set(keep)
        unknown = keep - set(self.names)
        if unknown:
            raise KeyError(f"unknown variables {sorted(unknown)}; table has {self.names}")
        drop_axes = tuple(i for i, v in enumerate(self.variables) if v.name not in keep)
        if not drop_axes:
            return self
        lm = _logsumexp_axes(self.logmass, drop_axes)
        kept = [v for v in self.variables if v.name in keep]
        return ProbTable(kept, lm, _validated=True)

    def attach(self, kernel_logmass: np.ndarray, new_vars: Sequence[VariableSpec],
               given: Sequence[str] | None = None) -> "ProbTable":
        """Extend the joint with new variables drawn from a conditional kernel.

        ``kernel_logmass`` must have shape (cards of ``given`` in table
        order, then cards of ``new_vars``); ``given`` defaults to all
        current variables.  Each kernel row must be normalized.
        """
        given_names = tuple(given) if given is not None else self.names
        given_axes = self.axes(given_names)
        if sorted(given_axes) != list(given_axes):
            raise ValueError("'given' must follow the table's variable order")
        new_vars = tuple(new_vars)
        _check_unique_names(self.variables + new_vars)
        expect = tuple(self.variables[a].cardinality for a in given_axes) + tuple(
            v.cardinality for v in new_vars)
        kernel_logmass = np.asarray(kernel_logmass, dtype=float)
        if kernel_logmass.shape != expect:
            raise ValueError(f"kernel shape {kernel_logmass.shape} != {expect}")
        row_tot = _logsumexp_axes(kernel_logmass,
                                  tuple(range(len(given_axes), kernel_logmass.ndim)))
        if np.any(np.abs(np.expm1(row_tot)) > NORM_ATOL):
            raise ValueError("kernel rows are not normalized")
        # broadcast kernel over the axes of the table not in 'given'
        shape = [1] * self.logmass.ndim + [v.cardinality for v in new_vars]
        for pos, a in enumerate(given_axes):
            shape[a] = kernel_logmass.shape[pos]
        k = kernel_logmass.reshape(shape)
        lm = self.logmass.reshape(self.logmass.shape + (1,) * len(new_vars)) + k
        return ProbTable(self.variables + new_vars, lm, _validated=True)

    def __repr__(self) -> str:
        dims = ", ".join(f"{v.name}:{v.cardinality}" for v in self.variables)
        return f"ProbTable({dims})"


def _logsumexp_axes(logmass: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
    """logsumexp over the given axes; all-(-inf) slices stay -inf."""
    if not axes:
        return logmass
    hi = np.max(logmass, axis=axes, keepdims=True)
    safe_hi = np.where(np.isneginf(hi), 0.0, hi)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.log(np.sum(np.exp(logmass - safe_hi), axis=axes))
    out = out + np.squeeze(safe_hi, axis=axes)
    return np.where(np.isneginf(np.squeeze(hi, axis=axes)), LOG_ZERO, out)


def outer_product(a: ProbTable, b: ProbTable) -> ProbTable:
    """Independent joint of two tables over disjoint variable sets."""
    _check_unique_names(a.variables + b.variables)
    lm = a.logmass.reshape(a.logmass.shape + (1,) * b.logmass.ndim) + b.logmass
    return ProbTable(a.variables + b.variables, lm, _validated=True)
