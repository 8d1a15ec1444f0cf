"""Exact predictive losses of the four collaboration schemes.

The loss of a scheme for one agent is the conditional entropy of the
test label given that agent's view: its own test feature (plus the
shared feature under collaborative inference) and an i.i.d. training
set of per-sample views (own feature, label, plus the shared feature
under collaborative learning).

Training sets are enumerated through their sufficient statistic: count
vectors over the per-sample visible alphabet, weighted by multinomial
coefficients, which shrinks the outer sum from |A|^N ordered tuples to
C(N+|A|-1, |A|-1) terms.  Two prior-integration backends plug into the
same enumeration:

* finite :class:`~vflcost.model.ModelClass` mixtures (e.g. quadrature
  grids) are summed directly over parameter points;
* :class:`~vflcost.model.ConjugateParityModel` integrates the
  product-Beta prior exactly, by splitting each visible symbol over the
  latent feature parity and looking up closed-form Beta moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.special import gammaln

from .errors import ConfigError, EnumerationLimitError, InternalConsistencyError
from .infomath import Bits, conditional_entropy, conditional_mutual_information
from .model import LABEL_NAME, ConjugateParityModel, ModelClass
from .privacy import SHARED_NAME, AggregationChannel, identity_channel
from .probtable import LOG_ZERO, ProbTable, VariableSpec

__all__ = [
    "COLLABORATIVE",
    "DECENTRALIZED",
    "SchemeSpec",
    "CL_CI",
    "CL_DI",
    "DL_CI",
    "DL_DI",
    "ALL_SCHEMES",
    "SchemeView",
    "scheme_view",
    "DatasetCounts",
    "LossReport",
    "scheme_loss",
    "loss_report",
    "nonprivate_losses",
    "cost",
    "cost_cmi",
    "COST_CMI_CELLS",
    "DEFAULT_MAX_TERMS",
]

COLLABORATIVE = "collaborative"
DECENTRALIZED = "decentralized"

#: Cap on (count vectors x parameter points) per exact enumeration.
DEFAULT_MAX_TERMS = 10_000_000

TRAINSET_NAME = "trainset"

# log-zero stand-in inside BLAS products; exp(x - shift) underflows to
# exactly 0 for any reachable shift, and counts <= ~1e6 cannot overflow it
_NEG_CLAMP = -1e12


@dataclass(frozen=True)
class SchemeSpec:
    """One of the four learning/inference collaboration combinations."""

    learning: str
    inference: str

    def __post_init__(self) -> None:
        for phase in (self.learning, self.inference):
            if phase not in (COLLABORATIVE, DECENTRALIZED):
                raise ConfigError(f"unknown phase {phase!r}")

    @property
    def code(self) -> str:
        return f"{'CL' if self.learning == COLLABORATIVE else 'DL'}/" \
               f"{'CI' if self.inference == COLLABORATIVE else 'DI'}"

    @classmethod
    def from_code(cls, code: str) -> "SchemeSpec":
        try:
            learn, infer = code.upper().split("/")
            return cls({"CL": COLLABORATIVE, "DL": DECENTRALIZED}[learn],
                       {"CI": COLLABORATIVE, "DI": DECENTRALIZED}[infer])
        except (ValueError, KeyError):
            raise ConfigError(f"unknown scheme code {code!r}; "
                              "expected one of CL/CI, CL/DI, DL/CI, DL/DI") from None

    @property
    def collaborative_anywhere(self) -> bool:
        return COLLABORATIVE in (self.learning, self.inference)


CL_CI = SchemeSpec(COLLABORATIVE, COLLABORATIVE)
CL_DI = SchemeSpec(COLLABORATIVE, DECENTRALIZED)
DL_CI = SchemeSpec(DECENTRALIZED, COLLABORATIVE)
DL_DI = SchemeSpec(DECENTRALIZED, DECENTRALIZED)
ALL_SCHEMES = (CL_CI, CL_DI, DL_CI, DL_DI)


@dataclass(frozen=True)
class SchemeView:
    """Per-agent visibility: per-sample training variables and test variables."""

    agent: int
    train_visible: tuple[str, ...]
    test_visible: tuple[str, ...]

    def __post_init__(self) -> None:
        if LABEL_NAME not in self.train_visible:
            raise InternalConsistencyError("labels are observed by every agent")
        if LABEL_NAME in self.test_visible:
            raise InternalConsistencyError("the test label is never visible")


def scheme_view(scheme: SchemeSpec, agent: int, k_agents: int) -> SchemeView:
    """Visibility rules of one scheme for one agent (1-based)."""
    if not 1 <= agent <= k_agents:
        raise ConfigError(f"agent must be in 1..{k_agents}, got {agent}")
    own = f"x{agent}"
    train = (own,) + ((SHARED_NAME,) if scheme.learning == COLLABORATIVE else ()) \
        + (LABEL_NAME,)
    test = (own,) + ((SHARED_NAME,) if scheme.inference == COLLABORATIVE else ())
    return SchemeView(agent=agent, train_visible=train, test_visible=test)


@dataclass(frozen=True)
class DatasetCounts:
    """Multiplicities of per-sample visible assignments in a training set."""

    counts: tuple[tuple[tuple[int, ...], int], ...]

    @property
    def total(self) -> int:
        return sum(c for _, c in self.counts)


@dataclass(frozen=True)
class LossReport:
    """Per-agent losses of one scheme, in bits."""

    per_agent_loss: tuple[Bits, ...]

    @property
    def worst_case(self) -> Bits:
        return max(self.per_agent_loss)


# ---------------------------------------------------------------------------
# enumeration plumbing
# ---------------------------------------------------------------------------

def _compositions(total: int, parts: int) -> np.ndarray:
    """All nonnegative integer vectors of given length and sum, in
    lexicographic order."""
    if parts == 0:
        if total:
            return np.zeros((0, 0), dtype=np.int64)
        return np.zeros((1, 0), dtype=np.int64)
    out: list[tuple[int, ...]] = []
    vec = [0] * parts

    def rec(i: int, rem: int) -> None:
        if i == parts - 1:
            vec[i] = rem
            out.append(tuple(vec))
            return
        for v in range(rem + 1):
            vec[i] = v
            rec(i + 1, rem - v)

    rec(0, total)
    return np.array(out, dtype=np.int64)


def _n_compositions(total: int, parts: int) -> int:
    return math.comb(total + parts - 1, parts - 1) if parts else (1 if total == 0 else 0)


def _multinomial_logcoef(counts: np.ndarray) -> np.ndarray:
    n = counts.sum(axis=1)
    return gammaln(n + 1) - gammaln(counts + 1).sum(axis=1)


def _selected_features(feature_vars: Sequence[VariableSpec],
                       names: Iterable[str]) -> tuple[VariableSpec, ...]:
    names = set(names)
    sel = tuple(v for v in feature_vars if v.name in names)
    unknown = names - {v.name for v in sel}
    if unknown:
        raise ConfigError(f"unknown feature variables {sorted(unknown)}")
    return sel


def _feature_transfer(feature_vars: Sequence[VariableSpec],
                      channel: AggregationChannel | None,
                      feat_names: Iterable[str],
                      ) -> tuple[np.ndarray, tuple[VariableSpec, ...]]:
    """Linear map from full feature cells onto visible feature cells.

    Visible cells run over (selected features in model order, then the
    shared feature when a channel is given), in C order.
    """
    feature_vars = tuple(feature_vars)
    sel = _selected_features(feature_vars, feat_names)
    sel_axes = [i for i, v in enumerate(feature_vars) if v in sel]
    vis_vars = sel + ((channel.output_var,) if channel is not None else ())
    full_cards = tuple(v.cardinality for v in feature_vars)
    vis_cards = tuple(v.cardinality for v in vis_vars)
    n_full = int(np.prod(full_cards))
    n_vis = int(np.prod(vis_cards)) if vis_cards else 1
    T = np.zeros((n_full, n_vis))
    kern = np.exp(channel.kernel) if channel is not None else None
    for full_idx, x in enumerate(np.ndindex(full_cards)):
        base = tuple(x[a] for a in sel_axes)
        if kern is None:
            vis_idx = int(np.ravel_multi_index(base, vis_cards)) if vis_cards else 0
            T[full_idx, vis_idx] += 1.0
        else:
            for xh in range(channel.output_var.cardinality):
                p = kern[x + (xh,)]
                if p > 0.0:
                    vis_idx = int(np.ravel_multi_index(base + (xh,), vis_cards))
                    T[full_idx, vis_idx] += p
    return T, vis_vars


@dataclass(frozen=True)
class _ViewJoint:
    """Joint over (training-set statistic, test view, label)."""

    table: ProbTable
    #: per count-vector column: the merged per-sample assignments it counts
    symbol_groups: tuple[tuple[tuple[int, ...], ...], ...]
    counts: np.ndarray

    def dataset_counts(self) -> tuple[DatasetCounts, ...]:
        out = []
        for row in self.counts:
            items = []
            for group, c in zip(self.symbol_groups, row):
                if c:
                    items.append((group[0], int(c)))
            out.append(DatasetCounts(counts=tuple(items)))
        return tuple(out)


def _check_cap(n_terms: int, max_terms: int, what: str) -> None:
    if n_terms > max_terms:
        raise EnumerationLimitError(
            f"{what} needs {n_terms} weighted terms, above the cap of {max_terms}; "
            "raise max_terms to proceed")


def view_joint(model, train_feats: Sequence[str], train_shared: bool,
               test_feats: Sequence[str], test_shared: bool, n_samples: int,
               channel: AggregationChannel | None, *,
               max_terms: int = DEFAULT_MAX_TERMS, merge: bool = True) -> _ViewJoint:
    """Exact joint of (training statistic, test view, test label).

    ``train_feats``/``test_feats`` name the raw feature columns visible
    in each phase; the shared feature is appended when the matching
    flag is set (a channel is then required).  The label is always part
    of the per-sample training view and of the output table.
    """
    if n_samples < 0:
        raise ConfigError(f"sample count must be nonnegative, got {n_samples}")
    if (train_shared or test_shared) and channel is None:
        raise ConfigError("shared-feature visibility requires an aggregation channel")
    if channel is not None:
        expect = tuple((v.name, v.cardinality) for v in model.feature_vars)
        got = tuple((v.name, v.cardinality) for v in channel.input_vars)
        if expect != got:
            raise ConfigError(
                f"channel inputs {got} do not match model features {expect}")
    if isinstance(model, ConjugateParityModel):
        return _conjugate_view_joint(model, train_feats, train_shared, test_feats,
                                     test_shared, n_samples, channel, max_terms)
    if isinstance(model, ModelClass):
        return _grid_view_joint(model, train_feats, train_shared, test_feats,
                                test_shared, n_samples, channel, max_terms, merge)
    raise ConfigError(f"unsupported model type {type(model).__name__}")


def _label_symbols(vis_vars: tuple[VariableSpec, ...], label_card: int,
                   keep: np.ndarray) -> list[tuple[int, ...]]:
    """Assignments (visible features..., label) for kept visible cells."""
    vis_cards = tuple(v.cardinality for v in vis_vars)
    out = []
    for f_idx, f in enumerate(np.ndindex(vis_cards)) if vis_cards else [(0, ())]:
        for y in range(label_card):
            if keep[f_idx * label_card + y]:
                out.append(tuple(f) + (y,))
    return out


def _grid_view_joint(model: ModelClass, train_feats, train_shared, test_feats,
                     test_shared, n_samples, channel, max_terms,
                     merge) -> _ViewJoint:
    n_params = len(model.param_points)
    label_card = model.label_var.cardinality
    cond = model.cond_mass.reshape(n_params, -1)
    prior_mass = np.exp(model.prior_logweights)

    t_feat, train_vars = _feature_transfer(
        model.feature_vars, channel if train_shared else None, train_feats)
    t_train = np.kron(t_feat, np.eye(label_card))
    q = cond @ t_train  # (P, train cells)

    supp = (prior_mass @ q) > 0.0
    symbols = _label_symbols(train_vars, label_card, supp)
    q = q[:, supp]
    if merge and q.shape[1] > 1:
        # per-sample symbols with identical probability under every
        # parameter are statistically indistinguishable: coarsening the
        # alphabet onto their sums is exact and shrinks the enumeration
        qc = np.ascontiguousarray(q.T)
        group_of: dict[bytes, int] = {}
        groups: list[list[tuple[int, ...]]] = []
        members: list[list[int]] = []
        for j in range(qc.shape[0]):
            key = qc[j].tobytes()
            g = group_of.setdefault(key, len(groups))
            if g == len(groups):
                groups.append([])
                members.append([])
            groups[g].append(symbols[j])
            members[g].append(j)
        qm = np.stack([q[:, m].sum(axis=1) for m in members], axis=1)
        symbol_groups = tuple(tuple(g) for g in groups)
    else:
        qm = q
        symbol_groups = tuple((s,) for s in symbols)
    n_sym = qm.shape[1]

    n_counts = _n_compositions(n_samples, n_sym)
    _check_cap(n_counts * n_params, max_terms, "training-set enumeration")
    counts = _compositions(n_samples, n_sym)
    logcoef = _multinomial_logcoef(counts)

    with np.errstate(divide="ignore"):
        logq = np.log(qm)
    np.maximum(logq, _NEG_CLAMP, out=logq)
    loglik = counts @ logq.T + model.prior_logweights[None, :]
    shift = loglik.max(axis=1, keepdims=True)
    safe_shift = np.where(np.isneginf(shift), 0.0, shift)
    scaled = np.exp(loglik - safe_shift)

    t_feat_te, test_vars = _feature_transfer(
        model.feature_vars, channel if test_shared else None, test_feats)
    t_test = np.kron(t_feat_te, np.eye(label_card))
    tst = cond @ t_test  # (P, test cells)

    joint = scaled @ tst
    with np.errstate(divide="ignore"):
        logj = np.log(joint) + safe_shift + logcoef[:, None]

    out_vars = (VariableSpec(TRAINSET_NAME, n_counts),) + test_vars + (model.label_var,)
    shape = tuple(v.cardinality for v in out_vars)
    table = ProbTable.from_logmass(out_vars, logj.reshape(shape), normalize=True)
    return _ViewJoint(table=table, symbol_groups=symbol_groups, counts=counts)


def _conjugate_view_joint(model: ConjugateParityModel, train_feats, train_shared,
                          test_feats, test_shared, n_samples, channel,
                          max_terms) -> _ViewJoint:
    spec = model.spec
    feat = spec.feature_probs().ravel()
    par = spec.parity().ravel()

    t_tr, train_vars = _feature_transfer(
        spec.feature_vars, channel if train_shared else None, train_feats)
    m_tr = np.stack([(feat * (par == p)) @ t_tr for p in (0, 1)])  # (2, F)
    f_supp = np.nonzero(m_tr.sum(axis=0) > 0.0)[0]

    # observed per-sample symbols (f, y) and latent extensions (f, parity, y)
    obs_symbols: list[tuple[int, int]] = []   # (visible cell, label)
    ext: list[tuple[int, int, int]] = []      # (visible cell, parity, label)
    for f in f_supp:
        for y in (0, 1):
            obs_symbols.append((int(f), y))
            for p in (0, 1):
                if m_tr[p, f] > 0.0:
                    ext.append((int(f), p, y))
    n_obs = len(obs_symbols)
    n_ext = len(ext)

    t_te, test_vars = _feature_transfer(
        spec.feature_vars, channel if test_shared else None, test_feats)
    m_te = np.stack([(feat * (par == p)) @ t_te for p in (0, 1)])  # (2, V)
    n_test_cells = m_te.shape[1]

    n_ext_counts = _n_compositions(n_samples, n_ext)
    _check_cap(n_ext_counts * 2 * n_test_cells, max_terms, "training-set enumeration")
    ext_counts = _compositions(n_samples, n_ext)
    logw = _multinomial_logcoef(ext_counts)
    log_m = np.log(np.array([m_tr[p, f] for f, p, _y in ext]))
    logw = logw + ext_counts @ log_m

    # label-moment exponents: successes/failures per latent parity
    flags = np.array([[p == 0 and y == 1, p == 0 and y == 0,
                       p == 1 and y == 1, p == 1 and y == 0]
                      for _f, p, y in ext], dtype=np.int64)
    expon = ext_counts @ flags  # (D_ext, 4): c1, d1, c2, d2

    # projection onto observed counts
    obs_index = {s: i for i, s in enumerate(obs_symbols)}
    proj = np.zeros((n_ext, n_obs), dtype=np.int64)
    for e, (f, _p, y) in enumerate(ext):
        proj[e, obs_index[(f, y)]] = 1
    obs_counts_all = _compositions(n_samples, n_obs)
    row_index = {tuple(row): i for i, row in enumerate(obs_counts_all.tolist())}
    obs_rows = np.array([row_index[tuple(r)] for r in
                         (ext_counts @ proj).tolist()], dtype=np.int64)

    m1, m2 = model.label_moment_log(n_samples + 1)
    joint = np.zeros((len(obs_counts_all), n_test_cells, 2))
    shift = float(logw.max()) if logw.size else 0.0
    c1, d1, c2, d2 = expon.T
    for v in range(n_test_cells):
        for p_t in (0, 1):
            if m_te[p_t, v] <= 0.0:
                continue
            log_mte = math.log(m_te[p_t, v])
            for y_t in (0, 1):
                dc1 = 1 if (p_t == 0 and y_t == 1) else 0
                dd1 = 1 if (p_t == 0 and y_t == 0) else 0
                dc2 = 1 if (p_t == 1 and y_t == 1) else 0
                dd2 = 1 if (p_t == 1 and y_t == 0) else 0
                lm = m1[c1 + dc1, d1 + dd1] + m2[c2 + dc2, d2 + dd2]
                np.add.at(joint, (obs_rows, v, y_t),
                          np.exp(logw + log_mte + lm - shift))

    with np.errstate(divide="ignore"):
        logj = np.log(joint) + shift
    out_vars = (VariableSpec(TRAINSET_NAME, len(obs_counts_all)),) + test_vars \
        + (model.label_var,)
    shape = tuple(v.cardinality for v in out_vars)
    table = ProbTable.from_logmass(out_vars, logj.reshape(shape), normalize=True)
    vis_cards = tuple(v.cardinality for v in train_vars)
    symbol_groups = tuple(
        (tuple(np.unravel_index(f, vis_cards)) + (y,) if vis_cards else (y,),)
        for f, y in obs_symbols)
    return _ViewJoint(table=table, symbol_groups=symbol_groups,
                      counts=obs_counts_all)


# ---------------------------------------------------------------------------
# scheme losses
# ---------------------------------------------------------------------------

def scheme_loss(model, scheme: SchemeSpec, agent: int, n_samples: int,
                channel: AggregationChannel | None = None, *,
                max_terms: int = DEFAULT_MAX_TERMS) -> Bits:
    """Exact predictive loss of one scheme for one agent, in bits.

    A channel is required whenever either phase is collaborative; the
    fully decentralized scheme ignores any channel it is handed.
    """
    if scheme.collaborative_anywhere and channel is None:
        raise ConfigError(f"{scheme.code} requires an aggregation channel")
    view = scheme_view(scheme, agent, model.k_agents)
    own = f"x{agent}"
    vj = view_joint(
        model,
        train_feats=[own],
        train_shared=scheme.learning == COLLABORATIVE,
        test_feats=[own],
        test_shared=scheme.inference == COLLABORATIVE,
        n_samples=n_samples,
        channel=channel if scheme.collaborative_anywhere else None,
        max_terms=max_terms,
    )
    given = set(vj.table.names) - {LABEL_NAME}
    assert given == {TRAINSET_NAME} | set(view.test_visible)
    return conditional_entropy(vj.table, {LABEL_NAME}, given)


def loss_report(model, scheme: SchemeSpec, n_samples: int,
                channel: AggregationChannel | None = None, *,
                max_terms: int = DEFAULT_MAX_TERMS) -> LossReport:
    """Losses of one scheme for every agent."""
    return LossReport(per_agent_loss=tuple(
        scheme_loss(model, scheme, agent, n_samples, channel, max_terms=max_terms)
        for agent in range(1, model.k_agents + 1)))


def nonprivate_losses(model, n_samples: int, *,
                      max_terms: int = DEFAULT_MAX_TERMS,
                      ) -> dict[SchemeSpec, LossReport]:
    """Losses of all four schemes with an unconstrained (identity) share.

    With no leakage constraint the optimal share reveals the full
    feature tuple, so collaboration substitutes the identity channel.
    """
    channel = identity_channel(model.feature_vars)
    return {
        scheme: loss_report(model, scheme, n_samples,
                            channel if scheme.collaborative_anywhere else None,
                            max_terms=max_terms)
        for scheme in ALL_SCHEMES
    }


def cost(a: SchemeSpec, b: SchemeSpec,
         losses: Mapping[SchemeSpec, LossReport] | Mapping[SchemeSpec, Bits],
         ) -> Bits:
    """Worst-case loss gap of scheme ``a`` over scheme ``b``.

    ``a`` must not beat ``b`` by more than the 1e-12 tolerance; tiny
    negative gaps clamp to zero.
    """
    def worst(s: SchemeSpec) -> float:
        v = losses[s]
        return v.worst_case if isinstance(v, LossReport) else float(v)

    gap = worst(a) - worst(b)
    if gap < -1e-12:
        raise InternalConsistencyError(
            f"loss of {a.code} is below loss of {b.code} by {-gap} bits; "
            "cost is defined only for dominated pairs")
    return max(gap, 0.0)


# populated cells of the nonprivate cost-identity matrix: for each
# dominated pair, which variables carry the extra information (b) and
# which are common knowledge (given); 'full'/'local' are the training
# statistics over all columns vs. the agent's own column
COST_CMI_CELLS = {
    ("CL/DI", "CL/CI"): ("others", "full+own"),
    ("DL/CI", "CL/CI"): ("full", "local+allx"),
    ("DL/DI", "CL/CI"): ("full+others", "local+own"),
    ("DL/DI", "CL/DI"): ("full", "local+own"),
    ("DL/DI", "DL/CI"): ("others", "local+own"),
}

TRAIN_FULL = "trainset_full"
TRAIN_LOCAL = "trainset_local"


def cost_cmi(model, pair: tuple[SchemeSpec, SchemeSpec], agent: int,
             n_samples: int, *, max_terms: int = DEFAULT_MAX_TERMS) -> Bits:
    """Nonprivate cost of a dominated scheme pair as a conditional MI.

    For symmetric agents each populated cost cell equals a conditional
    mutual information between the label and the variables the better
    scheme additionally sees.  This computes that quantity directly on
    one joint over (full training statistic, local training statistic,
    test features, label), independently of the per-scheme loss path.
    """
    key = (pair[0].code, pair[1].code)
    if key not in COST_CMI_CELLS:
        raise ConfigError(
            f"no cost identity for pair {key}; populated cells: "
            f"{sorted(COST_CMI_CELLS)}")
    if not 1 <= agent <= model.k_agents:
        raise ConfigError(f"agent must be in 1..{model.k_agents}, got {agent}")
    own = f"x{agent}"
    others = {v.name for v in model.feature_vars} - {own}

    all_feats = [v.name for v in model.feature_vars]
    vj = view_joint(model, train_feats=all_feats, train_shared=False,
                    test_feats=all_feats, test_shared=False,
                    n_samples=n_samples, channel=None, max_terms=max_terms,
                    merge=False)

    # project full-column counts onto the agent's (own feature, label) counts
    own_pos = all_feats.index(own)
    fine_symbols = [g[0] for g in vj.symbol_groups]
    coarse_keys = sorted({(s[own_pos], s[-1]) for s in fine_symbols})
    coarse_idx = {s: i for i, s in enumerate(coarse_keys)}
    proj = np.zeros((len(fine_symbols), len(coarse_keys)), dtype=np.int64)
    for i, s in enumerate(fine_symbols):
        proj[i, coarse_idx[(s[own_pos], s[-1])]] = 1
    coarse_all = _compositions(n_samples, len(coarse_keys))
    coarse_row = {tuple(r): i for i, r in enumerate(coarse_all.tolist())}
    fine_to_coarse = np.array([coarse_row[tuple(r)] for r in
                               (vj.counts @ proj).tolist()], dtype=np.int64)

    fine_var = VariableSpec(TRAIN_FULL, vj.table.spec(TRAINSET_NAME).cardinality)
    coarse_var = VariableSpec(TRAIN_LOCAL, len(coarse_all))
    rest = vj.table.variables[1:]
    lm = np.full((fine_var.cardinality, coarse_var.cardinality)
                 + tuple(v.cardinality for v in rest), LOG_ZERO)
    lm[np.arange(fine_var.cardinality), fine_to_coarse] = vj.table.logmass
    joint = ProbTable.from_logmass((fine_var, coarse_var) + rest, lm)

    kind_b, kind_given = COST_CMI_CELLS[key]
    b = set()
    if "full" in kind_b:
        b.add(TRAIN_FULL)
    if "others" in kind_b:
        b |= others
    given = set()
    if "full" in kind_given:
        given.add(TRAIN_FULL)
    if "local" in kind_given:
        given.add(TRAIN_LOCAL)
    if "own" in kind_given:
        given.add(own)
    if "allx" in kind_given:
        given |= {own} | others
    return conditional_mutual_information(joint, {LABEL_NAME}, b, given)
