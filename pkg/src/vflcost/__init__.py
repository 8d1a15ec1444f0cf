"""Exact predictive-loss engine for vertical federated learning with
leakage-constrained feature sharing.

The package computes, for finite discrete Bayesian models, the exact
worst-case predictive losses of the four collaboration schemes (CL/CI,
CL/DI, DL/CI, DL/DI), the information-theoretic cost of decentralizing
either phase, and the loss curves induced by a per-agent leakage
constraint on the shared-feature mechanism.
"""

from .errors import (
    ConfigError,
    EnumerationLimitError,
    InternalConsistencyError,
    OutputError,
    VflcostError,
)
from .infomath import (
    Bits,
    binary_entropy,
    conditional_entropy,
    conditional_mutual_information,
    entropy,
    mutual_information,
)
from .model import (
    BetaHyper,
    ConjugateParityModel,
    ModelClass,
    ParityModelSpec,
    build_parity_model_conjugate,
    build_parity_model_quadrature,
    conjugate_loglik,
    per_param_visible_table,
    point_mass_parity_model,
)
from .optimizer import (
    MechanismFamily,
    PrivateLossCurve,
    PrivateLossResult,
    private_loss,
    private_loss_curve,
)
from .privacy import (
    AggregationChannel,
    PrivacyAudit,
    XorNoiseFamily,
    audit_privacy,
    channel_from_xor_family,
    identity_channel,
    max_informative_s,
    xor_leakage_closed_form,
)
from .probtable import LOG_ZERO, ProbTable, VariableSpec, log_sum_exp
from .schemes import (
    ALL_SCHEMES,
    CL_CI,
    CL_DI,
    DL_CI,
    DL_DI,
    DatasetCounts,
    LossReport,
    SchemeSpec,
    SchemeView,
    cost,
    cost_cmi,
    loss_report,
    nonprivate_losses,
    scheme_loss,
    scheme_view,
)

__version__ = "0.1.0"
