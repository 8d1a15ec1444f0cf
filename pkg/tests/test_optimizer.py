import numpy as np
import pytest

from vflcost.errors import ConfigError
from vflcost.model import (
    BetaHyper,
    ModelClass,
    ParityModelSpec,
    build_parity_model_conjugate,
    point_mass_parity_model,
)
from vflcost.optimizer import MechanismFamily, private_loss, private_loss_curve
from vflcost.privacy import XorNoiseFamily, audit_privacy, channel_from_xor_family
from vflcost.schemes import ALL_SCHEMES, CL_CI, CL_DI, DL_CI, DL_DI, scheme_loss

MODEL = build_parity_model_conjugate(ParityModelSpec(3, 0.5, BetaHyper()))
FAMILY = MechanismFamily.xor_noise(3)


class TestMechanismFamily:
    def test_empty_list_rejected(self):
        with pytest.raises(ConfigError):
            MechanismFamily.generic_list([])

    def test_unknown_kind_rejected(self):
        with pytest.raises(ConfigError):
            MechanismFamily(kind="simplex")

    def test_xor_needs_agents(self):
        with pytest.raises(ConfigError):
            MechanismFamily(kind="xor_noise", k_agents=1)


class TestPrivateLoss:
    def test_zero_budget_equals_fully_decentralized(self):
        private = private_loss(MODEL, CL_CI, FAMILY, 0.0, 3)
        base = private_loss(MODEL, DL_DI, None, 0.0, 3)
        assert private.parameter == 0.5
        assert abs(private.loss - base.loss) < 1e-12

    def test_slack_budget_equals_noiseless_share(self):
        # every agent leaks exactly one bit with the noiseless share at
        # r = 0.5, so a one-bit budget is already unconstraining
        for eps in (1.0, 1.5):
            got = private_loss(MODEL, CL_DI, FAMILY, eps, 3)
            assert got.parameter == 0.0
            raw = scheme_loss(MODEL, CL_DI, 1, 3,
                              channel_from_xor_family(XorNoiseFamily(3, 0.0)))
            assert abs(got.loss - raw) < 1e-12

    def test_fully_decentralized_ignores_budget(self):
        a = private_loss(MODEL, DL_DI, FAMILY, 0.0, 3)
        b = private_loss(MODEL, DL_DI, FAMILY, 0.7, 3)
        assert a.loss == b.loss
        assert a.mechanism is None and a.parameter is None

    def test_chosen_mechanism_passes_audit(self):
        for eps in (0.0, 0.25, 0.6, 1.0):
            got = private_loss(MODEL, CL_CI, FAMILY, eps, 3)
            audit = audit_privacy(got.mechanism, MODEL.feature_marginal(), eps)
            assert audit.feasible

    def test_verification_off_matches_on(self):
        on = private_loss(MODEL, DL_CI, FAMILY, 0.4, 3)
        off = private_loss(MODEL, DL_CI, FAMILY, 0.4, 3, verify_grid_step=None)
        assert on.loss == off.loss and on.parameter == off.parameter
        assert not on.grid_fallback

    def test_negative_budget_rejected(self):
        with pytest.raises(ConfigError):
            private_loss(MODEL, CL_CI, FAMILY, -0.1, 3)

    def test_xor_path_needs_parity_model(self):
        plain = point_mass_parity_model(ParityModelSpec(3, 0.5), 0.4, 0.7)
        stripped = ModelClass(
            feature_vars=plain.feature_vars, label_var=plain.label_var,
            param_points=plain.param_points,
            prior_logweights=plain.prior_logweights,
            cond_logmass=plain.cond_logmass, parity_spec=None)
        with pytest.raises(ConfigError):
            private_loss(stripped, CL_CI, FAMILY, 0.5, 1)

    def test_xor_path_is_three_agent_only(self):
        two = build_parity_model_conjugate(ParityModelSpec(2, 0.5))
        with pytest.raises(ConfigError):
            private_loss(two, CL_CI, MechanismFamily.xor_noise(2), 0.5, 1)


class TestGenericList:
    def test_matches_analytic_path_on_fine_grid(self):
        channels = tuple(channel_from_xor_family(XorNoiseFamily(3, s))
                         for s in np.arange(0.0, 0.5 + 1e-9, 1e-3))
        family = MechanismFamily.generic_list(channels)
        eps = 0.7
        listed = private_loss(MODEL, CL_CI, family, eps, 2)
        analytic = private_loss(MODEL, CL_CI, FAMILY, eps, 2)
        assert abs(listed.loss - analytic.loss) < 2e-3

    def test_infeasible_family_rejected(self):
        noisy = (channel_from_xor_family(XorNoiseFamily(3, 0.0)),)
        family = MechanismFamily.generic_list(noisy)
        with pytest.raises(ConfigError):
            private_loss(MODEL, CL_CI, family, 0.1, 1)

    def test_tie_resolves_to_earliest_member(self):
        ch = channel_from_xor_family(XorNoiseFamily(3, 0.3))
        family = MechanismFamily.generic_list((ch, ch))
        got = private_loss(MODEL, CL_CI, family, 1.0, 1)
        assert got.parameter == 0


@pytest.fixture(scope="module")
def curve():
    eps = np.linspace(0.0, 1.0, 11)
    return private_loss_curve(MODEL, ALL_SCHEMES, FAMILY, eps, 3)


class TestPrivateLossCurve:
    def test_rows_nonincreasing(self, curve):
        for scheme in (CL_CI, CL_DI, DL_CI):
            row = curve.losses[scheme]
            assert all(b <= a + 1e-12 for a, b in zip(row, row[1:]))

    def test_shared_views_dominate(self, curve):
        for i in range(len(curve.epsilons)):
            assert curve.losses[CL_CI][i] <= min(
                curve.losses[CL_DI][i], curve.losses[DL_CI][i]) + 1e-12

    def test_all_coincide_at_zero_budget(self, curve):
        first = [curve.losses[s][0] for s in ALL_SCHEMES]
        assert max(first) - min(first) < 1e-12

    def test_decentralized_row_constant(self, curve):
        assert len(set(curve.losses[DL_DI])) == 1

    def test_budget_grid_must_be_sorted(self):
        with pytest.raises(ConfigError):
            private_loss_curve(MODEL, [CL_CI], FAMILY, [0.5, 0.1], 1)
