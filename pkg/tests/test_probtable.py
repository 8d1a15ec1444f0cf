import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vflcost.errors import InternalConsistencyError
from vflcost.probtable import (
    LOG_ZERO,
    ProbTable,
    VariableSpec,
    log_sum_exp,
    outer_product,
)


def uniform_table(names, cards):
    specs = [VariableSpec(n, c) for n, c in zip(names, cards)]
    n = int(np.prod(cards))
    return ProbTable.from_probs(specs, np.full(cards, 1.0 / n))


class TestLogSumExp:
    def test_simple_sum_to_one(self):
        v = [math.log(0.25), math.log(0.25), math.log(0.5)]
        assert log_sum_exp(v) == pytest.approx(0.0, abs=1e-15)

    def test_shift_invariance_deep_underflow(self):
        assert log_sum_exp([-1000.0, -1000.0]) == pytest.approx(
            -1000.0 + math.log(2.0), abs=1e-12)

    def test_singleton_identity(self):
        assert log_sum_exp([-745.0]) == -745.0

    def test_empty_is_log_zero(self):
        assert log_sum_exp([]) == LOG_ZERO

    def test_all_log_zero(self):
        assert log_sum_exp([LOG_ZERO, LOG_ZERO]) == LOG_ZERO

    @given(st.lists(st.floats(min_value=-700, max_value=0), min_size=1, max_size=20),
           st.floats(min_value=-200, max_value=0))
    @settings(max_examples=50, deadline=None)
    def test_shift_property(self, values, shift):
        base = log_sum_exp(values)
        shifted = log_sum_exp([v + shift for v in values])
        assert shifted == pytest.approx(base + shift, abs=1e-9)


class TestVariableSpec:
    def test_rejects_zero_cardinality(self):
        with pytest.raises(ValueError):
            VariableSpec("x", 0)

    def test_rejects_empty_name(self):
        with pytest.raises(ValueError):
            VariableSpec("", 2)


class TestProbTable:
    def test_normalization_enforced(self):
        v = [VariableSpec("a", 2)]
        with pytest.raises(ValueError):
            ProbTable.from_probs(v, np.array([0.5, 0.6]))

    def test_normalize_flag_rescales(self):
        v = [VariableSpec("a", 2)]
        t = ProbTable.from_probs(v, np.array([0.5, 0.5 + 1e-11]), normalize=True)
        assert math.exp(log_sum_exp(t.logmass.ravel())) == pytest.approx(1.0, abs=1e-15)

    def test_normalize_flag_rejects_gross_drift(self):
        v = [VariableSpec("a", 2)]
        with pytest.raises(InternalConsistencyError):
            ProbTable.from_logmass(v, np.log([0.3, 0.3]), normalize=True,
                                   total_atol=1e-9)

    def test_exact_zero_sentinel(self):
        v = [VariableSpec("a", 3)]
        t = ProbTable.from_probs(v, np.array([0.5, 0.5, 0.0]))
        assert t.logmass[2] == LOG_ZERO

    def test_duplicate_names_rejected(self):
        with pytest.raises(ValueError):
            ProbTable.from_probs([VariableSpec("a", 2), VariableSpec("a", 2)],
                                 np.full((2, 2), 0.25))

    def test_unknown_marginal_variable(self):
        t = uniform_table(["a", "b"], (2, 2))
        with pytest.raises(KeyError):
            t.marginal({"a", "zzz"})

    def test_log_prob_lookup(self):
        t = uniform_table(["a", "b"], (2, 4))
        assert t.log_prob({"a": 1, "b": 3}) == pytest.approx(math.log(0.125))

    def test_marginal_of_product_recovers_factor(self):
        a = ProbTable.from_probs([VariableSpec("a", 2)], np.array([0.3, 0.7]))
        b = ProbTable.from_probs([VariableSpec("b", 3)], np.array([0.2, 0.5, 0.3]))
        joint = outer_product(a, b)
        back = joint.marginal({"b"})
        np.testing.assert_allclose(back.logmass, b.logmass, atol=1e-14)

    def test_immutability(self):
        t = uniform_table(["a"], (2,))
        with pytest.raises(ValueError):
            t.logmass[0] = 0.0

    def test_attach_kernel(self):
        feats = uniform_table(["a", "b"], (2, 2))
        # deterministic copy of 'b' into a new variable
        kern = np.full((2, 2, 2), LOG_ZERO)
        for vb in range(2):
            kern[:, vb, vb] = 0.0
        joint = feats.attach(kern, [VariableSpec("c", 2)])
        assert joint.names == ("a", "b", "c")
        assert joint.log_prob({"a": 0, "b": 1, "c": 1}) == pytest.approx(math.log(0.25))
        assert joint.log_prob({"a": 0, "b": 1, "c": 0}) == LOG_ZERO

    def test_attach_rejects_unnormalized_kernel(self):
        feats = uniform_table(["a"], (2,))
        kern = np.log(np.array([[0.5, 0.4], [0.5, 0.5]]))
        with pytest.raises(ValueError):
            feats.attach(kern, [VariableSpec("c", 2)])


@st.composite
def random_tables(draw, max_vars=5):
    k = draw(st.integers(min_value=1, max_value=max_vars))
    cards = tuple(draw(st.integers(min_value=2, max_value=3)) for _ in range(k))
    n = int(np.prod(cards))
    weights = draw(st.lists(
        st.one_of(st.just(0.0), st.floats(min_value=1e-6, max_value=1.0)),
        min_size=n, max_size=n))
    if sum(weights) == 0.0:
        weights[0] = 1.0
    arr = np.array(weights).reshape(cards)
    specs = [VariableSpec(f"v{i}", c) for i, c in enumerate(cards)]
    return ProbTable.from_probs(specs, arr / arr.sum())


@given(random_tables(), st.data())
@settings(max_examples=60, deadline=None)
def test_marginalization_order_irrelevant(table, data):
    names = list(table.names)
    keep = data.draw(st.sets(st.sampled_from(names), min_size=1))
    middle = data.draw(st.sets(st.sampled_from(names), min_size=len(keep)).filter(
        lambda s: keep <= s))
    direct = table.marginal(keep)
    staged = table.marginal(middle).marginal(keep)
    assert direct.names == staged.names
    a, b = direct.logmass, staged.logmass
    both_zero = np.isneginf(a) & np.isneginf(b)
    np.testing.assert_allclose(np.exp(a[~both_zero]), np.exp(b[~both_zero]),
                               atol=1e-14)
