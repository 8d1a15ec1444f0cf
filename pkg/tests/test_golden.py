"""Regression guard: default sweeps against frozen golden CSVs.

The goldens were generated once by the default CLI sweeps after the
two integration backends had been cross-validated against each other
and against the ordered-tuple oracles; values are compared at 1e-9 so
the guard is robust to platform-level rounding drift.
"""

import pathlib

import pytest

from vflcost.config import ExperimentConfig
from vflcost.report import SCHEME_COLUMNS
from vflcost.sweeps import run_sweep_eps, run_sweep_r

DATA = pathlib.Path(__file__).parent / "data"


def load_rows(name):
    lines = (DATA / name).read_text().splitlines()
    header = lines[0].split(",")
    return header, [[float(c) for c in ln.split(",")] for ln in lines[1:]]


def test_default_coupling_sweep_matches_golden():
    _, golden = load_rows("golden_sweep_r.csv")
    result = run_sweep_r(ExperimentConfig(kind="sweep_r", k_agents=2, workers=1))
    assert len(result.rows) == len(golden)
    for row, ref in zip(result.rows, golden):
        assert row.sweep_value == pytest.approx(ref[0], abs=1e-9)
        for i, (code, _) in enumerate(SCHEME_COLUMNS):
            assert row.losses[code] == pytest.approx(ref[1 + i], abs=1e-9)


def test_default_budget_sweep_matches_golden():
    _, golden = load_rows("golden_sweep_eps.csv")
    result = run_sweep_eps(ExperimentConfig(kind="sweep_eps", k_agents=3,
                                            workers=1))
    assert len(result.rows) == len(golden)
    for row, ref in zip(result.rows, golden):
        assert row.sweep_value == pytest.approx(ref[0], abs=1e-9)
        for i, (code, _) in enumerate(SCHEME_COLUMNS):
            assert row.losses[code] == pytest.approx(ref[1 + i], abs=1e-9)
        assert row.mechanism_s == pytest.approx(ref[5], abs=1e-9)
