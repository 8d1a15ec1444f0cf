import subprocess
import sys

import pytest

from vflcost.cli import main
from vflcost.config import ExperimentConfig, parse_config, serialize_config
from vflcost.errors import ConfigError
from vflcost.sweeps import (
    run_cost_table,
    run_loss,
    run_privacy_audit,
    run_sweep_eps,
    run_sweep_r,
)


def small_r_cfg(**kw):
    base = dict(kind="sweep_r", k_agents=2, r_steps=5, workers=1)
    base.update(kw)
    return ExperimentConfig(**base)


def small_eps_cfg(**kw):
    base = dict(kind="sweep_eps", k_agents=3, eps_steps=5, workers=1)
    base.update(kw)
    return ExperimentConfig(**base)


class TestRunSweepR:
    def test_abscissa_endpoints_and_sorting(self):
        result = run_sweep_r(small_r_cfg())
        values = [row.sweep_value for row in result.rows]
        assert values == sorted(values)
        assert values[0] == pytest.approx(0.0, abs=1e-12)   # r = 0.5
        assert values[-1] == pytest.approx(1.0, abs=1e-12)  # r in {0, 1}

    def test_deterministic_coupling_rows_agree(self):
        result = run_sweep_r(small_r_cfg())
        top = result.rows[-2:]  # r = 0 and r = 1, same abscissa
        for code in ("CL/CI", "CL/DI", "DL/CI", "DL/DI"):
            assert top[0].losses[code] == pytest.approx(top[1].losses[code],
                                                        abs=1e-9)
            assert top[0].losses["CL/CI"] == pytest.approx(
                top[0].losses[code], abs=1e-9)

    def test_needs_two_agents(self):
        with pytest.raises(ConfigError):
            run_sweep_r(small_r_cfg(k_agents=3))

    def test_quadrature_backend_agrees(self):
        conj = run_sweep_r(small_r_cfg(r_steps=3))
        quad = run_sweep_r(small_r_cfg(r_steps=3, backend="quadrature",
                                       quadrature_nodes=32))
        for a, b in zip(conj.rows, quad.rows):
            for code, v in a.losses.items():
                assert b.losses[code] == pytest.approx(v, abs=1e-8)


class TestRunSweepEps:
    def test_decentralized_column_constant_and_budget_zero_coincides(self):
        result = run_sweep_eps(small_eps_cfg())
        dldi = [row.losses["DL/DI"] for row in result.rows]
        assert len(set(dldi)) == 1
        first = result.rows[0].losses
        assert max(first.values()) - min(first.values()) < 1e-12
        assert result.rows[0].mechanism_s == 0.5
        assert result.rows[-1].mechanism_s == 0.0

    def test_needs_three_agents(self):
        with pytest.raises(ConfigError):
            run_sweep_eps(small_eps_cfg(k_agents=2))


class TestRunCostTable:
    def test_gaps_are_tiny(self):
        result = run_cost_table(ExperimentConfig(kind="cost_table", r=0.5,
                                                 workers=1))
        assert len(result.rows) == 5
        for row in result.rows:
            assert row.abs_gap <= 1e-9


class TestRunLoss:
    def test_unconstrained(self):
        result = run_loss(ExperimentConfig(kind="loss", r=0.5))
        assert result.epsilon is None
        assert set(result.per_agent) == {"CL/CI", "CL/DI", "DL/CI", "DL/DI"}
        assert all(len(v) == 2 for v in result.per_agent.values())

    def test_budgeted_needs_three_agents(self):
        with pytest.raises(ConfigError):
            run_loss(ExperimentConfig(kind="loss", epsilon=0.5))

    def test_budgeted_three_agent(self):
        result = run_loss(ExperimentConfig(kind="loss", k_agents=3, r=0.5,
                                           epsilon=0.5))
        assert result.epsilon == 0.5
        w = {k: max(v) for k, v in result.per_agent.items()}
        assert w["CL/CI"] <= w["DL/DI"] + 1e-12


class TestRunPrivacyAudit:
    def test_requires_s_and_epsilon(self):
        with pytest.raises(ConfigError):
            run_privacy_audit(ExperimentConfig(kind="privacy_audit", k_agents=3,
                                               epsilon=0.5))
        with pytest.raises(ConfigError):
            run_privacy_audit(ExperimentConfig(kind="privacy_audit", k_agents=3,
                                               s=0.2))

    def test_closed_forms_reported_for_three_agents(self):
        result = run_privacy_audit(ExperimentConfig(
            kind="privacy_audit", k_agents=3, r=0.5, s=0.2, epsilon=0.5))
        assert len(result.rows) == 3
        for row in result.rows:
            assert row.closed_form_bits == pytest.approx(row.audited_cmi_bits,
                                                         abs=1e-9)


class TestCli:
    def test_loss_smoke(self, capsys):
        assert main(["loss", "--r", "0.5"]) == 0
        out = capsys.readouterr().out
        assert "CL/CI" in out and "worst=" in out

    def test_config_error_exit_code(self, capsys):
        assert main(["loss", "--r", "1.5"]) == 1

    def test_numerical_error_exit_code(self, capsys):
        # an absurdly small enumeration cap trips the resource guard
        assert main(["loss", "--r", "0.5", "--max-terms", "1"]) == 2

    def test_io_error_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "no" / "dir" / "x.csv"
        assert main(["sweep-r", "--r-steps", "3", "--workers", "1",
                     "--out", str(bad)]) == 3

    def test_svg_requires_sweep(self, tmp_path, capsys):
        assert main(["loss", "--svg", str(tmp_path / "x.svg")]) == 1

    def test_print_config_roundtrip(self, capsys):
        assert main(["sweep-eps", "--eps-steps", "7", "--print-config"]) == 0
        text = capsys.readouterr().out
        cfg = parse_config(text)
        assert cfg.kind == "sweep_eps"
        assert cfg.k_agents == 3
        assert cfg.eps_steps == 7
        assert serialize_config(cfg) == text

    def test_config_file_plus_override(self, tmp_path, capsys):
        path = tmp_path / "exp.ini"
        path.write_text("[model]\nr = 0.25\n\n[experiment]\nn_samples = 2\n")
        assert main(["loss", "--config", str(path), "--N", "4",
                     "--print-config"]) == 0
        cfg = parse_config(capsys.readouterr().out)
        assert cfg.r == 0.25
        assert cfg.n_samples == 4

    def test_outputs_written(self, tmp_path, capsys):
        csv = tmp_path / "s.csv"
        svg = tmp_path / "s.svg"
        fig = tmp_path / "s.png"
        code = main(["sweep-r", "--r-steps", "5", "--workers", "1",
                     "--out", str(csv), "--svg", str(svg), "--fig", str(fig)])
        assert code == 0
        assert csv.exists() and svg.exists() and fig.exists()

    def test_worker_pool_matches_serial(self, tmp_path):
        # process-pool dispatch must not change a single byte
        out = []
        for workers in ("1", "2"):
            path = tmp_path / f"w{workers}.csv"
            cmd = [sys.executable, "-m", "vflcost.cli", "sweep-r",
                   "--r-steps", "5", "--workers", workers, "--out", str(path)]
            proc = subprocess.run(cmd, capture_output=True, text=True)
            assert proc.returncode == 0, proc.stderr
            out.append(path.read_bytes())
        assert out[0] == out[1]
