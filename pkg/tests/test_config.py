import pytest

from vflcost.config import ExperimentConfig, parse_config, serialize_config
from vflcost.errors import ConfigError


class TestDefaults:
    def test_prior_defaults(self):
        cfg = ExperimentConfig()
        assert (cfg.alpha1, cfg.beta1, cfg.alpha2, cfg.beta2) == (2.0, 1.5, 1.5, 2.0)
        assert cfg.n_samples == 3
        assert cfg.r_steps == cfg.eps_steps == 41
        assert cfg.quadrature_nodes == 256

    def test_grids(self):
        cfg = ExperimentConfig(eps_min=0.0, eps_max=1.0, eps_steps=5)
        assert cfg.eps_grid() == [0.0, 0.25, 0.5, 0.75, 1.0]
        assert ExperimentConfig(r_min=0.3, r_max=0.3, r_steps=1).r_grid() == [0.3]


class TestValidation:
    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(kind="walk")

    def test_unknown_backend(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(backend="mcmc")

    def test_unsorted_grid(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(eps_min=0.9, eps_max=0.1)

    def test_r_grid_outside_unit_interval(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(r_max=1.5)

    def test_negative_samples(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(n_samples=-1)

    def test_bad_r(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(r=-0.2)


class TestParsing:
    def test_roundtrip_identity(self):
        cfg = ExperimentConfig(kind="sweep_eps", k_agents=3, r=0.4,
                               eps_steps=7, epsilon=0.25, s=0.1,
                               csv="out.csv", workers=2)
        text = serialize_config(cfg)
        again = parse_config(text)
        assert again == cfg
        assert serialize_config(again) == text

    def test_partial_file_overrides_defaults(self):
        cfg = parse_config("[model]\nr = 0.25\n\n[experiment]\nn_samples = 5\n")
        assert cfg.r == 0.25
        assert cfg.n_samples == 5
        assert cfg.alpha1 == 2.0

    def test_unknown_section(self):
        with pytest.raises(ConfigError):
            parse_config("[nonsense]\nx = 1\n")

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            parse_config("[model]\nwhat = 1\n")

    def test_bad_number(self):
        with pytest.raises(ConfigError):
            parse_config("[model]\nr = abc\n")

    def test_empty_optional_fields(self):
        cfg = parse_config("[experiment]\nepsilon =\n\n[output]\ncsv =\n")
        assert cfg.epsilon is None
        assert cfg.csv is None
