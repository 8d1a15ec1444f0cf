"""Experiment configuration: flat sectioned key=value files plus overrides.

The format is INI (stdlib :mod:`configparser`): sections ``[model]``,
``[experiment]`` and ``[output]``.  Serialization round-trips exactly,
so a written config re-parses to an identical object.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, fields, replace

from .errors import ConfigError

__all__ = ["ExperimentConfig", "parse_config", "parse_config_file",
           "serialize_config", "EXPERIMENT_KINDS", "BACKENDS"]

EXPERIMENT_KINDS = ("sweep_r", "sweep_eps", "cost_table", "loss", "privacy_audit")
BACKENDS = ("conjugate", "quadrature")

_SECTIONS = {
    "model": ("k_agents", "r", "alpha1", "beta1", "alpha2", "beta2"),
    "experiment": ("kind", "n_samples", "backend", "quadrature_nodes",
                   "r_min", "r_max", "r_steps", "eps_min", "eps_max",
                   "eps_steps", "epsilon", "s", "workers", "max_terms"),
    "output": ("csv", "svg", "fig"),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment run depends on.

    The defaults reproduce the built-in examples: label-rate priors
    Beta(2, 1.5) and Beta(1.5, 2), three training samples, a 41-point
    grid over the swept quantity.
    """

    # model
    k_agents: int = 2
    r: float = 0.5
    alpha1: float = 2.0
    beta1: float = 1.5
    alpha2: float = 1.5
    beta2: float = 2.0
    # experiment
    kind: str = "loss"
    n_samples: int = 3
    backend: str = "conjugate"
    quadrature_nodes: int = 256
    r_min: float = 0.0
    r_max: float = 1.0
    r_steps: int = 41
    eps_min: float = 0.0
    eps_max: float = 1.0
    eps_steps: int = 41
    epsilon: float | None = None
    s: float | None = None
    workers: int = 0
    max_terms: int = 10_000_000
    # output
    csv: str | None = None
    svg: str | None = None
    fig: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in EXPERIMENT_KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}; "
                              f"expected one of {EXPERIMENT_KINDS}")
        if self.backend not in BACKENDS:
            raise ConfigError(f"unknown backend {self.backend!r}; "
                              f"expected one of {BACKENDS}")
        if self.k_agents not in (2, 3):
            raise ConfigError(f"k_agents must be 2 or 3, got {self.k_agents}")
        if self.n_samples < 0:
            raise ConfigError(f"n_samples must be >= 0, got {self.n_samples}")
        if self.quadrature_nodes < 8:
            raise ConfigError("quadrature_nodes must be >= 8")
        if self.workers < 0:
            raise ConfigError("workers must be >= 0 (0 = auto)")
        if self.max_terms < 1:
            raise ConfigError("max_terms must be positive")
        for lo, hi, steps, what in ((self.r_min, self.r_max, self.r_steps, "r"),
                                    (self.eps_min, self.eps_max, self.eps_steps,
                                     "eps")):
            if steps < 1:
                raise ConfigError(f"{what}_steps must be >= 1")
            if not lo <= hi:
                raise ConfigError(f"{what} grid must be sorted: "
                                  f"{what}_min={lo} > {what}_max={hi}")
            if steps == 1 and lo != hi:
                raise ConfigError(f"{what}_steps=1 needs {what}_min == {what}_max")
        if not 0.0 <= self.r_min <= self.r_max <= 1.0:
            raise ConfigError("r grid must lie in [0, 1]")
        if self.eps_min < 0.0:
            raise ConfigError("eps grid must be nonnegative")
        for name in ("r", "alpha1", "beta1", "alpha2", "beta2"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ConfigError(f"{name} must be finite")
        if not 0.0 <= self.r <= 1.0:
            raise ConfigError(f"r={self.r} outside [0, 1]")
        if self.s is not None and not 0.0 <= self.s <= 1.0:
            raise ConfigError(f"s={self.s} outside [0, 1]")
        if self.epsilon is not None and self.epsilon < 0:
            raise ConfigError("epsilon must be nonnegative")

    def r_grid(self) -> list[float]:
        return _grid(self.r_min, self.r_max, self.r_steps)

    def eps_grid(self) -> list[float]:
        return _grid(self.eps_min, self.eps_max, self.eps_steps)


def _grid(lo: float, hi: float, steps: int) -> list[float]:
    if steps == 1:
        return [lo]
    return [lo + (hi - lo) * i / (steps - 1) for i in range(steps)]


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}
_OPTIONAL_FLOATS = {"epsilon", "s"}
_OPTIONAL_STRS = {"csv", "svg", "fig"}
_INTS = {"k_agents", "n_samples", "quadrature_nodes", "r_steps", "eps_steps",
         "workers", "max_terms"}
_STRS = {"kind", "backend"}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key in _OPTIONAL_STRS:
        return raw or None
    if key in _OPTIONAL_FLOATS:
        if not raw:
            return None
        return float(raw)
    if key in _INTS:
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{key} must be an integer, got {raw!r}") from None
    if key in _STRS:
        return raw
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {raw!r}") from None


def parse_config(text: str, base: ExperimentConfig | None = None,
                 ) -> ExperimentConfig:
    """Parse INI text into a config, starting from ``base`` (or defaults)."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"bad config syntax: {exc}") from exc
    updates = {}
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in parser.items(section):
            if key not in _SECTIONS[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            updates[key] = _parse_value(key, raw)
    cfg = base or ExperimentConfig()
    return replace(cfg, **updates)


def parse_config_file(path: str, base: ExperimentConfig | None = None,
                      ) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, base)


def serialize_config(cfg: ExperimentConfig) -> str:
    """Render a config as INI text that parses back to an equal object."""
    out = io.StringIO()
    for section, keys in _SECTIONS.items():
        out.write(f"[{section}]\n")
        for key in keys:
            value = getattr(cfg, key)
            if value is None:
                rendered = ""
            elif isinstance(value, float):
                rendered = repr(value)
            else:
                rendered = str(value)
            out.write(f"{key} = {rendered}\n")
        out.write("\n")
    return out.getvalue()
