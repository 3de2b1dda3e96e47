"""Run configuration: defaults -> config file -> command-line overrides, with
per-key provenance, validation, and a reproducible snapshot in every run dir.

The config tree is JSON with five sections (sim, rewards, curriculum, ppo,
teleop), each mirroring its dataclass.  Override keys are dotted paths, e.g.
`--set ppo.n_envs=128`.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field

from .curriculum import CurriculumConfig
from .ppo.trainer import PpoConfig
from .rewards import RewardConfig
from .sim import SimConfig
from .teleop.service import TeleopConfig

SECTIONS = {
    "sim": SimConfig,
    "rewards": RewardConfig,
    "curriculum": CurriculumConfig,
    "ppo": PpoConfig,
    "teleop": TeleopConfig,
}


class ConfigError(ValueError):
    """Invalid configuration; `key_path` names the offending entry."""

    def __init__(self, key_path: str, message: str):
        super().__init__(f"{key_path}: {message}")
        self.key_path = key_path


@dataclass
class RunConfig:
    sim: SimConfig = field(default_factory=SimConfig)
    rewards: RewardConfig = field(default_factory=RewardConfig)
    curriculum: CurriculumConfig = field(default_factory=CurriculumConfig)
    ppo: PpoConfig = field(default_factory=PpoConfig)
    teleop: TeleopConfig = field(default_factory=TeleopConfig)
    provenance: dict = field(default_factory=dict)  # dotted key -> default|file|flag

    def snapshot(self) -> dict:
        out = {name: dataclasses.asdict(getattr(self, name)) for name in SECTIONS}
        out["provenance"] = dict(self.provenance)
        return out

    def save(self, path: str) -> None:
        with open(path, "w") as f:
            json.dump(self.snapshot(), f, indent=2, sort_keys=True)
            f.write("\n")


def _coerce(key_path: str, raw, current):
    """Parse a raw (string or JSON) value into the type of the current value."""
    if isinstance(current, bool):
        if isinstance(raw, bool):
            return raw
        if str(raw).lower() in ("true", "1", "yes"):
            return True
        if str(raw).lower() in ("false", "0", "no"):
            return False
        raise ConfigError(key_path, f"expected a boolean, got {raw!r}")
    if isinstance(current, int) and not isinstance(current, bool):
        try:
            v = float(raw)
        except (TypeError, ValueError):
            raise ConfigError(key_path, f"expected an integer, got {raw!r}") from None
        if v != int(v):
            raise ConfigError(key_path, f"expected an integer, got {raw!r}")
        return int(v)
    if isinstance(current, float):
        try:
            return float(raw)
        except (TypeError, ValueError):
            raise ConfigError(key_path, f"expected a number, got {raw!r}") from None
    if isinstance(current, tuple):
        if isinstance(raw, str):
            raw = json.loads(raw)
        if not isinstance(raw, (list, tuple)):
            raise ConfigError(key_path, f"expected a list, got {raw!r}")
        return tuple(raw)
    if current is None or isinstance(current, str):
        return None if raw in (None, "null", "none") else str(raw)
    raise ConfigError(key_path, f"unsupported config type {type(current).__name__}")


def _apply(cfg: RunConfig, key_path: str, value, source: str) -> None:
    parts = key_path.split(".")
    if len(parts) != 2 or parts[0] not in SECTIONS:
        raise ConfigError(key_path, f"keys are <section>.<field> with section in {sorted(SECTIONS)}")
    section = getattr(cfg, parts[0])
    if not hasattr(section, parts[1]):
        raise ConfigError(key_path, "unknown field")
    current = getattr(section, parts[1])
    setattr(section, parts[1], _coerce(key_path, value, current))
    cfg.provenance[key_path] = source


def load_run_config(config_path: str | None = None, overrides: list[str] | None = None) -> RunConfig:
    """Build the merged config.  overrides are `section.field=value` strings."""
    cfg = RunConfig()
    for name, cls in SECTIONS.items():
        for f in dataclasses.fields(cls):
            cfg.provenance[f"{name}.{f.name}"] = "default"
    if config_path:
        with open(config_path) as f:
            data = json.load(f)
        for section, fields in data.items():
            if section == "provenance":
                continue
            if section not in SECTIONS:
                raise ConfigError(section, "unknown config section")
            for k, v in fields.items():
                _apply(cfg, f"{section}.{k}", v, "file")
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(item, "overrides must look like section.field=value")
        key, value = item.split("=", 1)
        _apply(cfg, key.strip(), value.strip(), "flag")
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    ppo = cfg.ppo
    for name in ("gamma", "gae_lambda", "learning_rate", "value_coef"):
        if getattr(ppo, name) <= 0:
            raise ConfigError(f"ppo.{name}", "must be positive")
    if not (0.0 < ppo.clip_range < 1.0):
        raise ConfigError("ppo.clip_range", "must be in (0, 1)")
    for name in ("rollout_steps", "epochs", "minibatches", "n_envs", "iterations"):
        if getattr(ppo, name) <= 0:
            raise ConfigError(f"ppo.{name}", "must be positive")
    if cfg.sim.substeps <= 0:
        raise ConfigError("sim.substeps", "must be positive")
    if cfg.sim.control_hz <= 0:
        raise ConfigError("sim.control_hz", "must be positive")
    if not (0 < cfg.teleop.port < 65536):
        raise ConfigError("teleop.port", "must be a valid TCP port")
    if cfg.teleop.terrain not in ("flat", "platforms"):
        raise ConfigError("teleop.terrain", "must be 'flat' or 'platforms'")
    if cfg.rewards.c_aux <= 0:
        raise ConfigError("rewards.c_aux", "must be positive")
