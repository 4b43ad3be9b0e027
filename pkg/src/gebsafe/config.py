"""JSON run configuration: environment and training settings in one document.

Any field may be omitted and falls back to its default, so a config file only
needs to list what differs. Unknown keys are rejected to catch typos.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, is_dataclass
from importlib import resources
from pathlib import Path

from .agent.dqn import TrainConfig
from .devices import EssParams
from .env import EnvConfig, ObsScaling, RewardWeights
from .errors import ConfigError
from .steady_state import ComfortBand
from .thermal import BuildingParams

DEFAULT_CONFIG = "default_config.json"

# nested dataclass fields and the types they decode into
_NESTED = {
    EnvConfig: {
        "building": BuildingParams,
        "ess": EssParams,
        "band": ComfortBand,
        "weights": RewardWeights,
        "scaling": ObsScaling,
    },
}
_TUPLE_FIELDS = {ObsScaling: None, TrainConfig: ("hidden",)}


@dataclass(frozen=True)
class RunConfig:
    env: EnvConfig = field(default_factory=EnvConfig)
    train: TrainConfig = field(default_factory=TrainConfig)

    def to_dict(self) -> dict:
        return {"env": _encode(self.env), "train": _encode(self.train)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _encode(obj):
    if is_dataclass(obj):
        return {f.name: _encode(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, tuple):
        return [_encode(v) for v in obj]
    return obj


def _decode(cls, data, where: str, base=None):
    """Build ``cls`` from ``data``, taking omitted fields from ``base`` (or the defaults)."""
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected an object, got {type(data).__name__}")
    names = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {unknown}")
    nested = _NESTED.get(cls, {})
    tuples = _TUPLE_FIELDS.get(cls, ())
    kwargs = {} if base is None else {f.name: getattr(base, f.name) for f in fields(cls)}
    for key, val in data.items():
        if key in nested:
            sub_base = getattr(base, key) if base is not None else None
            kwargs[key] = _decode(nested[key], val, f"{where}.{key}", sub_base)
        elif isinstance(val, list) and (tuples is None or key in tuples):
            kwargs[key] = tuple(val)
        else:
            kwargs[key] = val
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def parse_config(text: str) -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(data) - {"env", "train"})
    if unknown:
        raise ConfigError(f"unknown top-level keys {unknown}")
    return RunConfig(
        env=_decode(EnvConfig, data.get("env", {}), "env", EnvConfig()),
        train=_decode(TrainConfig, data.get("train", {}), "train", TrainConfig()),
    )


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    return parse_config(text)


def default_config_path() -> Path:
    return Path(str(resources.files("gebsafe") / "data" / DEFAULT_CONFIG))


def default_config() -> RunConfig:
    return load_config(default_config_path())


__all__ = ["RunConfig", "default_config", "default_config_path", "load_config", "parse_config"]
