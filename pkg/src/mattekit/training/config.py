"""Run configuration: optimizer/schedule/augmentation settings plus the model.

Serialized as a flat key-value JSON document; model fields live in the same
flat namespace. Unknown keys are errors, so config files stay diff-able
across ablation runs.
"""

import dataclasses
import json
from pathlib import Path

from ..errors import ConfigError
from ..model import ModelConfig


@dataclasses.dataclass(frozen=True)
class TrainingConfig:
    manifest: str = ""
    out_dir: str = "runs/default"
    lr0: float = 0.01
    momentum: float = 0.9
    weight_decay: float = 0.0005
    poly_power: float = 0.9
    epochs: int = 20
    batch_size: int = 4
    crop_sizes: tuple = (512, 640, 800)
    target_size: int = 512
    flip_prob: float = 0.5
    seed: int = 0
    deterministic: bool = True
    checkpoint_every: int = 1  # 0 keeps only the final checkpoint
    val_manifest: str = ""
    test_manifest: str = ""
    model: ModelConfig = ModelConfig()

    def __post_init__(self):
        if self.lr0 <= 0 or self.poly_power <= 0:
            raise ConfigError("lr0 and poly_power must be positive")
        if self.momentum < 0 or self.weight_decay < 0:
            raise ConfigError("momentum and weight_decay must be non-negative")
        if self.epochs < 0 or self.checkpoint_every < 0:
            raise ConfigError("epochs and checkpoint_every must be >= 0")
        if self.batch_size < 1 or self.target_size < 1:
            raise ConfigError("batch_size and target_size must be positive")
        if not self.crop_sizes or min(self.crop_sizes) < self.target_size:
            raise ConfigError(
                f"crop sizes {self.crop_sizes} must all be >= target size "
                f"{self.target_size}")
        if not 0.0 <= self.flip_prob <= 1.0:
            raise ConfigError("flip_prob must be in [0,1]")

    @classmethod
    def desk_scale(cls, **overrides):
        """CPU-sized defaults: toy backbone, 128px crops, short schedule."""
        base = dict(crop_sizes=(128, 160, 200), target_size=128, epochs=2,
                    model=ModelConfig(backbone_profile="toy"))
        base.update(overrides)
        return cls(**base)

    def flat_dict(self):
        d = dataclasses.asdict(self)
        model = d.pop("model")
        d["crop_sizes"] = list(self.crop_sizes)
        model["aspp_rates"] = list(self.model.aspp_rates)
        d.update(model)
        return d

    def save(self, path):
        Path(path).write_text(json.dumps(self.flat_dict(), indent=2,
                                         sort_keys=True) + "\n")

    def replace(self, **kwargs):
        return dataclasses.replace(self, **kwargs)


_TRAIN_TYPES = {
    "manifest": str, "out_dir": str, "lr0": float, "momentum": float,
    "weight_decay": float, "poly_power": float, "epochs": int,
    "batch_size": int, "crop_sizes": tuple, "target_size": int,
    "flip_prob": float, "seed": int, "deterministic": bool,
    "checkpoint_every": int, "val_manifest": str, "test_manifest": str,
}
_MODEL_TYPES = {
    "backbone_profile": str, "ablation_variant": str, "aspp_channels": int,
    "aspp_rates": tuple, "epsilon": float, "init_std": float,
}

_LIST_KEYS = {"crop_sizes", "aspp_rates"}
_BOOL_KEYS = {"deterministic"}


def _coerce(key, value, target_type):
    if key in _LIST_KEYS:
        if isinstance(value, str):
            value = [v for v in value.replace(",", " ").split() if v]
        return tuple(int(v) for v in value)
    if key in _BOOL_KEYS:
        if isinstance(value, str):
            if value.lower() in ("true", "1", "yes"):
                return True
            if value.lower() in ("false", "0", "no"):
                return False
            raise ConfigError(f"cannot parse boolean {value!r} for {key}")
        return bool(value)
    try:
        return target_type(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key}: {value!r} ({exc})") from exc


def config_from_flat(flat):
    """Build a TrainingConfig from a flat mapping; unknown keys are errors."""
    train_kwargs, model_kwargs = {}, {}
    for key, value in flat.items():
        if key in _TRAIN_TYPES:
            train_kwargs[key] = _coerce(key, value, _TRAIN_TYPES[key])
        elif key in _MODEL_TYPES:
            model_kwargs[key] = _coerce(key, value, _MODEL_TYPES[key])
        else:
            raise ConfigError(f"unknown config key: {key!r}")
    return TrainingConfig(model=ModelConfig(**model_kwargs), **train_kwargs)


def load_config(path, overrides=None):
    """Read a flat JSON config file; `overrides` ({key: value}) win."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        flat = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(flat, dict):
        raise ConfigError(f"{path}: config must be a flat JSON object")
    if overrides:
        flat.update(overrides)
    return config_from_flat(flat)
