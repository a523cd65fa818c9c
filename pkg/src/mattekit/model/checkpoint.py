"""Checkpoint archives: config record + named tensors + epoch + optimizer state.

The embedded config makes the ablation variant auditable from the file
alone; tensors round-trip bit-exactly.
"""

import torch

from ..errors import CheckpointError
from .network import MattingNetwork, ModelConfig

FORMAT_VERSION = 1


def save_checkpoint(path, model, epoch, optimizer=None, extra=None):
    payload = {
        "format_version": FORMAT_VERSION,
        "model_config": model.config.to_dict(),
        "model_state": model.state_dict(),
        "epoch": int(epoch),
        "optimizer_state": optimizer.state_dict() if optimizer is not None else None,
    }
    if extra:
        payload["extra"] = extra
    torch.save(payload, path)
    return path


def load_checkpoint(path):
    """Returns (model, epoch, optimizer_state). Raises CheckpointError on any
    unreadable or structurally invalid file."""
    try:
        payload = torch.load(path, map_location="cpu", weights_only=True)
    except (OSError, RuntimeError, ValueError, EOFError) as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if not isinstance(payload, dict) or "model_state" not in payload:
        raise CheckpointError(f"{path} is not a model checkpoint")
    try:
        config = ModelConfig.from_dict(payload["model_config"])
        model = MattingNetwork(config)
        model.load_state_dict(payload["model_state"])
    except (KeyError, TypeError, RuntimeError) as exc:
        raise CheckpointError(f"{path}: incompatible checkpoint: {exc}") from exc
    return model, payload.get("epoch", 0), payload.get("optimizer_state")


def peek_config(path):
    try:
        payload = torch.load(path, map_location="cpu", weights_only=True)
        return ModelConfig.from_dict(payload["model_config"])
    except (OSError, RuntimeError, ValueError, KeyError, TypeError, EOFError) as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
