"""Trimap-free image matting toolkit.

Compositing pipeline, multi-scale matting network with adaptive feature
assembly, blended L1+SSIM objective, the four standard matting metrics,
and a training/ablation harness.
"""

from . import compositing, losses, metrics, model, synthetic, training
from .compositing import composite, load_pair, synthesize_split
from .losses import (LossWeights, SsimParams, l1_loss, lambda_schedule,
                     ssim_loss, total_loss)
from .model import (MattingNetwork, ModelConfig, build_model, load_checkpoint,
                    predict_alpha, save_checkpoint)
from .training import TrainingConfig, ablation_suite, augment, \
    evaluate_model, poly_lr, train

__version__ = "0.1.0"

__all__ = [
    "LossWeights", "MattingNetwork", "ModelConfig", "SsimParams",
    "TrainingConfig", "ablation_suite", "augment", "build_model",
    "composite", "compositing", "evaluate_model", "l1_loss",
    "lambda_schedule", "load_checkpoint", "load_pair", "losses", "metrics",
    "model", "poly_lr", "predict_alpha", "save_checkpoint", "ssim_loss",
    "synthesize_split", "synthetic", "total_loss", "train", "training",
]
