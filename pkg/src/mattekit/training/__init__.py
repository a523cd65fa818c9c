from .ablation import (ablation_suite, format_metrics_table,
                       variant_parameter_counts)
from .augment import CropTransform, apply_transform, augment
from .config import TrainingConfig, config_from_flat, load_config
from .evaluation import evaluate_model, write_predictions
from .loop import LOG_COLUMNS, TrainResult, train
from .schedule import poly_lr

__all__ = [
    "CropTransform", "LOG_COLUMNS", "TrainResult", "TrainingConfig",
    "ablation_suite", "apply_transform", "augment", "config_from_flat",
    "evaluate_model", "format_metrics_table", "load_config", "poly_lr",
    "train", "variant_parameter_counts", "write_predictions",
]
