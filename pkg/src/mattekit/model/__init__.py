from .assembly import AdaptiveAssembly
from .backbone import ResNeXtEncoder, ToyEncoder
from .checkpoint import load_checkpoint, peek_config, save_checkpoint
from .features import (AssemblyWeights, FeatureMap, assemble,
                       normalize_assembly_weights)
from .network import (MattingNetwork, ModelConfig, VARIANTS, build_model,
                      initialize_weights, parameter_count, predict_alpha)

__all__ = [
    "AdaptiveAssembly", "AssemblyWeights", "FeatureMap", "MattingNetwork",
    "ModelConfig", "ResNeXtEncoder", "ToyEncoder", "VARIANTS", "assemble",
    "build_model", "initialize_weights", "load_checkpoint",
    "normalize_assembly_weights", "parameter_count", "peek_config",
    "predict_alpha", "save_checkpoint",
]
