"""The trimap-free matting network and its ablation variants.

Pipeline (full variant): grouped-conv encoder -> dilated context pyramid on
the stride-16 features, plus a shallow-detail branch on the stride-4
features; the condensed detail stream and the x2-upsampled context stream
are fused by adaptive scalar assembly and decoded to a full-resolution
alpha matte.

Ablation variants rewire the same parts:
  baseline     direct concat of stride-4 encoder features with x4-upsampled
               context features, straight into the prediction tail
  inist        adds the initial detail stage; its avg-pooled map stands in
               for the condensed stream; fusion is a direct concat
  inist_sedst  adds the secondary detail stage; fusion still a direct concat
  full         adds the two learnable assembly scalars
"""

import dataclasses
import hashlib
import math

import torch
import torch.nn as nn
import torch.nn.functional as F

from ..errors import ConfigError, ShapeMismatchError
from .aspp import AtrousPyramid
from .assembly import AdaptiveAssembly
from .backbone import ENCODERS, check_input_dims
from .decoder import AssemblyDecoder, PredictionTail
from .details import (INITIAL_CHANNELS, SECONDARY_CHANNELS,
                      InitialDetailStage, SecondaryDetailStage)
from .features import FeatureMap

BACKBONE_PROFILES = ("toy", "full")
VARIANTS = ("baseline", "inist", "inist_sedst", "full")


@dataclasses.dataclass(frozen=True)
class ModelConfig:
    backbone_profile: str = "toy"
    ablation_variant: str = "full"
    aspp_channels: int = 256
    aspp_rates: tuple = (6, 12, 18)
    epsilon: float = 1e-8
    init_std: float = 0.01

    def __post_init__(self):
        if self.backbone_profile not in BACKBONE_PROFILES:
            raise ConfigError(f"backbone_profile must be one of "
                              f"{BACKBONE_PROFILES}, got {self.backbone_profile!r}")
        if self.ablation_variant not in VARIANTS:
            raise ConfigError(f"ablation_variant must be one of {VARIANTS}, "
                              f"got {self.ablation_variant!r}")
        if self.epsilon <= 0:
            raise ConfigError("epsilon must be positive")

    def to_dict(self):
        d = dataclasses.asdict(self)
        d["aspp_rates"] = list(self.aspp_rates)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "aspp_rates" in d:
            d["aspp_rates"] = tuple(d["aspp_rates"])
        return cls(**d)


def _up(x, factor):
    return F.interpolate(x, scale_factor=factor, mode="bilinear",
                         align_corners=False)


class MattingNetwork(nn.Module):
    def __init__(self, config=ModelConfig()):
        super().__init__()
        self.config = config
        self.variant = config.ablation_variant
        self.encoder = ENCODERS[config.backbone_profile]()
        self.aspp = AtrousPyramid(self.encoder.deep_channels,
                                  config.aspp_channels, config.aspp_rates)
        if self.variant == "baseline":
            self.tail = PredictionTail(self.encoder.block1_channels
                                       + config.aspp_channels)
            return
        self.initial_stage = InitialDetailStage(self.encoder.block1_channels)
        if self.variant == "inist":
            sed_channels = INITIAL_CHANNELS  # avg-pooled initial map stands in
        else:
            self.secondary_stage = SecondaryDetailStage()
            sed_channels = SECONDARY_CHANNELS
        if self.variant == "full":
            self.assembly = AdaptiveAssembly(config.epsilon)
        self.decoder = AssemblyDecoder(config.aspp_channels + sed_channels,
                                       INITIAL_CHANNELS)

    # --- typed single-step operations (used by the stride audit and tests) ---

    def backbone_forward(self, image):
        """(B,3,H,W) with H,W divisible by 32 -> stride-4 and stride-16 maps."""
        check_input_dims(image)
        block1, deep = self.encoder(image)
        return FeatureMap(block1, 4), FeatureMap(deep, 16)

    def aspp_forward(self, deep):
        if deep.stride != 16:
            raise ShapeMismatchError(f"context head expects stride 16, "
                                     f"got {deep.stride}")
        return FeatureMap(self.aspp(deep.values), 16)

    def initial_details(self, block1):
        if block1.stride != 4:
            raise ShapeMismatchError(f"initial detail stage expects stride 4, "
                                     f"got {block1.stride}")
        return FeatureMap(self.initial_stage(block1.values), 4)

    def secondary_details(self, f_ini):
        if f_ini.stride != 4:
            raise ShapeMismatchError(f"secondary detail stage expects stride 4, "
                                     f"got {f_ini.stride}")
        return FeatureMap(self.secondary_stage(f_ini.values), 8)

    def fuse(self, f_aspp_up, f_sed):
        """Stride-8 context and detail streams -> fused stride-8 map."""
        if f_aspp_up.stride != 8 or f_sed.stride != 8:
            raise ShapeMismatchError(
                f"fusion expects stride-8 inputs, got {f_aspp_up.stride} "
                f"and {f_sed.stride}")
        if self.variant == "full":
            fused = self.assembly(f_aspp_up.values, f_sed.values)
        else:
            fused = torch.cat([f_aspp_up.values, f_sed.values], dim=1)
        return FeatureMap(fused, 8)

    def decode(self, f_fused, f_ini):
        if f_fused.stride != 8 or f_ini.stride != 4:
            raise ShapeMismatchError(
                f"decoder expects strides (8, 4), got ({f_fused.stride}, "
                f"{f_ini.stride})")
        return self.decoder(f_fused.values, f_ini.values)

    # --- whole-pipeline forward ---

    def forward_with_features(self, image):
        """Returns (alpha, features); every feature map carries its stride."""
        block1, deep = self.backbone_forward(image)
        f_aspp = self.aspp_forward(deep)
        feats = {"block1": block1, "deep": deep, "aspp": f_aspp}
        if self.variant == "baseline":
            cat = torch.cat([block1.values, _up(f_aspp.values, 4)], dim=1)
            return self.tail(cat), feats
        f_ini = self.initial_details(block1)
        feats["ini"] = f_ini
        if self.variant == "inist":
            f_sed = FeatureMap(F.avg_pool2d(f_ini.values, 2), 8)
        else:
            f_sed = self.secondary_details(f_ini)
        feats["sed"] = f_sed
        f_aspp_up = FeatureMap(_up(f_aspp.values, 2), 8)
        fused = self.fuse(f_aspp_up, f_sed)
        feats["fused"] = fused
        return self.decode(fused, f_ini), feats

    def forward(self, image):
        alpha, _ = self.forward_with_features(image)
        return alpha


def _param_generator(seed, name):
    digest = hashlib.sha256(f"{seed}:{name}".encode()).digest()
    g = torch.Generator()
    g.manual_seed(int.from_bytes(digest[:8], "big"))
    return g


def initialize_weights(model, seed=0, init_std=None):
    """Deterministic init keyed by (seed, module path).

    Shared parts (encoder, context head, prediction tail) therefore receive
    identical weights across ablation variants built with the same seed.
    Encoder convs use fan-out scaling; everything outside the encoder draws
    from a zero-mean Gaussian (std `init_std`) with zero biases.
    """
    std = init_std if init_std is not None else model.config.init_std
    with torch.no_grad():
        for name, module in model.named_modules():
            g = _param_generator(seed, name)
            if isinstance(module, nn.Conv2d):
                if name.startswith("encoder"):
                    fan_out = module.weight.shape[0] * module.kernel_size[0] \
                        * module.kernel_size[1]
                    module.weight.normal_(0.0, math.sqrt(2.0 / fan_out),
                                          generator=g)
                else:
                    module.weight.normal_(0.0, std, generator=g)
                if module.bias is not None:
                    module.bias.zero_()
            elif isinstance(module, nn.BatchNorm2d):
                module.weight.fill_(1.0)
                module.bias.zero_()
                module.reset_running_stats()
    return model


def build_model(config=ModelConfig(), seed=0):
    return initialize_weights(MattingNetwork(config), seed)


def parameter_count(model):
    return sum(p.numel() for p in model.parameters())


def predict_alpha(model, image, multiple=32):
    """Full-resolution inference for one (H, W, 3) float image in [0,1].

    Pads reflectively to the next /32 grid, runs the network in eval mode,
    and crops back, so arbitrary sizes are accepted.
    """
    import numpy as np
    from ..imageio import pad_to_multiple, validate_image

    arr = validate_image(np.asarray(image, dtype=np.float64))
    padded, (h, w) = pad_to_multiple(arr, multiple)
    x = torch.from_numpy(padded).permute(2, 0, 1)[None].to(
        next(model.parameters()).dtype)
    was_training = model.training
    model.eval()
    with torch.no_grad():
        alpha = model(x)[0, 0].double().numpy()
    if was_training:
        model.train()
    return alpha[:h, :w]
