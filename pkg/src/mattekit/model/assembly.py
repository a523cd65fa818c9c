"""Adaptive two-stream assembly with learnable non-negative scalars.

Each stream gets one raw scalar, kept positive through a softplus map and
normalized so the pair sums to 1 + 2*epsilon. The weighted streams are
channel-concatenated; the balance between semantic context and condensed
detail is learned end to end.
"""

import math

import torch
import torch.nn as nn
import torch.nn.functional as F

from ..errors import ShapeMismatchError
from .features import normalize_assembly_weights

# softplus(_RAW_INIT) == 1.0, so both normalized weights start at 0.5 + eps
_RAW_INIT = math.log(math.e - 1.0)


class AdaptiveAssembly(nn.Module):
    def __init__(self, epsilon=1e-8):
        super().__init__()
        self.epsilon = epsilon
        self.theta_aspp = nn.Parameter(torch.tensor(_RAW_INIT))
        self.theta_sed = nn.Parameter(torch.tensor(_RAW_INIT))

    def raw_weights(self):
        return F.softplus(self.theta_aspp), F.softplus(self.theta_sed)

    def normalized_weights(self):
        raw_a, raw_s = self.raw_weights()
        return normalize_assembly_weights(raw_a, raw_s, self.epsilon)

    def forward(self, f_aspp, f_sed):
        if f_aspp.shape[-2:] != f_sed.shape[-2:]:
            raise ShapeMismatchError(
                f"assembly inputs disagree spatially: "
                f"{tuple(f_aspp.shape[-2:])} vs {tuple(f_sed.shape[-2:])}")
        norm_a, norm_s = self.normalized_weights()
        return torch.cat([norm_a * f_aspp, norm_s * f_sed], dim=1)
