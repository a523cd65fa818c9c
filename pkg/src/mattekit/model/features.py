"""Feature-map bookkeeping and the adaptive assembly weight normalization."""

import dataclasses
import math

import torch

from ..errors import RangeError, ShapeMismatchError

VALID_STRIDES = (1, 2, 4, 8, 16)


@dataclasses.dataclass(frozen=True)
class FeatureMap:
    """Activation tensor (B, C, h, w) tagged with its output stride.

    The stride declares the ratio of the network input resolution to (h, w);
    `check_resolution` audits h == ceil(H/stride) against a concrete input.
    """
    values: torch.Tensor
    stride: int

    def __post_init__(self):
        if self.stride not in VALID_STRIDES:
            raise RangeError(f"stride must be one of {VALID_STRIDES}, "
                             f"got {self.stride}")
        if self.values.ndim != 4:
            raise ShapeMismatchError(
                f"feature map must be (B, C, h, w), got {tuple(self.values.shape)}")

    @property
    def channels(self):
        return self.values.shape[1]

    def check_resolution(self, input_hw):
        h, w = self.values.shape[-2:]
        eh = math.ceil(input_hw[0] / self.stride)
        ew = math.ceil(input_hw[1] / self.stride)
        if (h, w) != (eh, ew):
            raise ShapeMismatchError(
                f"stride-{self.stride} map is {h}x{w}, expected {eh}x{ew} "
                f"for input {input_hw[0]}x{input_hw[1]}")
        return self


def normalize_assembly_weights(raw_a, raw_b, epsilon=1e-8):
    """Normalize two non-negative raw weights to the pair used for assembly.

    norm_a = raw_a / (raw_a + raw_b) + epsilon (and symmetrically for b), so
    norm_a + norm_b == 1 + 2*epsilon and the pair is invariant to scaling
    both raws by any k > 0. A zero raw sum degenerates to the symmetric
    split (0.5 + epsilon each) instead of dividing by zero.

    Works on python floats and on torch tensors (keeps autograd intact).
    """
    if isinstance(raw_a, torch.Tensor) or isinstance(raw_b, torch.Tensor):
        raw_a = torch.as_tensor(raw_a)
        raw_b = torch.as_tensor(raw_b)
        total = raw_a + raw_b
        safe = torch.where(total > 0, total, torch.ones_like(total))
        half = torch.full_like(total, 0.5)
        norm_a = torch.where(total > 0, raw_a / safe, half) + epsilon
        norm_b = torch.where(total > 0, raw_b / safe, half) + epsilon
        return norm_a, norm_b
    if raw_a < 0 or raw_b < 0:
        raise RangeError("raw assembly weights must be non-negative")
    total = raw_a + raw_b
    if total == 0:
        return 0.5 + epsilon, 0.5 + epsilon
    return raw_a / total + epsilon, raw_b / total + epsilon


@dataclasses.dataclass(frozen=True)
class AssemblyWeights:
    """The two raw assembly scalars plus the stabilizer epsilon."""
    raw_aspp: float
    raw_sed: float
    epsilon: float = 1e-8

    def __post_init__(self):
        if self.raw_aspp < 0 or self.raw_sed < 0:
            raise RangeError("raw assembly weights must be non-negative")
        if self.epsilon <= 0:
            raise RangeError("epsilon must be positive")

    def normalized(self):
        return normalize_assembly_weights(self.raw_aspp, self.raw_sed,
                                          self.epsilon)


def assemble(f_aspp, f_sed, weights):
    """Weighted channel-concatenation of the two streams.

    Both inputs must already share spatial dimensions (the semantic stream
    is upsampled to stride 8 before this call). Output channels are the sum
    of the input channels; stride is inherited.
    """
    if f_aspp.values.shape[-2:] != f_sed.values.shape[-2:]:
        raise ShapeMismatchError(
            f"assembly inputs disagree spatially: {tuple(f_aspp.values.shape[-2:])} "
            f"vs {tuple(f_sed.values.shape[-2:])}")
    if f_aspp.stride != f_sed.stride:
        raise ShapeMismatchError(
            f"assembly inputs disagree in stride: {f_aspp.stride} vs {f_sed.stride}")
    norm_a, norm_s = weights.normalized()
    fused = torch.cat([norm_a * f_aspp.values, norm_s * f_sed.values], dim=1)
    return FeatureMap(fused, f_aspp.stride)
