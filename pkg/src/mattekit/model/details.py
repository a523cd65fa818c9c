"""Shallow-detail branch: two stages over the encoder's first-stage features.

The initial stage filters raw low-level textures with two 3x3 convs at 64
channels (stride 4 preserved). The secondary stage condenses them further:
one stride-2 3x3 conv followed by three cascaded 3x3 convs, all at 256
channels, yielding a stride-8 map.
"""

import torch.nn as nn

from ..errors import ShapeMismatchError

INITIAL_CHANNELS = 64
SECONDARY_CHANNELS = 256


def _conv_bn_relu(in_ch, out_ch, stride=1):
    return nn.Sequential(
        nn.Conv2d(in_ch, out_ch, 3, stride=stride, padding=1, bias=False),
        nn.BatchNorm2d(out_ch),
        nn.ReLU(inplace=True))


class InitialDetailStage(nn.Module):
    """block1 (stride 4) -> 64-channel filtered details (stride 4)."""

    def __init__(self, in_ch):
        super().__init__()
        self.in_channels = in_ch
        self.body = nn.Sequential(
            _conv_bn_relu(in_ch, INITIAL_CHANNELS),
            _conv_bn_relu(INITIAL_CHANNELS, INITIAL_CHANNELS))

    def forward(self, block1):
        if block1.shape[1] != self.in_channels:
            raise ShapeMismatchError(
                f"initial detail stage expects {self.in_channels} channels, "
                f"got {block1.shape[1]}")
        return self.body(block1)


class SecondaryDetailStage(nn.Module):
    """64-channel details (stride 4) -> 256-channel condensed map (stride 8)."""

    def __init__(self):
        super().__init__()
        self.downsample = _conv_bn_relu(INITIAL_CHANNELS, SECONDARY_CHANNELS,
                                        stride=2)
        self.cascade = nn.Sequential(
            _conv_bn_relu(SECONDARY_CHANNELS, SECONDARY_CHANNELS),
            _conv_bn_relu(SECONDARY_CHANNELS, SECONDARY_CHANNELS),
            _conv_bn_relu(SECONDARY_CHANNELS, SECONDARY_CHANNELS))

    def forward(self, f_ini):
        if f_ini.shape[1] != INITIAL_CHANNELS:
            raise ShapeMismatchError(
                f"secondary detail stage expects {INITIAL_CHANNELS} channels, "
                f"got {f_ini.shape[1]}")
        return self.cascade(self.downsample(f_ini))
