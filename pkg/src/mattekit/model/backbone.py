"""Grouped-convolution residual encoders with a shallow tap.

Two profiles share the same interface: features at stride 4 (first stage,
used by the shallow-detail branch) and stride 16 (final stage, feeding the
dilated-pyramid head). The full profile mirrors the ResNeXt-101 32x8d
layout, with the last stage dilated so the output stride stays 16; the toy
profile is a small 4-stage analogue that keeps CPU tests fast.
"""

import torch.nn as nn

from ..errors import ShapeMismatchError


class Bottleneck(nn.Module):
    """1x1 -> grouped 3x3 -> 1x1 residual block."""

    def __init__(self, in_ch, width, out_ch, stride=1, dilation=1, groups=32):
        super().__init__()
        self.conv1 = nn.Conv2d(in_ch, width, 1, bias=False)
        self.bn1 = nn.BatchNorm2d(width)
        self.conv2 = nn.Conv2d(width, width, 3, stride=stride,
                               padding=dilation, dilation=dilation,
                               groups=groups, bias=False)
        self.bn2 = nn.BatchNorm2d(width)
        self.conv3 = nn.Conv2d(width, out_ch, 1, bias=False)
        self.bn3 = nn.BatchNorm2d(out_ch)
        self.relu = nn.ReLU(inplace=True)
        if stride != 1 or in_ch != out_ch:
            self.downsample = nn.Sequential(
                nn.Conv2d(in_ch, out_ch, 1, stride=stride, bias=False),
                nn.BatchNorm2d(out_ch))
        else:
            self.downsample = None

    def forward(self, x):
        identity = x if self.downsample is None else self.downsample(x)
        out = self.relu(self.bn1(self.conv1(x)))
        out = self.relu(self.bn2(self.conv2(out)))
        out = self.bn3(self.conv3(out))
        return self.relu(out + identity)


class ToyEncoder(nn.Module):
    """Small 4-stage grouped-conv encoder: widths (64,128,256,512),
    stage strides (4, 8, 16, 16). Stage 4 is dilated instead of strided."""

    block1_channels = 64
    deep_channels = 512

    def __init__(self):
        super().__init__()
        self.stem = nn.Sequential(
            nn.Conv2d(3, 32, 3, stride=2, padding=1, bias=False),
            nn.BatchNorm2d(32), nn.ReLU(inplace=True),
            nn.Conv2d(32, 64, 3, stride=2, padding=1, bias=False),
            nn.BatchNorm2d(64), nn.ReLU(inplace=True))
        self.stage1 = Bottleneck(64, 64, 64, stride=1, groups=8)
        self.stage2 = Bottleneck(64, 128, 128, stride=2, groups=8)
        self.stage3 = Bottleneck(128, 256, 256, stride=2, groups=8)
        self.stage4 = Bottleneck(256, 512, 512, stride=1, dilation=2, groups=8)

    def forward(self, x):
        x = self.stem(x)
        block1 = self.stage1(x)
        x = self.stage2(block1)
        x = self.stage3(x)
        deep = self.stage4(x)
        return block1, deep


class ResNeXtEncoder(nn.Module):
    """ResNeXt-101 32x8d layout with output stride 16 (dilated last stage).

    Module names follow the common torchvision convention so a locally
    available pretrained state dict can be loaded via `load_pretrained`.
    """

    block1_channels = 256
    deep_channels = 2048

    def __init__(self, layers=(3, 4, 23, 3), groups=32, base_width=8):
        super().__init__()
        self.groups = groups
        self.base_width = base_width
        self.conv1 = nn.Conv2d(3, 64, 7, stride=2, padding=3, bias=False)
        self.bn1 = nn.BatchNorm2d(64)
        self.relu = nn.ReLU(inplace=True)
        self.maxpool = nn.MaxPool2d(3, stride=2, padding=1)
        self.layer1 = self._stage(64, 64, layers[0], stride=1)
        self.layer2 = self._stage(256, 128, layers[1], stride=2)
        self.layer3 = self._stage(512, 256, layers[2], stride=2)
        self.layer4 = self._stage(1024, 512, layers[3], stride=1, dilation=2)

    def _stage(self, in_ch, planes, blocks, stride, dilation=1):
        width = int(planes * (self.base_width / 64.0)) * self.groups
        out_ch = planes * 4
        stage = [Bottleneck(in_ch, width, out_ch, stride=stride,
                            dilation=dilation, groups=self.groups)]
        for _ in range(1, blocks):
            stage.append(Bottleneck(out_ch, width, out_ch,
                                    dilation=dilation, groups=self.groups))
        return nn.Sequential(*stage)

    def forward(self, x):
        x = self.maxpool(self.relu(self.bn1(self.conv1(x))))
        block1 = self.layer1(x)
        x = self.layer2(block1)
        x = self.layer3(x)
        deep = self.layer4(x)
        return block1, deep

    def load_pretrained(self, state_dict):
        # classifier weights (fc.*) are absent here by design
        filtered = {k: v for k, v in state_dict.items()
                    if not k.startswith("fc.")}
        missing, unexpected = self.load_state_dict(filtered, strict=False)
        return missing, unexpected


ENCODERS = {"toy": ToyEncoder, "full": ResNeXtEncoder}


def check_input_dims(x, multiple=32):
    h, w = x.shape[-2:]
    if h % multiple or w % multiple:
        raise ShapeMismatchError(
            f"input dims must be divisible by {multiple}, got {h}x{w}; "
            "pad or resize before calling")
