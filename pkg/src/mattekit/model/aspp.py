"""Dilated-pyramid context head (ASPP).

Four parallel branches (1x1 conv; 3x3 atrous convs at the configured rates)
plus an image-level pooling branch, concatenated and projected to the fixed
output width. Spatial dimensions are preserved.
"""

import torch
import torch.nn as nn
import torch.nn.functional as F


def _conv_bn_relu(in_ch, out_ch, kernel, dilation=1):
    padding = 0 if kernel == 1 else dilation
    return nn.Sequential(
        nn.Conv2d(in_ch, out_ch, kernel, padding=padding, dilation=dilation,
                  bias=False),
        nn.BatchNorm2d(out_ch),
        nn.ReLU(inplace=True))


class AtrousPyramid(nn.Module):
    def __init__(self, in_ch, out_ch=256, rates=(6, 12, 18)):
        super().__init__()
        self.branches = nn.ModuleList([_conv_bn_relu(in_ch, out_ch, 1)])
        for rate in rates:
            self.branches.append(_conv_bn_relu(in_ch, out_ch, 3, dilation=rate))
        self.image_pool = nn.Sequential(
            nn.AdaptiveAvgPool2d(1),
            nn.Conv2d(in_ch, out_ch, 1, bias=False),
            nn.BatchNorm2d(out_ch),
            nn.ReLU(inplace=True))
        self.project = _conv_bn_relu(out_ch * (len(rates) + 2), out_ch, 1)
        self.out_channels = out_ch

    def forward(self, x):
        feats = [branch(x) for branch in self.branches]
        pooled = self.image_pool(x)
        feats.append(F.interpolate(pooled, size=x.shape[-2:], mode="bilinear",
                                   align_corners=False))
        return self.project(torch.cat(feats, dim=1))
