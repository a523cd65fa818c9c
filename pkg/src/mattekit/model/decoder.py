"""Decoder: fused stride-8 features -> full-resolution alpha.

Two 3x3 convs on the fused map, x2 bilinear upsample, concatenation with
the stride-4 initial details, two more 3x3 convs down to one channel,
sigmoid, then x4 bilinear upsample back to input resolution. Only the
decoder's final conv skips the ReLU (sigmoid output head).
"""

import torch
import torch.nn as nn
import torch.nn.functional as F

HEAD_CHANNELS = 256
TAIL_CHANNELS = 64


def _up(x, factor):
    return F.interpolate(x, scale_factor=factor, mode="bilinear",
                         align_corners=False)


class FusionHead(nn.Module):
    """Two 3x3 convs applied to the assembled stride-8 features."""

    def __init__(self, in_ch, out_ch=HEAD_CHANNELS):
        super().__init__()
        self.conv1 = nn.Conv2d(in_ch, out_ch, 3, padding=1)
        self.conv2 = nn.Conv2d(out_ch, out_ch, 3, padding=1)

    def forward(self, x):
        x = F.relu(self.conv1(x))
        return F.relu(self.conv2(x))


class PredictionTail(nn.Module):
    """Two 3x3 convs -> 1 channel -> sigmoid -> x`upsample` to full size."""

    def __init__(self, in_ch, upsample=4):
        super().__init__()
        self.conv1 = nn.Conv2d(in_ch, TAIL_CHANNELS, 3, padding=1)
        self.conv2 = nn.Conv2d(TAIL_CHANNELS, 1, 3, padding=1)
        self.upsample = upsample

    def forward(self, x):
        x = F.relu(self.conv1(x))
        alpha = torch.sigmoid(self.conv2(x))
        return _up(alpha, self.upsample)


class AssemblyDecoder(nn.Module):
    """Full decode path from fused stride-8 features and stride-4 details."""

    def __init__(self, fused_ch, detail_ch):
        super().__init__()
        self.head = FusionHead(fused_ch)
        self.tail = PredictionTail(HEAD_CHANNELS + detail_ch)

    def forward(self, f_fused, f_ini):
        x = _up(self.head(f_fused), 2)
        f_cat = torch.cat([x, f_ini], dim=1)
        return self.tail(f_cat)
