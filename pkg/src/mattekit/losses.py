"""Blended training objective: pixel L1 + structural-similarity loss.

total = lambda1 * L1 + lambda2 * L_ssim, with the lambda pair scheduled per
epoch: (1, 0.1) on the first epoch, (1, 0.025) afterwards. All functions are
torch-autograd friendly and accept (H, W), (B, H, W) or (B, 1, H, W) inputs.
"""

import dataclasses

import torch
import torch.nn.functional as F

from .errors import RangeError, ShapeMismatchError


@dataclasses.dataclass(frozen=True)
class LossWeights:
    lambda1: float
    lambda2: float

    def __post_init__(self):
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise RangeError("loss weights must be non-negative")


@dataclasses.dataclass(frozen=True)
class SsimParams:
    window_size: int = 11
    sigma: float = 1.5
    dynamic_range: float = 1.0

    @property
    def c1(self):
        return (0.01 * self.dynamic_range) ** 2

    @property
    def c2(self):
        return (0.03 * self.dynamic_range) ** 2


def lambda_schedule(epoch):
    """(1, 0.1) on epoch 1; (1, 0.025) from epoch 2 onwards."""
    if epoch < 1:
        raise RangeError(f"epoch must be >= 1, got {epoch}")
    return LossWeights(1.0, 0.1) if epoch == 1 else LossWeights(1.0, 0.025)


def _as_nchw(pred, gt):
    pred = torch.as_tensor(pred)
    gt = torch.as_tensor(gt)
    if pred.shape != gt.shape:
        raise ShapeMismatchError(f"pred {tuple(pred.shape)} vs gt "
                                 f"{tuple(gt.shape)}")
    if pred.ndim == 2:
        pred, gt = pred[None, None], gt[None, None]
    elif pred.ndim == 3:
        pred, gt = pred[:, None], gt[:, None]
    elif pred.ndim != 4:
        raise ShapeMismatchError(f"expected 2-4 dims, got {pred.ndim}")
    return pred, gt


def l1_loss(pred, gt, reduction="mean"):
    """Sum (or per-pixel mean) of |pred - gt|.

    The raw sum is the textbook objective; the mean is what the optimizer
    consumes so the learning rate stays sane across crop sizes.
    """
    pred, gt = _as_nchw(pred, gt)
    diff = (pred - gt).abs()
    if reduction == "mean":
        return diff.mean()
    if reduction == "sum":
        return diff.sum()
    raise ValueError(f"unknown reduction {reduction!r}")


def gaussian_window(window_size, sigma, dtype=torch.float64):
    coords = torch.arange(window_size, dtype=dtype) - (window_size - 1) / 2.0
    g = torch.exp(-(coords ** 2) / (2.0 * sigma ** 2))
    g = g / g.sum()
    window = torch.outer(g, g)
    return (window / window.sum())[None, None]


def ssim_loss(pred, gt, params=SsimParams(), mode="windowed"):
    """1 - SSIM(pred, gt), in [0, 2].

    "windowed" slides the Gaussian window and averages local SSIM values
    (padding-free, so images must be at least window-sized). "global"
    evaluates the SSIM formula once with whole-image statistics, kept for
    testing the formula literally.
    """
    pred, gt = _as_nchw(pred, gt)
    c1, c2 = params.c1, params.c2
    if mode == "global":
        mu_p, mu_g = pred.mean(), gt.mean()
        var_p = ((pred - mu_p) ** 2).mean()
        var_g = ((gt - mu_g) ** 2).mean()
        cov = ((pred - mu_p) * (gt - mu_g)).mean()
        ssim = ((2 * mu_p * mu_g + c1) * (2 * cov + c2)) / \
            ((mu_p ** 2 + mu_g ** 2 + c1) * (var_p + var_g + c2))
        return 1.0 - ssim
    if mode != "windowed":
        raise ValueError(f"unknown ssim mode {mode!r}")
    win = params.window_size
    if pred.shape[-2] < win or pred.shape[-1] < win:
        raise ShapeMismatchError(
            f"image {tuple(pred.shape[-2:])} smaller than the {win}x{win} window")
    window = gaussian_window(win, params.sigma, dtype=pred.dtype)
    mu_p = F.conv2d(pred, window)
    mu_g = F.conv2d(gt, window)
    var_p = F.conv2d(pred * pred, window) - mu_p ** 2
    var_g = F.conv2d(gt * gt, window) - mu_g ** 2
    cov = F.conv2d(pred * gt, window) - mu_p * mu_g
    ssim_map = ((2 * mu_p * mu_g + c1) * (2 * cov + c2)) / \
        ((mu_p ** 2 + mu_g ** 2 + c1) * (var_p + var_g + c2))
    return 1.0 - ssim_map.mean()


def total_loss(pred, gt, weights, params=SsimParams()):
    return (weights.lambda1 * l1_loss(pred, gt)
            + weights.lambda2 * ssim_loss(pred, gt, params))


def loss_breakdown(pred, gt, weights, params=SsimParams()):
    """Component values for logging: (l1_term, ssim_term, total)."""
    l1 = l1_loss(pred, gt)
    ssim = ssim_loss(pred, gt, params)
    return l1, ssim, weights.lambda1 * l1 + weights.lambda2 * ssim
