"""PNG image I/O and float<->uint8 conversions.

Rasters are exchanged as float64 numpy arrays in [0,1]: RGB images are
(H, W, 3), alpha mattes are (H, W). Files on disk are 8-bit PNGs (RGB for
composites, single-channel gray for alphas).
"""

import numpy as np
import torch
import torch.nn.functional as F
from PIL import Image

from .errors import AssetError, RangeError, ShapeMismatchError


def validate_image(arr, name="image"):
    arr = np.asarray(arr)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ShapeMismatchError(f"{name} must be (H, W, 3), got {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeMismatchError(f"{name} has empty spatial dims {arr.shape}")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise RangeError(f"{name} values must lie in [0,1], got "
                         f"[{arr.min():g}, {arr.max():g}]")
    return arr


def validate_alpha(arr, name="alpha"):
    arr = np.asarray(arr)
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    if arr.ndim != 2:
        raise ShapeMismatchError(f"{name} must be (H, W), got {arr.shape}")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise RangeError(f"{name} values must lie in [0,1], got "
                         f"[{arr.min():g}, {arr.max():g}]")
    return arr


def quantize_u8(arr):
    """Float [0,1] -> uint8 with round-half-up, so |error| <= 1/510."""
    arr = np.asarray(arr, dtype=np.float64)
    return np.clip(np.floor(arr * 255.0 + 0.5), 0, 255).astype(np.uint8)


def dequantize_u8(arr):
    return np.asarray(arr, dtype=np.float64) / 255.0


def load_image(path):
    """Read an RGB PNG/JPEG into a float64 (H, W, 3) array in [0,1]."""
    try:
        with Image.open(path) as im:
            rgb = im.convert("RGB")
            return dequantize_u8(np.asarray(rgb))
    except (OSError, ValueError) as exc:
        raise AssetError(f"cannot decode image {path}: {exc}") from exc


def load_alpha(path):
    """Read a single-channel PNG into a float64 (H, W) array in [0,1]."""
    try:
        with Image.open(path) as im:
            gray = im.convert("L")
            return dequantize_u8(np.asarray(gray))
    except (OSError, ValueError) as exc:
        raise AssetError(f"cannot decode alpha {path}: {exc}") from exc


def save_image(path, arr):
    arr = validate_image(arr)
    Image.fromarray(quantize_u8(arr), mode="RGB").save(path, format="PNG")


def save_alpha(path, arr):
    arr = validate_alpha(arr)
    Image.fromarray(quantize_u8(arr), mode="L").save(path, format="PNG")


def _interpolate(arr, size, mode):
    # torch expects (N, C, H, W); keeps everything in float64
    if arr.ndim == 2:
        t = torch.from_numpy(np.ascontiguousarray(arr))[None, None]
    else:
        t = torch.from_numpy(np.ascontiguousarray(arr)).permute(2, 0, 1)[None]
    out = F.interpolate(t, size=size, mode=mode, align_corners=False)
    if arr.ndim == 2:
        res = out[0, 0].numpy()
    else:
        res = out[0].permute(1, 2, 0).numpy()
    return np.clip(res, 0.0, 1.0)


def resize_image(arr, size):
    """Bicubic resize of an RGB image to (height, width), clamped to [0,1]."""
    return _interpolate(np.asarray(arr, dtype=np.float64), size, "bicubic")


def resize_alpha(arr, size):
    """Bilinear resize of an alpha matte to (height, width), clamped to [0,1]."""
    return _interpolate(np.asarray(arr, dtype=np.float64), size, "bilinear")


def fit_to_shape(arr, size):
    """Scale preserving aspect ratio so `arr` covers `size`, then center-crop.

    Used to adapt a background to a foreground's dimensions before
    compositing.
    """
    th, tw = size
    h, w = arr.shape[:2]
    if (h, w) == (th, tw):
        return arr
    scale = max(th / h, tw / w)
    nh, nw = max(th, int(np.ceil(h * scale))), max(tw, int(np.ceil(w * scale)))
    resized = resize_image(arr, (nh, nw)) if arr.ndim == 3 else resize_alpha(arr, (nh, nw))
    y0 = (nh - th) // 2
    x0 = (nw - tw) // 2
    return resized[y0:y0 + th, x0:x0 + tw]


def pad_to_multiple(arr, multiple, mode="reflect"):
    """Pad H and W up to the next multiple; returns (padded, (H, W))."""
    h, w = arr.shape[:2]
    ph = (-h) % multiple
    pw = (-w) % multiple
    if ph == 0 and pw == 0:
        return arr, (h, w)
    pad = [(0, ph), (0, pw)] + [(0, 0)] * (arr.ndim - 2)
    return np.pad(arr, pad, mode=mode), (h, w)
