"""Training augmentation: multi-size random crop, resize, horizontal flip.

One crop size is drawn from the configured ladder, a placement is drawn
(re-drawn up to 10 times if the cropped alpha is entirely 0 or entirely 1,
then accepted regardless), both rasters are resized to the target
resolution (bicubic for the image, bilinear for the alpha, clamped) and
flipped together with the configured probability. Everything is a pure
function of the seed.
"""

import dataclasses

import numpy as np

from ..imageio import resize_alpha, resize_image

CROP_RETRIES = 10


@dataclasses.dataclass(frozen=True)
class CropTransform:
    y0: int
    x0: int
    size: int
    flip: bool


def _pad_min_size(image, alpha, size):
    h, w = alpha.shape
    ph = max(0, size - h)
    pw = max(0, size - w)
    if ph == 0 and pw == 0:
        return image, alpha
    image = np.pad(image, ((0, ph), (0, pw), (0, 0)), mode="reflect")
    alpha = np.pad(alpha, ((0, ph), (0, pw)), mode="reflect")
    return image, alpha


def apply_transform(image, alpha, transform, target_size):
    """Deterministic functional core: crop, resize to target, maybe flip."""
    image, alpha = _pad_min_size(image, alpha, transform.size)
    y0, x0, s = transform.y0, transform.x0, transform.size
    img_c = image[y0:y0 + s, x0:x0 + s]
    alp_c = alpha[y0:y0 + s, x0:x0 + s]
    img_r = resize_image(img_c, (target_size, target_size))
    alp_r = resize_alpha(alp_c, (target_size, target_size))
    if transform.flip:
        img_r = img_r[:, ::-1].copy()
        alp_r = alp_r[:, ::-1].copy()
    return img_r, alp_r


def augment(sample, seed, crop_sizes=(512, 640, 800), target_size=512,
            flip_prob=0.5):
    """Augment one (ImageRGB, AlphaMatte) pair; deterministic per seed."""
    image, alpha = sample
    rng = np.random.Generator(np.random.PCG64(seed))
    size = int(crop_sizes[rng.integers(0, len(crop_sizes))])
    image_p, alpha_p = _pad_min_size(image, alpha, size)
    h, w = alpha_p.shape
    y0 = x0 = 0
    for _ in range(CROP_RETRIES):
        y0 = int(rng.integers(0, h - size + 1))
        x0 = int(rng.integers(0, w - size + 1))
        window = alpha_p[y0:y0 + size, x0:x0 + size]
        if window.max() > 0.0 and window.min() < 1.0:
            break
    flip = bool(rng.random() < flip_prob)
    transform = CropTransform(y0=y0, x0=x0, size=size, flip=flip)
    return apply_transform(image_p, alpha_p, transform, target_size)
