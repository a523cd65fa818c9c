"""Synthetic matting assets: anti-aliased discs, rings, and strands.

Desk-scale stand-in for benchmark foregrounds, which are not redistributable.
Alphas have genuine fractional borders (smooth falloff over a few pixels) so
crops around transitions carry training signal.
"""

import numpy as np

from .compositing import synthesize_from_dirs
from .imageio import save_alpha, save_image


def _grid(size):
    h, w = size
    ys, xs = np.mgrid[0:h, 0:w]
    return ys.astype(np.float64), xs.astype(np.float64)


def _soft_edge(signed_dist, softness):
    # smoothstep over [-softness, +softness]; inside = 1
    t = np.clip(0.5 - signed_dist / (2.0 * softness), 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def disc_alpha(size, center, radius, softness=2.0):
    ys, xs = _grid(size)
    d = np.hypot(ys - center[0], xs - center[1]) - radius
    return _soft_edge(d, softness)


def ring_alpha(size, center, radius, thickness, softness=2.0):
    ys, xs = _grid(size)
    d = np.abs(np.hypot(ys - center[0], xs - center[1]) - radius) - thickness / 2.0
    return _soft_edge(d, softness)


def strand_alpha(size, p0, p1, width, softness=1.5):
    """Soft-edged segment from p0 to p1 (hair-like filament)."""
    ys, xs = _grid(size)
    v = np.array(p1, dtype=np.float64) - np.array(p0, dtype=np.float64)
    norm2 = max(float(v @ v), 1e-9)
    t = np.clip(((ys - p0[0]) * v[0] + (xs - p0[1]) * v[1]) / norm2, 0.0, 1.0)
    py = p0[0] + t * v[0]
    px = p0[1] + t * v[1]
    d = np.hypot(ys - py, xs - px) - width / 2.0
    return _soft_edge(d, softness)


def _smooth_field(rng, size, scale=8):
    """Low-frequency random field in [0,1] via bilinear blow-up of noise."""
    h, w = size
    coarse = rng.random((max(2, h // scale), max(2, w // scale)))
    ys = np.linspace(0, coarse.shape[0] - 1, h)
    xs = np.linspace(0, coarse.shape[1] - 1, w)
    y0 = np.floor(ys).astype(int).clip(0, coarse.shape[0] - 2)
    x0 = np.floor(xs).astype(int).clip(0, coarse.shape[1] - 2)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]
    a = coarse[np.ix_(y0, x0)]
    b = coarse[np.ix_(y0, x0 + 1)]
    c = coarse[np.ix_(y0 + 1, x0)]
    d = coarse[np.ix_(y0 + 1, x0 + 1)]
    return (a * (1 - fy) * (1 - fx) + b * (1 - fy) * fx
            + c * fy * (1 - fx) + d * fy * fx)


def random_foreground(rng, size):
    """One foreground (rgb, alpha): a disc, ring, or strand bundle."""
    h, w = size
    kind = rng.choice(["disc", "ring", "strands"])
    cy = rng.uniform(0.3 * h, 0.7 * h)
    cx = rng.uniform(0.3 * w, 0.7 * w)
    if kind == "disc":
        alpha = disc_alpha(size, (cy, cx), rng.uniform(0.15, 0.3) * min(h, w),
                           softness=rng.uniform(1.5, 4.0))
    elif kind == "ring":
        alpha = ring_alpha(size, (cy, cx), rng.uniform(0.2, 0.35) * min(h, w),
                           thickness=rng.uniform(0.05, 0.12) * min(h, w),
                           softness=rng.uniform(1.5, 4.0))
    else:
        alpha = np.zeros(size)
        for _ in range(int(rng.integers(3, 7))):
            p0 = (rng.uniform(0, h), rng.uniform(0, w))
            p1 = (rng.uniform(0, h), rng.uniform(0, w))
            alpha = np.maximum(
                alpha, strand_alpha(size, p0, p1, width=rng.uniform(1.5, 4.0)))
    base = rng.uniform(0.2, 1.0, size=3)
    shade = 0.6 + 0.4 * _smooth_field(rng, size)
    rgb = np.clip(shade[:, :, None] * base[None, None, :], 0.0, 1.0)
    return rgb, np.clip(alpha, 0.0, 1.0)


def random_background(rng, size):
    """Smooth two-color gradient plus gentle texture."""
    c0 = rng.uniform(0.0, 1.0, size=3)
    c1 = rng.uniform(0.0, 1.0, size=3)
    h, w = size
    ramp = _smooth_field(rng, size, scale=max(4, min(h, w) // 4))
    tex = 0.08 * (_smooth_field(rng, size, scale=4) - 0.5)
    field = np.clip(ramp + tex, 0.0, 1.0)[:, :, None]
    return np.clip(c0[None, None, :] * (1 - field) + c1[None, None, :] * field,
                   0.0, 1.0)


def make_assets(out_dir, n_fg, n_bg, size, seed):
    """Write fg/, alpha/ and bg/ PNG pools for the synthesis pipeline."""
    from pathlib import Path
    out_dir = Path(out_dir)
    fg_dir = out_dir / "fg"
    alpha_dir = out_dir / "alpha"
    bg_dir = out_dir / "bg"
    for d in (fg_dir, alpha_dir, bg_dir):
        d.mkdir(parents=True, exist_ok=True)
    rng = np.random.Generator(np.random.PCG64(seed))
    for i in range(n_fg):
        rgb, alpha = random_foreground(rng, size)
        save_image(fg_dir / f"shape{i:04d}.png", rgb)
        save_alpha(alpha_dir / f"shape{i:04d}.png", alpha)
    for i in range(n_bg):
        save_image(bg_dir / f"scene{i:04d}.png", random_background(rng, size))
    return fg_dir, alpha_dir, bg_dir


def make_dataset(out_dir, n_fg, n_bg, per_fg, size, seed, split="train"):
    """Assets + composites + manifest in one call; returns the report."""
    from pathlib import Path
    out_dir = Path(out_dir)
    fg_dir, alpha_dir, bg_dir = make_assets(out_dir / "assets", n_fg, n_bg,
                                            size, seed)
    return synthesize_from_dirs(fg_dir, alpha_dir, bg_dir, per_fg,
                                seed + 1, out_dir / split, split=split)
