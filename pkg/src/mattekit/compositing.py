"""Foreground/background compositing and composite-dataset synthesis.

A matted image decomposes per pixel i into alpha_i * fg_i + (1 - alpha_i) * bg_i.
`composite` evaluates that blend; `synthesize_split` applies it at scale,
pairing each foreground/alpha asset with randomly drawn backgrounds to build
a training or testing split with a JSON-lines manifest.
"""

import dataclasses
import json
import os
from pathlib import Path

import numpy as np

from .errors import AssetError, ShapeMismatchError
from .imageio import (fit_to_shape, load_alpha, load_image, save_alpha,
                      save_image, validate_alpha, validate_image)

MANIFEST_NAME = "manifest.jsonl"
ERRORS_NAME = "synthesis_errors.json"


@dataclasses.dataclass(frozen=True)
class ManifestRecord:
    """One composite example: paths are relative to the manifest file."""
    composite: str
    alpha: str
    fg_id: str
    bg_id: str
    seed: int
    split: str

    def to_json(self):
        return json.dumps(dataclasses.asdict(self), sort_keys=True)


@dataclasses.dataclass
class SynthesisReport:
    manifest_path: Path
    records: list
    errors: list  # (fg_id, message) pairs, never silently dropped


def composite(fg, bg, alpha):
    """Blend foreground over background: out_i = a_i*fg_i + (1-a_i)*bg_i.

    Exact at alpha in {0,1}: the blend is evaluated literally so those
    endpoints reproduce fg/bg bitwise at float precision.
    """
    fg = validate_image(np.asarray(fg, dtype=np.float64), "fg")
    bg = validate_image(np.asarray(bg, dtype=np.float64), "bg")
    alpha = validate_alpha(np.asarray(alpha, dtype=np.float64))
    if fg.shape != bg.shape or fg.shape[:2] != alpha.shape:
        raise ShapeMismatchError(
            f"fg {fg.shape}, bg {bg.shape}, alpha {alpha.shape} must share "
            "spatial dimensions")
    a = alpha[:, :, None]
    return a * fg + (1.0 - a) * bg


def load_pair(image_path, alpha_path):
    """Load an (image, alpha) pair, scaled to [0,1] (8-bit value v -> v/255)."""
    image = load_image(image_path)
    alpha = load_alpha(alpha_path)
    if image.shape[:2] != alpha.shape:
        raise ShapeMismatchError(
            f"image {image.shape[:2]} and alpha {alpha.shape} sizes differ "
            f"({image_path} / {alpha_path})")
    return image, alpha


def plan_split(n_fg, n_bg, per_fg, seed, split="train"):
    """Pure record plan: which background and per-record seed each composite uses.

    Deterministic given `seed`; len(plan) == n_fg * per_fg. Separating the
    plan from rendering lets large protocols (e.g. 431 foregrounds x 100) be
    audited without touching the filesystem, and makes each record
    independently renderable (safe to parallelize).
    """
    if per_fg < 1:
        raise ValueError(f"per_fg must be >= 1, got {per_fg}")
    if n_bg < 1:
        raise ValueError("background pool is empty")
    rng = np.random.Generator(np.random.PCG64(seed))
    plan = []
    for fg_idx in range(n_fg):
        for k in range(per_fg):
            bg_idx = int(rng.integers(0, n_bg))
            record_seed = int(rng.integers(0, 2**31 - 1))
            plan.append((fg_idx, k, bg_idx, record_seed))
    return plan


def synthesize_split(fg_alphas, bg_pool, per_fg, seed, out_dir, split="train",
                     fg_ids=None, bg_ids=None):
    """Render per_fg composites per foreground and write a manifest.

    fg_alphas: list of (ImageRGB, AlphaMatte) pairs, or of callables
        returning such a pair (lets decode errors surface per record).
    bg_pool:   list of ImageRGB, or of callables returning one.
    Backgrounds are aspect-preserving scaled then center-cropped to each
    foreground's dimensions. Deterministic given `seed`; equal seeds yield
    byte-identical manifests and images.
    """
    out_dir = Path(out_dir)
    comp_dir = out_dir / "composite"
    alpha_dir = out_dir / "alpha"
    comp_dir.mkdir(parents=True, exist_ok=True)
    alpha_dir.mkdir(parents=True, exist_ok=True)

    fg_ids = fg_ids or [f"fg{i:04d}" for i in range(len(fg_alphas))]
    bg_ids = bg_ids or [f"bg{i:04d}" for i in range(len(bg_pool))]
    plan = plan_split(len(fg_alphas), len(bg_pool), per_fg, seed, split)

    records, errors = [], []
    bg_cache = {}
    for fg_idx, k, bg_idx, record_seed in plan:
        fid, bid = fg_ids[fg_idx], bg_ids[bg_idx]
        stem = f"{split}_{fid}_{k:03d}_{bid}"
        try:
            fg_entry = fg_alphas[fg_idx]
            fg, alpha = fg_entry() if callable(fg_entry) else fg_entry
            fg = validate_image(fg, f"fg {fid}")
            alpha = validate_alpha(alpha, f"alpha {fid}")
            if fg.shape[:2] != alpha.shape:
                raise ShapeMismatchError(
                    f"fg {fg.shape[:2]} vs alpha {alpha.shape} for {fid}")
            if bg_idx not in bg_cache:
                bg_entry = bg_pool[bg_idx]
                bg_cache[bg_idx] = validate_image(
                    bg_entry() if callable(bg_entry) else bg_entry, f"bg {bid}")
            bg = fit_to_shape(bg_cache[bg_idx], fg.shape[:2])
            comp = composite(fg, bg, alpha)
            save_image(comp_dir / f"{stem}.png", comp)
            save_alpha(alpha_dir / f"{stem}.png", alpha)
        except (AssetError, ShapeMismatchError, ValueError, OSError) as exc:
            errors.append({"fg_id": fid, "bg_id": bid, "error": str(exc)})
            continue
        records.append(ManifestRecord(
            composite=f"composite/{stem}.png",
            alpha=f"alpha/{stem}.png",
            fg_id=fid, bg_id=bid, seed=record_seed, split=split))

    manifest_path = out_dir / MANIFEST_NAME
    write_manifest(manifest_path, records)
    if errors:
        (out_dir / ERRORS_NAME).write_text(
            json.dumps(errors, indent=2, sort_keys=True))
    return SynthesisReport(manifest_path, records, errors)


def write_manifest(path, records):
    with open(path, "w") as fh:
        for rec in records:
            fh.write(rec.to_json() + "\n")


def read_manifest(path):
    path = Path(path)
    if not path.is_file():
        raise AssetError(f"manifest not found: {path}")
    records = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(ManifestRecord(**json.loads(line)))
            except (json.JSONDecodeError, TypeError) as exc:
                raise AssetError(f"{path}:{line_no}: bad manifest line: {exc}") from exc
    return records


def verify_manifest(path, per_fg=None):
    """Check manifest invariants: per-foreground multiplicity and that every
    referenced file exists and decodes to matching dimensions.

    Returns the records; raises AssetError/ShapeMismatchError on violation.
    """
    path = Path(path)
    records = read_manifest(path)
    root = path.parent
    counts = {}
    for rec in records:
        counts[rec.fg_id] = counts.get(rec.fg_id, 0) + 1
        comp, alpha = load_pair(root / rec.composite, root / rec.alpha)
        if comp.shape[:2] != alpha.shape:
            raise ShapeMismatchError(
                f"{rec.composite}: composite/alpha sizes differ")
    if per_fg is not None:
        bad = {k: v for k, v in counts.items() if v != per_fg}
        if bad:
            raise AssetError(f"per-foreground counts != {per_fg}: {bad}")
    return records


def synthesize_from_dirs(fg_dir, alpha_dir, bg_dir, per_fg, seed, out_dir,
                         split="train"):
    """Directory-driven synthesis: fg/alpha matched by filename, any bg pool.

    Assets are loaded lazily so an unreadable file becomes a per-record error
    in the report instead of aborting the run.
    """
    fg_dir, alpha_dir, bg_dir = Path(fg_dir), Path(alpha_dir), Path(bg_dir)
    for d in (fg_dir, alpha_dir, bg_dir):
        if not d.is_dir():
            raise AssetError(f"asset directory missing: {d}")
    fg_names = sorted(p.name for p in fg_dir.iterdir() if p.is_file())
    bg_names = sorted(p.name for p in bg_dir.iterdir() if p.is_file())
    if not fg_names:
        raise AssetError(f"no foreground assets in {fg_dir}")
    if not bg_names:
        raise AssetError(f"no background assets in {bg_dir}")

    def pair_loader(name):
        return lambda: load_pair(fg_dir / name, alpha_dir / name)

    def bg_loader(name):
        return lambda: load_image(bg_dir / name)

    return synthesize_split(
        [pair_loader(n) for n in fg_names],
        [bg_loader(n) for n in bg_names],
        per_fg, seed, out_dir, split,
        fg_ids=[os.path.splitext(n)[0] for n in fg_names],
        bg_ids=[os.path.splitext(n)[0] for n in bg_names])
