"""SGD training loop with per-iteration polynomial decay and CSV logging.

Single device, deliberately plain: shuffled index batches, per-sample
augmentation keyed by derived seeds, torch SGD with momentum and weight
decay, a checkpoint per epoch. Deterministic mode pins every RNG stream so
equal configs reproduce byte-identical logs.
"""

import csv
import dataclasses
import json
import math
from collections import OrderedDict
from pathlib import Path

import numpy as np
import torch

from ..compositing import load_pair, read_manifest
from ..errors import AssetError, TrainingDiverged
from ..losses import lambda_schedule, loss_breakdown
from ..model import build_model, save_checkpoint
from ..seeding import stable_seed
from .augment import augment
from .schedule import poly_lr

LOG_COLUMNS = ("iter", "epoch", "lr", "lambda1", "lambda2", "l1", "ssim",
               "total")
_CACHE_LIMIT = 512


@dataclasses.dataclass
class TrainResult:
    final_checkpoint: Path
    log_path: Path
    rows: list
    best_checkpoint: Path = None
    val_reports: list = dataclasses.field(default_factory=list)


class _PairCache:
    def __init__(self, root, records):
        self.root = Path(root)
        self.records = records
        self._cache = OrderedDict()

    def __getitem__(self, idx):
        if idx in self._cache:
            self._cache.move_to_end(idx)
            return self._cache[idx]
        rec = self.records[idx]
        pair = load_pair(self.root / rec.composite, self.root / rec.alpha)
        self._cache[idx] = pair
        if len(self._cache) > _CACHE_LIMIT:
            self._cache.popitem(last=False)
        return pair


def _make_batch(cache, indices, cfg, epoch):
    images, alphas = [], []
    for idx in indices:
        seed = stable_seed(cfg.seed, "augment", epoch, idx)
        img, alp = augment(cache[idx], seed, cfg.crop_sizes, cfg.target_size,
                           cfg.flip_prob)
        images.append(torch.from_numpy(img).permute(2, 0, 1))
        alphas.append(torch.from_numpy(alp)[None])
    return (torch.stack(images).float(), torch.stack(alphas).float())


def _weight_norms(model):
    return {name: float(p.detach().norm()) for name, p in
            model.named_parameters()}


def train(cfg):
    """Run the configured training; returns a TrainResult.

    Raises TrainingDiverged (with a diagnostics dump on disk) the moment
    the loss goes non-finite.
    """
    manifest = Path(cfg.manifest)
    records = read_manifest(manifest)
    if not records:
        raise AssetError(f"manifest {manifest} is empty")
    out_dir = Path(cfg.out_dir)
    ckpt_dir = out_dir / "checkpoints"
    ckpt_dir.mkdir(parents=True, exist_ok=True)

    if cfg.deterministic:
        torch.manual_seed(stable_seed(cfg.seed, "torch"))
        torch.use_deterministic_algorithms(True)

    model = build_model(cfg.model, seed=stable_seed(cfg.seed, "init"))
    optimizer = torch.optim.SGD(model.parameters(), lr=cfg.lr0,
                                momentum=cfg.momentum,
                                weight_decay=cfg.weight_decay)

    cache = _PairCache(manifest.parent, records)
    batches_per_epoch = max(1, math.ceil(len(records) / cfg.batch_size))
    total_iters = max(1, cfg.epochs * batches_per_epoch)

    log_path = out_dir / "train_log.csv"
    rows = []
    iteration = 0
    best_sad = float("inf")
    best_path = None
    val_reports = []

    with open(log_path, "w", newline="") as log_fh:
        writer = csv.writer(log_fh)
        writer.writerow(LOG_COLUMNS)
        for epoch in range(1, cfg.epochs + 1):
            weights = lambda_schedule(epoch)
            order = np.random.Generator(
                np.random.PCG64(stable_seed(cfg.seed, "order", epoch))
            ).permutation(len(records))
            model.train()
            for b in range(batches_per_epoch):
                indices = order[b * cfg.batch_size:(b + 1) * cfg.batch_size]
                if len(indices) == 0:
                    continue
                images, alphas = _make_batch(cache, indices, cfg, epoch)
                lr = poly_lr(iteration, total_iters, cfg.lr0, cfg.poly_power)
                for group in optimizer.param_groups:
                    group["lr"] = lr
                optimizer.zero_grad()
                pred = model(images)
                l1, ssim, total = loss_breakdown(pred, alphas, weights)
                l1_v, ssim_v, total_v = (float(l1.detach()),
                                         float(ssim.detach()),
                                         float(total.detach()))
                if not torch.isfinite(total):
                    diag = {
                        "iteration": iteration, "epoch": epoch, "lr": lr,
                        "lambda1": weights.lambda1, "lambda2": weights.lambda2,
                        "l1": l1_v, "ssim": ssim_v,
                        "batch_records": [records[i].composite for i in indices],
                        "weight_norms": _weight_norms(model),
                    }
                    diag_path = out_dir / "divergence_diagnostics.json"
                    diag_path.write_text(json.dumps(diag, indent=2,
                                                    sort_keys=True))
                    raise TrainingDiverged(
                        f"non-finite loss at iteration {iteration} "
                        f"(dump: {diag_path})", diag)
                total.backward()
                optimizer.step()
                row = (iteration, epoch, lr, weights.lambda1, weights.lambda2,
                       l1_v, ssim_v, total_v)
                writer.writerow([repr(v) for v in row])
                rows.append(row)
                iteration += 1
            epoch_path = ckpt_dir / f"epoch_{epoch:04d}.pt"
            if cfg.checkpoint_every and epoch % cfg.checkpoint_every == 0:
                save_checkpoint(epoch_path, model, epoch, optimizer)
            if cfg.val_manifest:
                from .evaluation import evaluate_model
                report = evaluate_model(model, cfg.val_manifest,
                                        out_dir / f"val_epoch_{epoch:04d}")
                val_reports.append(report)
                if report.means["sad"] < best_sad:
                    best_sad = report.means["sad"]
                    if not epoch_path.exists():
                        save_checkpoint(epoch_path, model, epoch, optimizer)
                    best_path = ckpt_dir / "best.pt"
                    if best_path.is_symlink() or best_path.exists():
                        best_path.unlink()
                    best_path.symlink_to(epoch_path.name)

    final_path = ckpt_dir / "final.pt"
    save_checkpoint(final_path, model, cfg.epochs, optimizer)
    return TrainResult(final_checkpoint=final_path, log_path=log_path,
                       rows=rows, best_checkpoint=best_path,
                       val_reports=val_reports)
