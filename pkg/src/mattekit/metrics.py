"""The four standard matting metrics: SAD, MSE, Gradient, Connectivity.

Computed over full alpha images. SAD and the gradient/connectivity sums are
reported in kilo-units (/1000) so scores land in the customary benchmark
range; MSE is a plain per-pixel mean. Those scaling constants are recorded
in every report header.

SAD/MSE accumulate with exactly-rounded summation (math.fsum), which makes
them bit-reproducible regardless of vectorization strategy.
"""

import dataclasses
import json
import math
from pathlib import Path

import numpy as np
import scipy.ndimage

from .compositing import read_manifest
from .errors import AssetError, ShapeMismatchError
from .imageio import load_alpha

GRADIENT_SIGMA = 1.4
CONNECTIVITY_STEP = 0.1
CONNECTIVITY_THETA = 0.15
KILO = 1000.0

REPORT_HEADER = {
    "sad": "sum |pred - gt| / 1000",
    "mse": "mean (pred - gt)^2 over all pixels",
    "gradient": "sum (|grad pred| - |grad gt|)^2 / 1000, "
                f"gaussian-derivative filters sigma={GRADIENT_SIGMA}",
    "connectivity": "degree-of-connectedness deficit sum / 1000, "
                    f"threshold step {CONNECTIVITY_STEP}, "
                    f"theta={CONNECTIVITY_THETA}, 4-connected regions",
}

METRIC_NAMES = ("sad", "mse", "gradient", "connectivity")


def _check_pair(pred, gt):
    pred = np.asarray(pred, dtype=np.float64)
    gt = np.asarray(gt, dtype=np.float64)
    if pred.ndim != 2 or gt.ndim != 2:
        raise ShapeMismatchError("mattes must be 2-D (H, W)")
    if pred.shape != gt.shape:
        raise ShapeMismatchError(f"pred {pred.shape} vs gt {gt.shape}")
    return pred, gt


def sad(pred, gt):
    """Sum of absolute differences in kilo-units."""
    pred, gt = _check_pair(pred, gt)
    return math.fsum(np.abs(pred - gt).ravel()) / KILO


def mse(pred, gt):
    """Mean squared error over all pixels."""
    pred, gt = _check_pair(pred, gt)
    d = (pred - gt).ravel()
    return math.fsum(d * d) / d.size


def gradient_kernels(sigma=GRADIENT_SIGMA):
    """First-order Gaussian-derivative filter pair (x, y), L2-normalized."""
    eps = 1e-2
    halfsize = int(np.ceil(sigma * np.sqrt(
        -2.0 * np.log(np.sqrt(2.0 * np.pi) * sigma * eps))))
    size = 2 * halfsize + 1
    idx = np.arange(size) - halfsize
    gauss = np.exp(-idx ** 2 / (2.0 * sigma ** 2)) / (sigma * np.sqrt(2 * np.pi))
    dgauss = -idx * gauss / sigma ** 2
    hx = gauss[:, None] * dgauss[None, :]
    hx = hx / np.sqrt(np.sum(hx * hx))
    return hx, hx.T


def gradient_magnitude(alpha, sigma=GRADIENT_SIGMA):
    hx, hy = gradient_kernels(sigma)
    gx = scipy.ndimage.convolve(alpha, hx, mode="nearest")
    gy = scipy.ndimage.convolve(alpha, hy, mode="nearest")
    return np.sqrt(gx ** 2 + gy ** 2)


def gradient_error(pred, gt):
    """Squared difference of gradient-magnitude maps, summed, in kilo-units."""
    pred, gt = _check_pair(pred, gt)
    hx, _ = gradient_kernels()
    if min(pred.shape) < hx.shape[0]:
        raise ShapeMismatchError(
            f"image {pred.shape} smaller than the {hx.shape[0]}x{hx.shape[0]} "
            "derivative filter")
    diff = gradient_magnitude(pred) - gradient_magnitude(gt)
    return float(np.sum(diff ** 2)) / KILO


def _largest_component(mask):
    """Largest 4-connected foreground region of a boolean mask (empty if none)."""
    labels, count = scipy.ndimage.label(
        mask, structure=[[0, 1, 0], [1, 1, 1], [0, 1, 0]])
    if count == 0:
        return np.zeros_like(mask, dtype=bool)
    sizes = np.bincount(labels.ravel())
    sizes[0] = 0  # background never counts as a region
    return labels == sizes.argmax()


def connectivity_error(pred, gt, step=CONNECTIVITY_STEP,
                       theta=CONNECTIVITY_THETA):
    """Connectivity deficit between pred and gt, in kilo-units.

    For each threshold level the source of connectedness is the largest
    region where both mattes clear the level; each pixel records the last
    level at which it was still connected, and deviations beyond `theta`
    from that level are penalized.
    """
    pred, gt = _check_pair(pred, gt)
    n_steps = int(round(1.0 / step))
    l_map = np.full(pred.shape, -1.0)
    for i in range(1, n_steps + 1):
        level = i * step
        joint = (pred >= level) & (gt >= level)
        omega = _largest_component(joint)
        newly_cut = (l_map == -1.0) & ~omega
        l_map[newly_cut] = (i - 1) * step
    l_map[l_map == -1.0] = 1.0
    pred_d = pred - l_map
    gt_d = gt - l_map
    pred_phi = 1.0 - pred_d * (pred_d >= theta)
    gt_phi = 1.0 - gt_d * (gt_d >= theta)
    return float(np.sum(np.abs(pred_phi - gt_phi))) / KILO


def compute_all(pred, gt):
    return {
        "sad": sad(pred, gt),
        "mse": mse(pred, gt),
        "gradient": gradient_error(pred, gt),
        "connectivity": connectivity_error(pred, gt),
    }


@dataclasses.dataclass
class MetricsReport:
    header: dict
    per_image: list  # dicts: name + the four metrics
    means: dict
    missing: list

    def to_json(self):
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))

    def save(self, path):
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def load(cls, path):
        return cls.from_json(Path(path).read_text())


def aggregate(per_image, missing=()):
    means = {}
    for key in METRIC_NAMES:
        values = [row[key] for row in per_image]
        means[key] = math.fsum(values) / len(values) if values else float("nan")
    return MetricsReport(header=dict(REPORT_HEADER), per_image=list(per_image),
                         means=means, missing=list(missing))


def evaluate(manifest_path, predictions_dir, allow_missing=False):
    """Score every manifest record against predictions_dir/<composite stem>.png.

    A missing prediction is an error unless allow_missing is set, in which
    case it is listed in the report and excluded from the means.
    """
    manifest_path = Path(manifest_path)
    predictions_dir = Path(predictions_dir)
    records = read_manifest(manifest_path)
    root = manifest_path.parent
    per_image, missing = [], []
    for rec in records:
        name = Path(rec.composite).stem
        pred_path = predictions_dir / f"{name}.png"
        if not pred_path.is_file():
            if not allow_missing:
                raise AssetError(f"missing prediction: {pred_path}")
            missing.append(name)
            continue
        pred = load_alpha(pred_path)
        gt = load_alpha(root / rec.alpha)
        row = {"name": name}
        row.update(compute_all(pred, gt))
        per_image.append(row)
    return aggregate(per_image, missing)
