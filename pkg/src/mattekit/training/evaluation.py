"""Model evaluation: full-resolution inference over a manifest + metrics."""

from pathlib import Path

from .. import metrics
from ..compositing import read_manifest
from ..imageio import load_image, save_alpha
from ..model import load_checkpoint, predict_alpha


def write_predictions(model, manifest_path, predictions_dir):
    """Run inference for every manifest record; returns the predictions dir.

    Inputs are padded to the /32 grid internally and cropped back, so any
    image size in the manifest is accepted.
    """
    manifest_path = Path(manifest_path)
    predictions_dir = Path(predictions_dir)
    predictions_dir.mkdir(parents=True, exist_ok=True)
    records = read_manifest(manifest_path)
    root = manifest_path.parent
    for rec in records:
        image = load_image(root / rec.composite)
        alpha = predict_alpha(model, image)
        save_alpha(predictions_dir / f"{Path(rec.composite).stem}.png", alpha)
    return predictions_dir


def evaluate_model(model_or_checkpoint, manifest_path, out_dir,
                   allow_missing=False):
    """Predict + score a manifest; writes predictions/ and metrics.json."""
    if isinstance(model_or_checkpoint, (str, Path)):
        model, _, _ = load_checkpoint(model_or_checkpoint)
    else:
        model = model_or_checkpoint
    out_dir = Path(out_dir)
    predictions_dir = write_predictions(model, manifest_path,
                                        out_dir / "predictions")
    report = metrics.evaluate(manifest_path, predictions_dir,
                              allow_missing=allow_missing)
    report.save(out_dir / "metrics.json")
    return report
