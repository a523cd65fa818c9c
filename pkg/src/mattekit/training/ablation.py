"""Four-variant ablation harness.

Trains and evaluates the variants (baseline, +initial details, +condensed
details, full adaptive assembly) under identical seeds and data, then
renders a four-row comparison table over the four standard metrics.
"""

import dataclasses
import json
from pathlib import Path

from ..errors import ConfigError
from ..model import VARIANTS, build_model, parameter_count
from ..seeding import stable_seed
from .evaluation import evaluate_model
from .loop import train

VARIANT_LABELS = {
    "baseline": "baseline",
    "inist": "+initial details",
    "inist_sedst": "+initial+condensed details",
    "full": "full (adaptive assembly)",
}

TABLE_COLUMNS = ("variant", "params", "sad", "mse", "gradient", "connectivity")


def variant_parameter_counts(model_config, seed=0):
    """Total parameter count per ablation variant (same widths/profile)."""
    counts = {}
    for variant in VARIANTS:
        cfg = dataclasses.replace(model_config, ablation_variant=variant)
        counts[variant] = parameter_count(
            build_model(cfg, seed=stable_seed(seed, "init")))
    return counts


def format_metrics_table(rows, columns=TABLE_COLUMNS):
    """Plain-text table with deterministic formatting."""
    def fmt(value):
        if isinstance(value, float):
            return f"{value:.4f}"
        return str(value)

    rendered = [[fmt(row.get(c, "")) for c in columns] for row in rows]
    header = [c.upper() if c != "variant" else "Variant" for c in columns]
    widths = [max(len(header[i]), *(len(r[i]) for r in rendered)) if rendered
              else len(header[i]) for i in range(len(columns))]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)),
             "  ".join("-" * w for w in widths)]
    for r in rendered:
        lines.append("  ".join(v.ljust(w) for v, w in zip(r, widths)))
    return "\n".join(lines)


def ablation_suite(cfg, out_dir=None):
    """Train + evaluate all four variants; returns {variant: report}.

    Writes per-variant run directories, an ablation_table.txt and an
    ablation_summary.json under `out_dir` (default: cfg.out_dir).
    """
    if not cfg.test_manifest:
        raise ConfigError("ablation requires cfg.test_manifest")
    out_dir = Path(out_dir or cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    reports, rows = {}, []
    for variant in VARIANTS:
        run_cfg = cfg.replace(
            out_dir=str(out_dir / variant),
            model=dataclasses.replace(cfg.model, ablation_variant=variant))
        result = train(run_cfg)
        report = evaluate_model(result.final_checkpoint, cfg.test_manifest,
                                out_dir / variant / "eval")
        reports[variant] = report
        n_params = parameter_count(build_model(
            run_cfg.model, seed=stable_seed(cfg.seed, "init")))
        row = {"variant": VARIANT_LABELS[variant], "params": n_params}
        row.update({k: report.means[k] for k in
                    ("sad", "mse", "gradient", "connectivity")})
        rows.append(row)
    table = format_metrics_table(rows)
    (out_dir / "ablation_table.txt").write_text(table + "\n")
    (out_dir / "ablation_summary.json").write_text(
        json.dumps(rows, indent=2, sort_keys=True) + "\n")
    return reports, rows
