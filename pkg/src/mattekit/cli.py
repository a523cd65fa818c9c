"""Command-line entry point.

Subcommands: synth, train, eval, ablate, predict, report. Exit codes are a
stable scripting contract: 0 success, 2 input/config error, 3 runtime or
model error. Relative output paths resolve under $MATTEKIT_OUTPUT_ROOT when
that variable is set.
"""

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .compositing import synthesize_from_dirs
from .errors import (AssetError, CheckpointError, ConfigError, MatteKitError,
                     RangeError, ShapeMismatchError, TrainingDiverged)
from .imageio import load_image, save_alpha, save_image
from .metrics import METRIC_NAMES, MetricsReport
from .model import load_checkpoint, predict_alpha
from .training import (ablation_suite, evaluate_model, format_metrics_table,
                       load_config, train)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_RUNTIME = 3

_INPUT_ERRORS = (ConfigError, AssetError, ShapeMismatchError, RangeError,
                 FileNotFoundError)
_RUNTIME_ERRORS = (CheckpointError, TrainingDiverged)


def _out_path(path):
    root = os.environ.get("MATTEKIT_OUTPUT_ROOT")
    path = Path(path)
    if root and not path.is_absolute():
        return Path(root) / path
    return path


def _parse_overrides(pairs):
    overrides = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise ConfigError(f"override must be key=value, got {pair!r}")
        key, value = pair.split("=", 1)
        overrides[key.strip()] = value.strip()
    return overrides


def run_synth(args):
    out_dir = _out_path(args.out)
    report = synthesize_from_dirs(args.fg, args.alpha, args.bg,
                                  per_fg=args.per_fg, seed=args.seed,
                                  out_dir=out_dir, split=args.split)
    print(f"manifest: {report.manifest_path}")
    print(f"records: {len(report.records)}")
    if report.errors:
        print(f"failed records: {len(report.errors)} "
              f"(see {out_dir / 'synthesis_errors.json'})", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def run_train(args):
    cfg = load_config(args.config, _parse_overrides(args.set))
    if args.out:
        cfg = cfg.replace(out_dir=str(_out_path(args.out)))
    result = train(cfg)
    print(f"final checkpoint: {result.final_checkpoint}")
    print(f"training log: {result.log_path}")
    if result.best_checkpoint:
        print(f"best checkpoint: {result.best_checkpoint}")
    return EXIT_OK


def run_eval(args):
    out_dir = _out_path(args.out)
    report = evaluate_model(args.checkpoint, args.manifest, out_dir,
                            allow_missing=args.allow_missing)
    print(format_metrics_table(
        [dict({"variant": Path(args.checkpoint).stem}, **report.means)]))
    print(f"report: {out_dir / 'metrics.json'}")
    return EXIT_OK


def run_ablate(args):
    cfg = load_config(args.config, _parse_overrides(args.set))
    out_dir = _out_path(args.out) if args.out else Path(cfg.out_dir)
    _, rows = ablation_suite(cfg, out_dir)
    print(format_metrics_table(rows))
    print(f"table: {out_dir / 'ablation_table.txt'}")
    print(f"summary: {out_dir / 'ablation_summary.json'}")
    return EXIT_OK


def run_predict(args):
    model, _, _ = load_checkpoint(args.checkpoint)
    if args.expect_variant and \
            model.config.ablation_variant != args.expect_variant:
        raise CheckpointError(
            f"checkpoint variant {model.config.ablation_variant!r} does not "
            f"match expected variant {args.expect_variant!r}")
    image = load_image(args.image)
    alpha = predict_alpha(model, image)
    out = _out_path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_alpha(out, alpha)
    print(f"alpha: {out}")
    if args.preview:
        preview = np.concatenate(
            [image, np.repeat(alpha[:, :, None], 3, axis=2),
             alpha[:, :, None] * image], axis=1)
        preview_path = _out_path(args.preview)
        save_image(preview_path, preview)
        print(f"preview: {preview_path}")
    return EXIT_OK


def _report_label(path):
    path = Path(path)
    if path.stem != "metrics":
        return path.stem
    for part in reversed(path.parent.parts):
        if part not in ("eval", "predictions", "metrics"):
            return part
    return path.stem


def run_report(args):
    reports = []
    for path in args.reports:
        report = MetricsReport.load(path)
        reports.append((_report_label(path), report))
    reference = reports[0][1].header
    for label, report in reports[1:]:
        differing = sorted(k for k in set(reference) | set(report.header)
                           if reference.get(k) != report.header.get(k))
        if differing:
            raise ConfigError(
                f"report {label!r} disagrees with {reports[0][0]!r} on "
                f"header keys: {', '.join(differing)}")
    rows = [dict({"variant": label}, **{k: rep.means[k] for k in METRIC_NAMES})
            for label, rep in reports]
    table = format_metrics_table(rows)
    print(table)
    if args.out:
        out_dir = _out_path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "report_table.txt").write_text(table + "\n")
        print(f"table: {out_dir / 'report_table.txt'}")
        if args.plot:
            plot_paths = _plot_report(rows, out_dir)
            for p in plot_paths:
                print(f"plot: {p}")
    return EXIT_OK


def _plot_report(rows, out_dir):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    paths = []
    labels = [row["variant"] for row in rows]
    for key in METRIC_NAMES:
        fig, ax = plt.subplots(figsize=(6, 3.5))
        ax.bar(range(len(rows)), [row[key] for row in rows], color="#4878a8")
        ax.set_xticks(range(len(rows)))
        ax.set_xticklabels(labels, rotation=20, ha="right", fontsize=8)
        ax.set_ylabel(key.upper())
        fig.tight_layout()
        path = out_dir / f"report_{key}.png"
        fig.savefig(path, dpi=110)
        plt.close(fig)
        paths.append(path)
    return paths


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mattekit",
        description="Trimap-free matting: dataset synthesis, training, "
                    "evaluation, ablation, prediction, reporting.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="composite a dataset split from asset dirs")
    p.add_argument("--fg", required=True, help="foreground RGB directory")
    p.add_argument("--alpha", required=True, help="alpha matte directory")
    p.add_argument("--bg", required=True, help="background directory")
    p.add_argument("--per-fg", type=int, required=True,
                   help="composites per foreground")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--split", default="train", choices=("train", "test"))
    p.add_argument("--out", required=True)
    p.set_defaults(func=run_synth)

    p = sub.add_parser("train", help="train a model from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a config key")
    p.add_argument("--out", help="override the output directory")
    p.set_defaults(func=run_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on a manifest")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--allow-missing", action="store_true",
                   help="report missing predictions instead of failing")
    p.set_defaults(func=run_eval)

    p = sub.add_parser("ablate", help="train + evaluate all four variants")
    p.add_argument("--config", required=True)
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--out")
    p.set_defaults(func=run_ablate)

    p = sub.add_parser("predict", help="predict an alpha matte for one image")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--image", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--preview", help="also write a side-by-side preview PNG")
    p.add_argument("--expect-variant",
                   help="fail unless the checkpoint has this ablation variant")
    p.set_defaults(func=run_predict)

    p = sub.add_parser("report", help="render metric reports as a table/plots")
    p.add_argument("reports", nargs="+", help="metrics.json files")
    p.add_argument("--out", help="directory for the rendered table/plots")
    p.add_argument("--plot", action="store_true", help="write PNG bar charts")
    p.set_defaults(func=run_report)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _RUNTIME_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except MatteKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
