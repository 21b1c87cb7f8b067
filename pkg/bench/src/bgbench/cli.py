"""Command-line entry: run an experiment described by a JSON spec file."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .specs import ExperimentSpec, SpecError, load_spec
from .train import quantization_sweep, train_classifier, train_reconstructor


def cmd_classify(args) -> int:
    spec = load_spec(args.spec)
    row = train_classifier(spec)
    print(f"{row.task} {row.modality} bits={row.bits} test_accuracy={row.test_accuracy:.4f}")
    return 0


def cmd_reconstruct(args) -> int:
    spec = load_spec(args.spec)
    report = train_reconstructor(spec, grid_path=args.grid)
    print(
        f"holdout={','.join(report.holdout_labels)} "
        f"psnr={report.mean_psnr:.2f}dB baseline={report.baseline_psnr:.2f}dB "
        f"gain={report.gain_db:.2f}dB"
    )
    return 0


def cmd_sweep(args) -> int:
    raw = json.loads(Path(args.manifests).read_text())
    manifests = {int(k): Path(v) for k, v in raw.items()}
    rows, missing = quantization_sweep(
        task=args.task,
        manifests=manifests,
        output_csv=Path(args.output),
        epochs=args.epochs,
        seed=args.seed,
    )
    for row in rows:
        print(row.as_csv())
    if missing:
        print(f"missing converted datasets for bits: {missing}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bgbench",
                                     description="Learning benchmarks on converted gradient data")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="train a LeNet classifier from a spec file")
    p.add_argument("spec")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("reconstruct", help="train the skip autoencoder from a spec file")
    p.add_argument("spec")
    p.add_argument("--grid", help="write a sample reconstruction grid PNG here")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("sweep", help="accuracy sweep over per-bit converted datasets")
    p.add_argument("task", choices=["mnist", "cifar10"])
    p.add_argument("manifests", help="JSON file mapping bits -> manifest path")
    p.add_argument("output", help="accuracy CSV to write")
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
