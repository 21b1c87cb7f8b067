"""Command-line interface.

Subcommands: convert, encode, decode, stats, power, sweep, calibrate.
Machine-readable results go to files (or stdout with --output -); a
short human summary goes to stdout. The BGCAM_CONFIG environment
variable names a default key=value config file; flags override it.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import aer, analysis, pipeline, power
from .errors import BgcamError
from .frames import Modality, SensorConfig
from .ingest import ingest_images
from .pipeline import RunConfig, config_from_text
from .sensor import convert_all

ENV_CONFIG = "BGCAM_CONFIG"

EXIT_OK = 0
EXIT_DATA_ERROR = 1
EXIT_USAGE = 2


def _base_config(args: argparse.Namespace) -> SensorConfig:
    """Config from BGCAM_CONFIG / --config file, overridden by flags."""
    config = SensorConfig()
    path = getattr(args, "config", None) or os.environ.get(ENV_CONFIG)
    if path:
        config = config_from_text(Path(path).read_text())
    overrides = {}
    if getattr(args, "threshold", None) is not None:
        overrides["threshold"] = args.threshold
    if getattr(args, "bits", None) is not None:
        overrides["bits"] = args.bits
    if getattr(args, "modality", None) is not None:
        overrides["modality"] = Modality(args.modality)
    if getattr(args, "frame_rate", None) is not None:
        overrides["frame_rate"] = args.frame_rate
    return replace(config, **overrides) if overrides else config


def _add_sensor_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value config file (flags win)")
    parser.add_argument("--threshold", type=float, help="contrast threshold T in [0,1)")
    parser.add_argument("--bits", type=int, help="quantization bit count N (1..8)")
    parser.add_argument("--modality", choices=["spatial", "temporal"])
    parser.add_argument("--frame-rate", type=float, dest="frame_rate")


def _write_output(text: str, output: str | None) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def cmd_convert(args: argparse.Namespace) -> int:
    run = RunConfig(
        input_dir=Path(args.input),
        output_dir=Path(args.output),
        sensor=_base_config(args),
        recursive=args.recursive,
        target_fraction=args.target_fraction,
        workers=args.workers,
    )
    result = pipeline.convert_dataset(run)
    n = len(result.manifest.entries)
    print(f"converted {n} frames -> {args.output}")
    if result.calibration is not None:
        c = result.calibration
        status = "converged" if c.converged else "FAILED TO CONVERGE"
        print(
            f"calibration {status}: T={c.threshold:.6f} "
            f"activity={c.achieved_fraction:.4f} ({c.iterations} iterations)"
        )
    if result.skipped:
        print(f"skipped {len(result.skipped)} unreadable files", file=sys.stderr)
        return EXIT_DATA_ERROR
    return EXIT_OK


def cmd_encode(args: argparse.Namespace) -> int:
    config = _base_config(args)
    ingested = ingest_images(Path(args.input), recursive=args.recursive)
    gradients = convert_all(ingested.frames, config)
    stream = aer.encode_stream(gradients, config)
    aer.write_stream(stream, args.output)
    print(f"encoded {len(stream.frames)} frames -> {args.output}")
    return EXIT_OK


def cmd_decode(args: argparse.Namespace) -> int:
    stream = aer.read_stream(args.input)
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    for frame in aer.decode_stream(stream):
        name = f"{frame.timestamp_index:06d}.png"
        pipeline.gradient_to_image(frame).save(out_dir / name, format="PNG")
    print(f"decoded {len(stream.frames)} frames -> {out_dir}")
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    stream = aer.read_stream(args.input)
    stats = aer.bandwidth_stats(stream)
    frames = aer.decode_stream(stream)
    _write_output(analysis.per_frame_stats_csv(frames), args.output)
    print(
        f"frames={len(frames)} mean_active_fraction={stats.mean_active_fraction:.4f} "
        f"wire_bytes={stats.wire_bytes} dense_bytes={stats.dense_bytes} "
        f"compression={stats.compression_ratio:.2f}x"
    )
    return EXIT_OK


def cmd_power(args: argparse.Namespace) -> int:
    config = _base_config(args)
    constants = power.PowerConstants()
    bits = args.bits if args.bits is not None else config.bits
    report = power.estimate_power(constants, bits, args.active_fraction, config)
    _write_output(power.reports_to_csv([report]), args.output)
    print(
        f"bits={report.bits} alpha={report.active_fraction} "
        f"total={report.total_power:.6g} uW/pixel "
        f"energy={report.energy_per_pixel_per_frame:.6g} pJ/pixel/frame"
    )
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    config = _base_config(args)
    accuracy = None
    if args.accuracy_csv:
        accuracy = analysis.parse_accuracy_csv(Path(args.accuracy_csv).read_text())
    rows = analysis.default_sweep(args.alpha, config=config, accuracy_table=accuracy)
    _write_output(analysis.sweep_to_csv(rows), args.output)
    print(f"sweep over bits 1..8 at alpha={args.alpha}: "
          f"relative power N=8 is {rows[-1].relative_power:.1f}x N=1")
    return EXIT_OK


def cmd_calibrate(args: argparse.Namespace) -> int:
    ingested = ingest_images(Path(args.input), recursive=args.recursive)
    result = analysis.calibrate_threshold(
        ingested.frames, args.target_fraction, args.tolerance
    )
    csv_text = (
        "threshold,achieved_fraction,iterations,converged\n"
        f"{result.threshold!r},{result.achieved_fraction!r},"
        f"{result.iterations},{int(result.converged)}\n"
    )
    _write_output(csv_text, args.output)
    status = "converged" if result.converged else "FAILED TO CONVERGE"
    print(
        f"calibration {status}: T={result.threshold:.6f} "
        f"activity={result.achieved_fraction:.4f} ({result.iterations} iterations)"
    )
    return EXIT_OK if result.converged else EXIT_DATA_ERROR


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bgcam",
        description="Binary gradient camera simulation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="convert an image directory to gradient data")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--recursive", action="store_true")
    p.add_argument("--target-fraction", type=float, dest="target_fraction",
                   help="auto-calibrate the threshold to this mean activity")
    p.add_argument("--workers", type=int, default=1)
    _add_sensor_flags(p)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("encode", help="convert images and write a .bgc event stream")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--recursive", action="store_true")
    _add_sensor_flags(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode a .bgc stream to dense images")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("stats", help="per-frame activity and bandwidth of a .bgc stream")
    p.add_argument("input")
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("power", help="evaluate the power model")
    p.add_argument("--active-fraction", type=float, default=0.1, dest="active_fraction")
    p.add_argument("--output", default="-")
    _add_sensor_flags(p)
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("sweep", help="bits 1..8 power sweep, optionally joined with accuracy")
    p.add_argument("--alpha", type=float, default=0.1, help="active fraction")
    p.add_argument("--accuracy-csv", dest="accuracy_csv")
    p.add_argument("--output", default="-")
    _add_sensor_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("calibrate", help="find the threshold hitting a target activity")
    p.add_argument("input")
    p.add_argument("--recursive", action="store_true")
    p.add_argument("--target-fraction", type=float, default=0.1, dest="target_fraction")
    p.add_argument("--tolerance", type=float, default=0.01)
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_calibrate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BgcamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
