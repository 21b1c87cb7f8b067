"""Dataset conversion: intensity corpora in, gradient corpora out.

A conversion run writes, under the output directory:
  - one dense PNG per input frame (binary frames as bilevel images,
    multibit frames scaled to the full 8-bit range),
  - a single .bgc event stream covering every frame,
  - a tab-separated manifest (source, output, label, index per line),
  - a flat key=value snapshot of the configuration used.

Runs are deterministic: identical inputs and config produce
byte-identical outputs.
"""

from __future__ import annotations

import logging
import shutil
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from PIL import Image

from . import aer
from .analysis import CalibrationResult, calibrate_threshold
from .errors import ContractError
from .frames import GradientFrame, IntensityFrame, Modality, SensorConfig
from .ingest import IngestResult, ingest_images
from .sensor import convert_all, multibit_gradient

log = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.tsv"
CONFIG_NAME = "config.txt"
STREAM_NAME = "frames.bgc"


@dataclass(frozen=True)
class ManifestEntry:
    source_path: str
    output_path: str
    label: Optional[str]
    timestamp_index: int


@dataclass(frozen=True)
class DatasetManifest:
    entries: tuple[ManifestEntry, ...]
    config_snapshot: SensorConfig

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        outputs = [e.output_path for e in self.entries]
        if len(set(outputs)) != len(outputs):
            raise ContractError("manifest output paths must be unique")


@dataclass(frozen=True)
class RunConfig:
    input_dir: Path
    output_dir: Path
    sensor: SensorConfig = field(default_factory=SensorConfig)
    recursive: bool = False
    target_fraction: Optional[float] = None
    calibration_tolerance: float = 0.01
    workers: int = 1

    def __post_init__(self):
        if self.workers < 1:
            raise ContractError("workers must be >= 1")


def config_to_text(config: SensorConfig) -> str:
    """Flat key=value snapshot, one key per line, fixed key order."""
    return (
        f"threshold={config.threshold!r}\n"
        f"bits={config.bits}\n"
        f"modality={config.modality.value}\n"
        f"width={config.width}\n"
        f"height={config.height}\n"
        f"frame_rate={config.frame_rate!r}\n"
    )


def config_from_text(text: str) -> SensorConfig:
    kv = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ContractError(f"malformed config line: {line!r}")
        key, value = line.split("=", 1)
        kv[key.strip()] = value.strip()
    try:
        return SensorConfig(
            threshold=float(kv.get("threshold", 0.05)),
            bits=int(kv.get("bits", 1)),
            modality=Modality(kv.get("modality", "spatial")),
            width=int(kv.get("width", 0)),
            height=int(kv.get("height", 0)),
            frame_rate=float(kv.get("frame_rate", 30.0)),
        )
    except ValueError as exc:
        raise ContractError(f"malformed config value: {exc}") from exc


def manifest_to_text(manifest: DatasetManifest) -> str:
    lines = []
    for e in manifest.entries:
        label = e.label if e.label is not None else "-"
        lines.append(f"{e.source_path}\t{e.output_path}\t{label}\t{e.timestamp_index}")
    return "\n".join(lines) + "\n"


def manifest_from_text(text: str, config: SensorConfig) -> DatasetManifest:
    entries = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise ContractError(f"malformed manifest line {lineno}: {line!r}")
        source, output, label, index = parts
        entries.append(
            ManifestEntry(
                source_path=source,
                output_path=output,
                label=None if label == "-" else label,
                timestamp_index=int(index),
            )
        )
    return DatasetManifest(entries=tuple(entries), config_snapshot=config)


def gradient_to_image(frame: GradientFrame) -> Image.Image:
    """Dense 8-bit rendering: codes scaled to the full [0, 255] range."""
    top = (1 << frame.bits) - 1
    scaled = (frame.values.astype(np.uint16) * 255 // top).astype(np.uint8)
    return Image.fromarray(scaled, mode="L")


def image_to_gradient(path: Path, config: SensorConfig, timestamp_index: int,
                      modality: Modality) -> GradientFrame:
    """Read back a dense gradient PNG written by gradient_to_image."""
    with Image.open(path) as img:
        scaled = np.asarray(img.convert("L"), dtype=np.uint16)
    top = (1 << config.bits) - 1
    # Inverse of the floor-scaling above; exact because codes are distinct.
    values = ((scaled * top + 254) // 255).astype(np.uint8)
    return GradientFrame(
        values=values,
        bits=config.bits,
        modality=modality,
        threshold=config.threshold,
        timestamp_index=timestamp_index,
    )


def _convert_frames(
    frames: Sequence[IntensityFrame], config: SensorConfig, workers: int
) -> list[GradientFrame]:
    if config.modality is Modality.SPATIAL and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda f: multibit_gradient(f, config), frames))
    return convert_all(frames, config)


@dataclass(frozen=True)
class ConversionResult:
    manifest: DatasetManifest
    calibration: Optional[CalibrationResult]
    gradient_frames: tuple[GradientFrame, ...]
    skipped: tuple[Path, ...]


def convert_dataset(run: RunConfig) -> ConversionResult:
    """Convert a directory of images, writing all artifacts atomically.

    On failure the partially-written output directory is removed.
    """
    ingested = ingest_images(run.input_dir, recursive=run.recursive)
    config = run.sensor
    calibration = None
    if run.target_fraction is not None:
        calibration = calibrate_threshold(
            ingested.frames, run.target_fraction, run.calibration_tolerance
        )
        config = replace(config, threshold=calibration.threshold)

    out_dir = Path(run.output_dir)
    created = not out_dir.exists()
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        gradients = _convert_frames(ingested.frames, config, run.workers)
        entries = []
        digits = max(6, len(str(len(gradients))))
        for entry, gframe in zip(ingested.entries, gradients):
            name = f"{gframe.timestamp_index:0{digits}d}.png"
            out_path = out_dir / name
            gradient_to_image(gframe).save(out_path, format="PNG")
            entries.append(
                ManifestEntry(
                    source_path=str(entry.source_path),
                    output_path=name,
                    label=entry.label,
                    timestamp_index=gframe.timestamp_index,
                )
            )
        stream = aer.encode_stream(gradients, config)
        aer.write_stream(stream, out_dir / STREAM_NAME)
        manifest = DatasetManifest(entries=tuple(entries), config_snapshot=config)
        (out_dir / MANIFEST_NAME).write_text(manifest_to_text(manifest))
        (out_dir / CONFIG_NAME).write_text(config_to_text(config))
    except Exception:
        if created:
            shutil.rmtree(out_dir, ignore_errors=True)
        raise
    return ConversionResult(
        manifest=manifest,
        calibration=calibration,
        gradient_frames=tuple(gradients),
        skipped=ingested.skipped,
    )
