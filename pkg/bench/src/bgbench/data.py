"""Reading converted datasets through the pipeline's file interfaces.

The harness never links against the simulator: it consumes the manifest
(tab-separated: source, output, label, index), the dense gradient PNGs
written next to it, and the flat key=value config snapshot.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from PIL import Image

from .specs import SpecError, TASK_GEOMETRY

LUMA = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True)
class ManifestEntry:
    source_path: Path
    output_path: Path
    label: Optional[str]
    timestamp_index: int


@dataclass(frozen=True)
class ConvertedDataset:
    root: Path
    entries: tuple[ManifestEntry, ...]
    bits: int
    threshold: float
    modality: str

    @property
    def labels(self) -> list[str]:
        return sorted({e.label for e in self.entries if e.label is not None})


def read_config(path: Path) -> dict[str, str]:
    kv = {}
    for line in path.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        kv[key.strip()] = value.strip()
    return kv


def load_dataset(manifest_path: Path) -> ConvertedDataset:
    manifest_path = Path(manifest_path)
    if not manifest_path.is_file():
        raise SpecError(f"manifest not found: {manifest_path}")
    root = manifest_path.parent
    entries = []
    for lineno, line in enumerate(manifest_path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise SpecError(f"malformed manifest line {lineno}: {line!r}")
        source, output, label, index = parts
        entries.append(
            ManifestEntry(
                source_path=Path(source),
                output_path=root / output,
                label=None if label == "-" else label,
                timestamp_index=int(index),
            )
        )
    if not entries:
        raise SpecError(f"empty manifest: {manifest_path}")
    cfg = read_config(root / "config.txt")
    return ConvertedDataset(
        root=root,
        entries=tuple(entries),
        bits=int(cfg.get("bits", 1)),
        threshold=float(cfg.get("threshold", 0.05)),
        modality=cfg.get("modality", "spatial"),
    )


def load_gray01(path: Path) -> np.ndarray:
    """Decode any image as luminance in [0, 1]."""
    with Image.open(path) as img:
        if img.mode in ("RGB", "RGBA", "P"):
            arr = np.asarray(img.convert("RGB"), dtype=np.float64) / 255.0
            return arr @ LUMA
        arr = np.asarray(img.convert("L"), dtype=np.float64) / 255.0
        return arr


def load_rgb01(path: Path) -> np.ndarray:
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"), dtype=np.float64) / 255.0


def check_geometry(task: str, image: np.ndarray) -> None:
    expected = TASK_GEOMETRY.get(task)
    if expected is not None and image.shape[:2] != expected:
        raise SpecError(
            f"task {task} expects {expected} images, manifest provides {image.shape[:2]}"
        )


def load_arrays(dataset: ConvertedDataset, modality: str, task: str):
    """(images, labels, label_names) for a classification modality.

    intensity  -> RGB source images (3 channels)
    grayscale  -> luminance of the source images (1 channel)
    gradient   -> the converted dense outputs (1 channel)
    """
    label_names = dataset.labels
    if not label_names:
        raise SpecError("classification requires labeled manifest entries")
    index = {name: i for i, name in enumerate(label_names)}
    images, labels = [], []
    for e in dataset.entries:
        if e.label is None:
            continue
        if modality == "intensity":
            img = load_rgb01(e.source_path)
        elif modality == "grayscale":
            img = load_gray01(e.source_path)[..., None]
        elif modality in ("binary_gradient", "multibit_gradient"):
            img = load_gray01(e.output_path)[..., None]
        else:
            raise SpecError(f"unknown modality {modality!r}")
        check_geometry(task, img)
        images.append(img.astype(np.float32))
        labels.append(index[e.label])
    return np.stack(images), np.array(labels, dtype=np.int64), label_names


def load_pairs(dataset: ConvertedDataset):
    """(gradient, intensity, label) triples for reconstruction training."""
    grads, targets, labels = [], [], []
    for e in dataset.entries:
        g = load_gray01(e.output_path).astype(np.float32)
        t = load_gray01(e.source_path).astype(np.float32)
        if g.shape != t.shape:
            raise SpecError(
                f"unpaired data: gradient {g.shape} vs intensity {t.shape} "
                f"for {e.output_path.name}"
            )
        grads.append(g[None])
        targets.append(t[None])
        labels.append(e.label)
    return np.stack(grads), np.stack(targets), labels
