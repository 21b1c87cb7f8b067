"""Image ingestion: decode, normalize, and order input images.

Color images are reduced to luminance (0.299 R + 0.587 G + 0.114 B) and
all sources are normalized to [0, 1] by their max code value, so the
capture threshold is independent of source bit depth.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from PIL import Image

from .errors import ContractError
from .frames import IntensityFrame

log = logging.getLogger(__name__)

IMAGE_SUFFIXES = {".png", ".pgm", ".ppm", ".pbm", ".bmp", ".jpg", ".jpeg", ".tif", ".tiff"}

LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


def to_luminance(rgb: np.ndarray) -> np.ndarray:
    """Weighted RGB-to-gray reduction; passes 2-D input through."""
    if rgb.ndim == 2:
        return rgb
    if rgb.ndim == 3 and rgb.shape[2] >= 3:
        return rgb[..., :3] @ LUMA_WEIGHTS
    raise ContractError(f"unsupported image shape {rgb.shape}")


def normalize(pixels: np.ndarray) -> np.ndarray:
    """Scale integer pixel codes to [0, 1] by the dtype's max code."""
    if np.issubdtype(pixels.dtype, np.integer):
        max_code = float(np.iinfo(pixels.dtype).max)
        return pixels.astype(np.float64) / max_code
    return np.clip(pixels.astype(np.float64), 0.0, 1.0)


def load_image(path: Path, timestamp_index: int = 0) -> IntensityFrame:
    """Decode one image file into a normalized luminance frame."""
    with Image.open(path) as img:
        mode = img.mode
        if mode in ("RGB", "RGBA", "P"):
            arr = np.asarray(img.convert("RGB"))
        elif mode == "I;16":
            arr = np.asarray(img, dtype=np.uint16)
        elif mode == "I":
            arr = np.asarray(img, dtype=np.int32).astype(np.uint16)
        else:
            arr = np.asarray(img.convert("L"))
    gray = to_luminance(normalize(arr))
    return IntensityFrame(pixels=np.clip(gray, 0.0, 1.0), timestamp_index=timestamp_index)


@dataclass(frozen=True)
class IngestEntry:
    source_path: Path
    label: Optional[str]
    timestamp_index: int


@dataclass(frozen=True)
class IngestResult:
    frames: tuple[IntensityFrame, ...]
    entries: tuple[IngestEntry, ...]
    skipped: tuple[Path, ...]


def list_images(directory: Path, recursive: bool = False) -> list[Path]:
    """Image files under a directory in deterministic lexicographic order."""
    if not directory.is_dir():
        raise ContractError(f"not a directory: {directory}")
    candidates = directory.rglob("*") if recursive else directory.glob("*")
    paths = [p for p in candidates if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES]
    return sorted(paths, key=lambda p: str(p))


def ingest_images(directory: Path, recursive: bool = False) -> IngestResult:
    """Load every decodable image under a directory.

    Unreadable files are skipped with a warning and reported in the
    result; labels are taken from the immediate parent directory when
    ingesting recursively (class-per-subdirectory layout).
    """
    directory = Path(directory)
    paths = list_images(directory, recursive=recursive)
    if not paths:
        raise ContractError(f"no images found under {directory}")
    frames: list[IntensityFrame] = []
    entries: list[IngestEntry] = []
    skipped: list[Path] = []
    index = 0
    for path in paths:
        try:
            frame = load_image(path, timestamp_index=index)
        except (OSError, ValueError, ContractError) as exc:
            log.warning("skipping unreadable image %s: %s", path, exc)
            skipped.append(path)
            continue
        label = path.parent.name if recursive and path.parent != directory else None
        frames.append(frame)
        entries.append(IngestEntry(source_path=path, label=label, timestamp_index=index))
        index += 1
    if not frames:
        raise ContractError(f"no decodable images under {directory}")
    return IngestResult(frames=tuple(frames), entries=tuple(entries), skipped=tuple(skipped))
