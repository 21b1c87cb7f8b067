"""Core frame types: intensity input, sensor configuration, gradient output.

Frames wrap 2-D numpy arrays in row-major order. Intensity values are
normalized luminance in [0, 1]; gradient values are integer codes in
[0, 2^bits - 1].
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError


class Modality(enum.Enum):
    SPATIAL = "spatial"
    TEMPORAL = "temporal"


@dataclass(frozen=True)
class IntensityFrame:
    """A grayscale frame with pixel values normalized to [0, 1]."""

    pixels: np.ndarray
    timestamp_index: int = 0

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        object.__setattr__(self, "pixels", px)
        if px.ndim != 2:
            raise ContractError(f"pixels must be 2-D, got shape {px.shape}")
        if px.shape[0] < 2 or px.shape[1] < 2:
            raise ContractError(
                f"frame must be at least 2x2 (neighborhood needs left and top), got {px.shape}"
            )
        if not np.all((px >= 0.0) & (px <= 1.0)):
            raise ContractError("pixel values must lie in [0, 1]")
        if self.timestamp_index < 0:
            raise ContractError("timestamp_index must be nonnegative")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True)
class SensorConfig:
    """Capture-time sensor parameters."""

    threshold: float = 0.05
    bits: int = 1
    modality: Modality = Modality.SPATIAL
    width: int = 0
    height: int = 0
    frame_rate: float = 30.0

    def __post_init__(self):
        if not (0.0 <= self.threshold < 1.0):
            raise ContractError(f"threshold must be in [0, 1), got {self.threshold}")
        if not (1 <= self.bits <= 8):
            raise ContractError(f"bits must be in [1, 8], got {self.bits}")
        if self.frame_rate <= 0:
            raise ContractError(f"frame_rate must be positive, got {self.frame_rate}")
        if self.modality is Modality.TEMPORAL and self.bits != 1:
            raise ContractError("temporal modality is binary; bits must be 1")

    def matches(self, frame: IntensityFrame) -> bool:
        if self.width == 0 and self.height == 0:
            return True
        return (self.width, self.height) == (frame.width, frame.height)


@dataclass(frozen=True)
class GradientFrame:
    """Simulated sensor output: per-pixel quantized gradient codes."""

    values: np.ndarray
    bits: int
    modality: Modality
    threshold: float
    timestamp_index: int = 0

    def __post_init__(self):
        vals = np.asarray(self.values)
        if not np.issubdtype(vals.dtype, np.integer):
            vals = vals.astype(np.uint8)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 2:
            raise ContractError(f"values must be 2-D, got shape {vals.shape}")
        if not (1 <= self.bits <= 8):
            raise ContractError(f"bits must be in [1, 8], got {self.bits}")
        top = (1 << self.bits) - 1
        if vals.size and (vals.min() < 0 or vals.max() > top):
            raise ContractError(f"values must lie in [0, {top}] for bits={self.bits}")
        if self.modality is Modality.TEMPORAL and self.bits != 1:
            raise ContractError("temporal frames are binary")

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def is_binary(self) -> bool:
        return self.bits == 1
