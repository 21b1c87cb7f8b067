"""Pixel-level sensor math.

A pixel P is compared against its left (L) and top (T) neighbors. The
local contrast is the largest absolute intensity difference among the
three pairs (P,L), (P,T), (L,T); a pixel of the binary spatial gradient
is active iff that contrast strictly exceeds the capture threshold.
The temporal gradient marks pixels whose binary spatial gradient changed
between consecutive frames. The multibit mode quantizes the
above-threshold contrast into 2^N - 1 codes and reduces to the binary
gradient at N = 1.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ConfigError, ContractError
from .frames import GradientFrame, IntensityFrame, Modality, SensorConfig


def local_contrast(frame: IntensityFrame, row: int, col: int) -> float:
    """Max absolute pairwise difference over {P, L, T} at (row, col).

    Requires row >= 1 and col >= 1 so both neighbors exist.
    """
    if not (1 <= row < frame.height and 1 <= col < frame.width):
        raise IndexError(f"(row={row}, col={col}) has no complete neighborhood")
    px = frame.pixels
    p = px[row, col]
    left = px[row, col - 1]
    top = px[row - 1, col]
    return float(max(abs(p - left), abs(p - top), abs(left - top)))


def _contrast_map(pixels: np.ndarray) -> np.ndarray:
    """Neighborhood max-difference for every interior pixel.

    Returns an array shaped like the input; row 0 and column 0 are 0.
    """
    out = np.zeros_like(pixels)
    p = pixels[1:, 1:]
    left = pixels[1:, :-1]
    top = pixels[:-1, 1:]
    d = np.abs(p - left)
    np.maximum(d, np.abs(p - top), out=d)
    np.maximum(d, np.abs(left - top), out=d)
    out[1:, 1:] = d
    return out


def _check_config(frame: IntensityFrame, config: SensorConfig) -> None:
    if not config.matches(frame):
        raise ConfigError(
            f"config geometry {config.width}x{config.height} does not match "
            f"frame {frame.width}x{frame.height}"
        )


def spatial_gradient(frame: IntensityFrame, config: SensorConfig) -> GradientFrame:
    """Binary spatial gradient: 1 where local contrast strictly exceeds T."""
    _check_config(frame, config)
    if config.bits != 1:
        raise ConfigError("spatial_gradient is binary; use multibit_gradient for bits > 1")
    active = _contrast_map(frame.pixels) > config.threshold
    return GradientFrame(
        values=active.astype(np.uint8),
        bits=1,
        modality=Modality.SPATIAL,
        threshold=config.threshold,
        timestamp_index=frame.timestamp_index,
    )


def multibit_gradient(frame: IntensityFrame, config: SensorConfig) -> GradientFrame:
    """N-bit gradient: above-threshold contrast quantized into 2^N - 1 codes.

    code = clamp(ceil((contrast - T) / (1 - T) * (2^N - 1)), 1, 2^N - 1)
    for contrast > T, else 0. Identical to spatial_gradient when N = 1.
    """
    _check_config(frame, config)
    n_codes = (1 << config.bits) - 1
    t = config.threshold
    contrast = _contrast_map(frame.pixels)
    active = contrast > t
    scaled = np.ceil((contrast - t) / (1.0 - t) * n_codes)
    codes = np.clip(scaled, 1, n_codes)
    values = np.where(active, codes, 0).astype(np.uint8)
    return GradientFrame(
        values=values,
        bits=config.bits,
        modality=Modality.SPATIAL,
        threshold=t,
        timestamp_index=frame.timestamp_index,
    )


def temporal_gradient(current: GradientFrame, previous: GradientFrame) -> GradientFrame:
    """Per-pixel change mask between two consecutive binary spatial gradients.

    For binary inputs |a - b| is the exclusive-or of the two frames.
    """
    for f, name in ((current, "current"), (previous, "previous")):
        if f.modality is not Modality.SPATIAL:
            raise ContractError(f"{name} frame must be a spatial gradient")
        if not f.is_binary:
            raise ContractError(f"{name} frame must be binary")
    if current.values.shape != previous.values.shape:
        raise ContractError(
            f"shape mismatch: {current.values.shape} vs {previous.values.shape}"
        )
    return GradientFrame(
        values=np.bitwise_xor(current.values, previous.values),
        bits=1,
        modality=Modality.TEMPORAL,
        threshold=current.threshold,
        timestamp_index=current.timestamp_index,
    )


def convert_stream(
    frames: Iterable[IntensityFrame], config: SensorConfig
) -> Iterator[GradientFrame]:
    """Run the configured gradient mode over an ordered frame sequence.

    Spatial modality maps each frame independently. Temporal modality
    differences consecutive spatial gradients; the implicit predecessor
    of the first frame is all zeros, so the first output equals the
    first spatial gradient.
    """
    shape = None
    prev_spatial = None
    prev_ts = None
    count = 0
    for frame in frames:
        count += 1
        if shape is None:
            shape = frame.pixels.shape
        elif frame.pixels.shape != shape:
            raise ContractError(
                f"inconsistent frame dimensions: {frame.pixels.shape} vs {shape}"
            )
        if prev_ts is not None and frame.timestamp_index <= prev_ts:
            raise ContractError("timestamp_index must be strictly increasing")
        prev_ts = frame.timestamp_index
        if config.modality is Modality.SPATIAL:
            yield multibit_gradient(frame, config)
            continue
        spatial = spatial_gradient(frame, config)
        if prev_spatial is None:
            zero = GradientFrame(
                values=np.zeros(shape, dtype=np.uint8),
                bits=1,
                modality=Modality.SPATIAL,
                threshold=config.threshold,
                timestamp_index=frame.timestamp_index,
            )
            yield temporal_gradient(spatial, zero)
        else:
            yield temporal_gradient(spatial, prev_spatial)
        prev_spatial = spatial
    if count == 0:
        raise ContractError("convert_stream requires at least one frame")


def convert_all(
    frames: Sequence[IntensityFrame], config: SensorConfig
) -> list[GradientFrame]:
    """Eager convenience wrapper around convert_stream."""
    return list(convert_stream(frames, config))
