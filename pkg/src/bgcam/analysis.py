"""Quantitative characterization of converted data.

Covers active-pixel statistics, bisection calibration of the capture
threshold to a target activity level, measurement of the edge fattening
introduced by the max-pair neighborhood rule relative to thresholded
finite-difference gradient magnitude, and the bits-vs-power sweep table.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ContractError, UndefinedRatioError
from .frames import GradientFrame, IntensityFrame, Modality, SensorConfig
from .power import PowerConstants, PowerReport, estimate_power
from .sensor import _contrast_map

MAX_CALIBRATION_ITERATIONS = 64


def active_fraction(frame: GradientFrame) -> float:
    """Fraction of pixels with a nonzero gradient code."""
    return float(np.count_nonzero(frame.values)) / frame.values.size


@dataclass(frozen=True)
class CalibrationResult:
    threshold: float
    achieved_fraction: float
    iterations: int
    converged: bool
    target_fraction: float
    tolerance: float

    def __post_init__(self):
        if not (0.0 <= self.threshold < 1.0):
            raise ContractError("calibrated threshold must lie in [0, 1)")


def _mean_fraction(contrasts: list[tuple[np.ndarray, int]], threshold: float) -> float:
    # Interior contrast maps; activity over the full frame incl. zero border.
    total = 0.0
    for c, size in contrasts:
        total += np.count_nonzero(c > threshold) / size
    return total / len(contrasts)


def calibrate_threshold(
    frames: Sequence[IntensityFrame],
    target_fraction: float,
    tolerance: float = 0.01,
) -> CalibrationResult:
    """Bisection search for the threshold hitting a target mean activity.

    Mean active fraction is nonincreasing in the threshold, so plain
    bisection over [0, 1) converges; a target above the fraction reached
    at T = 0 is unreachable and reported as a non-converged result.
    """
    if not frames:
        raise ContractError("calibration requires a nonempty sample")
    if not (0.0 < target_fraction < 1.0):
        raise ContractError("target_fraction must lie in (0, 1)")
    contrasts = [(_contrast_map(f.pixels), f.pixels.size) for f in frames]

    lo, hi = 0.0, 1.0
    best_t = 0.0
    best_fraction = _mean_fraction(contrasts, 0.0)
    best_err = abs(best_fraction - target_fraction)
    iterations = 0
    if best_fraction + tolerance < target_fraction:
        # Even the most permissive threshold cannot activate enough pixels.
        return CalibrationResult(
            threshold=0.0,
            achieved_fraction=best_fraction,
            iterations=0,
            converged=False,
            target_fraction=target_fraction,
            tolerance=tolerance,
        )
    for iterations in range(1, MAX_CALIBRATION_ITERATIONS + 1):
        mid = (lo + hi) / 2.0
        frac = _mean_fraction(contrasts, mid)
        err = abs(frac - target_fraction)
        if err < best_err:
            best_t, best_fraction, best_err = mid, frac, err
        if err <= tolerance:
            break
        if frac > target_fraction:
            lo = mid
        else:
            hi = mid
    return CalibrationResult(
        threshold=best_t,
        achieved_fraction=best_fraction,
        iterations=iterations,
        converged=best_err <= tolerance,
        target_fraction=target_fraction,
        tolerance=tolerance,
    )


def edge_fattening_ratio(frame: IntensityFrame, threshold: float) -> float:
    """Active-pixel count of the max-pair rule over the count under an
    L2 finite-difference gradient magnitude at the same threshold.

    Both counts are taken over interior pixels (those with both a left
    and a top neighbor).
    """
    px = frame.pixels
    numerator = int(np.count_nonzero(_contrast_map(px)[1:, 1:] > threshold))
    d_left = px[1:, 1:] - px[1:, :-1]
    d_top = px[1:, 1:] - px[:-1, 1:]
    magnitude = np.sqrt(d_left**2 + d_top**2)
    denominator = int(np.count_nonzero(magnitude > threshold))
    if denominator == 0:
        raise UndefinedRatioError("no finite-difference edges above threshold")
    return numerator / denominator


@dataclass(frozen=True)
class SweepRow:
    bits: int
    total_power: float
    relative_power: float
    accuracy: Optional[float] = None


def parse_accuracy_csv(text: str) -> dict[int, float]:
    """Read a (bits, accuracy) table from harness CSV output.

    Accepts any CSV with 'bits' and a 'test_accuracy' or 'accuracy'
    column; raises on malformed rows, naming the offender.
    """
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or "bits" not in reader.fieldnames:
        raise ContractError("accuracy table must have a 'bits' column")
    acc_col = None
    for candidate in ("test_accuracy", "accuracy"):
        if candidate in reader.fieldnames:
            acc_col = candidate
            break
    if acc_col is None:
        raise ContractError("accuracy table must have a 'test_accuracy' or 'accuracy' column")
    table: dict[int, float] = {}
    for lineno, row in enumerate(reader, start=2):
        try:
            bits = int(row["bits"])
            acc = float(row[acc_col])
        except (TypeError, ValueError) as exc:
            raise ContractError(f"malformed accuracy row {lineno}: {row}") from exc
        if not (0.0 <= acc <= 1.0):
            raise ContractError(f"accuracy out of [0, 1] at row {lineno}: {acc}")
        table[bits] = acc
    return table


def build_sweep(
    power_reports: Sequence[PowerReport],
    accuracy_table: Optional[dict[int, float]] = None,
) -> list[SweepRow]:
    """Join per-bit power reports with optional accuracy into a sweep table."""
    if not power_reports:
        raise ContractError("sweep requires at least one power report")
    fractions = {r.active_fraction for r in power_reports}
    if len(fractions) != 1:
        raise ContractError("sweep reports must share an active fraction")
    ordered = sorted(power_reports, key=lambda r: r.bits)
    base = ordered[0].total_power
    rows = []
    for r in ordered:
        acc = accuracy_table.get(r.bits) if accuracy_table else None
        rows.append(
            SweepRow(
                bits=r.bits,
                total_power=r.total_power,
                relative_power=r.total_power / base,
                accuracy=acc,
            )
        )
    return rows


def default_sweep(
    active_fraction_value: float = 0.1,
    config: Optional[SensorConfig] = None,
    constants: Optional[PowerConstants] = None,
    accuracy_table: Optional[dict[int, float]] = None,
) -> list[SweepRow]:
    """Power sweep over bits 1..8 at a fixed activity level."""
    config = config or SensorConfig()
    constants = constants or PowerConstants()
    reports = [
        estimate_power(constants, bits, active_fraction_value, config)
        for bits in range(1, 9)
    ]
    return build_sweep(reports, accuracy_table)


def sweep_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("bits", "total_uW", "relative_power", "accuracy"))
    for r in rows:
        writer.writerow(
            [r.bits, repr(r.total_power), repr(r.relative_power),
             "" if r.accuracy is None else repr(r.accuracy)]
        )
    return buf.getvalue()


def per_frame_stats_csv(frames: Sequence[GradientFrame]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("frame_index", "active_fraction"))
    for f in frames:
        writer.writerow([f.timestamp_index, repr(active_fraction(f))])
    return buf.getvalue()
