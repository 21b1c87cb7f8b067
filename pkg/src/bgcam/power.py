"""Sensor power and energy model.

Total per-pixel power splits into a scan term that doubles with every
quantization bit and a delivery term proportional to the fraction of
active pixels:

    total = 2^N * scan_per_pixel + active_fraction * deliver_per_pixel

Powers are in microwatts per pixel; per-frame energies are reported in
picojoules per pixel at the configured frame rate.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .errors import ContractError
from .frames import SensorConfig

PJ_PER_UJ = 1.0e6


@dataclass(frozen=True)
class PowerConstants:
    """Per-pixel power figures for the modeled sensor.

    Defaults: scanning costs 0.0024 uW/pixel, delivering an active
    pixel's address costs 0.0195 uW/pixel, and a modern conventional
    sensor reads at roughly 300 pJ/pixel for comparison.
    """

    scan_power_per_pixel: float = 0.0024
    deliver_power_per_pixel: float = 0.0195
    reference_comparison_energy: float = 300.0

    def __post_init__(self):
        for name in (
            "scan_power_per_pixel",
            "deliver_power_per_pixel",
            "reference_comparison_energy",
        ):
            if getattr(self, name) <= 0:
                raise ContractError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class PowerReport:
    bits: int
    active_fraction: float
    scan_power: float
    deliver_power: float
    total_power: float
    total_power_sensor: float
    energy_per_pixel_per_frame: float


def uw_per_frame_to_pj(power_uw: float, frame_rate: float) -> float:
    """Convert a uW/pixel power draw into pJ/pixel/frame at a frame rate."""
    return power_uw / frame_rate * PJ_PER_UJ


def estimate_power(
    constants: PowerConstants,
    bits: int,
    active_fraction: float,
    config: SensorConfig,
) -> PowerReport:
    """Evaluate the power model for a bit depth and measured activity."""
    if not (1 <= bits <= 8):
        raise ContractError(f"bits must be in [1, 8], got {bits}")
    if not (0.0 <= active_fraction <= 1.0):
        raise ContractError(f"active_fraction must be in [0, 1], got {active_fraction}")
    scan = (1 << bits) * constants.scan_power_per_pixel
    deliver = active_fraction * constants.deliver_power_per_pixel
    total = scan + deliver
    pixel_count = config.width * config.height
    return PowerReport(
        bits=bits,
        active_fraction=active_fraction,
        scan_power=scan,
        deliver_power=deliver,
        total_power=total,
        total_power_sensor=total * pixel_count,
        energy_per_pixel_per_frame=uw_per_frame_to_pj(total, config.frame_rate),
    )


def power_ratio(report_a: PowerReport, report_b: PowerReport) -> float:
    """total_power(a) / total_power(b)."""
    if report_b.total_power == 0:
        raise ContractError("denominator report has zero total power")
    return report_a.total_power / report_b.total_power


CSV_COLUMNS = ("bits", "active_fraction", "scan_uW", "deliver_uW", "total_uW", "energy_pJ")


def reports_to_csv(reports: list[PowerReport]) -> str:
    """Serialize reports as CSV with a header row."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in reports:
        writer.writerow(
            [
                r.bits,
                repr(r.active_fraction),
                repr(r.scan_power),
                repr(r.deliver_power),
                repr(r.total_power),
                repr(r.energy_per_pixel_per_frame),
            ]
        )
    return buf.getvalue()
