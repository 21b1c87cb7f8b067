"""Experiment specifications, loaded from JSON files."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

TASKS = {"mnist", "cifar10", "reconstruct"}
MODALITIES = {"intensity", "grayscale", "binary_gradient", "multibit_gradient"}

TASK_GEOMETRY = {"mnist": (28, 28), "cifar10": (32, 32)}


class SpecError(ValueError):
    """An experiment spec is malformed or inconsistent with its data."""


@dataclass(frozen=True)
class ExperimentSpec:
    task: str
    input_modality: str
    manifest_path: Path
    epochs: int = 5
    seed: int = 0
    batch_size: int = 64
    learning_rate: float = 1e-3
    output_csv: Optional[Path] = None
    # reconstruct-only: labels (subjects) held out of training entirely
    holdout_labels: tuple[str, ...] = ()

    def __post_init__(self):
        if self.task not in TASKS:
            raise SpecError(f"unknown task {self.task!r}")
        if self.input_modality not in MODALITIES:
            raise SpecError(f"unknown input modality {self.input_modality!r}")
        if self.epochs < 1:
            raise SpecError("epochs must be >= 1")
        object.__setattr__(self, "manifest_path", Path(self.manifest_path))
        if self.output_csv is not None:
            object.__setattr__(self, "output_csv", Path(self.output_csv))
        object.__setattr__(self, "holdout_labels", tuple(self.holdout_labels))


def load_spec(path: Path) -> ExperimentSpec:
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON in {path}: {exc}") from exc
    known = {f for f in ExperimentSpec.__dataclass_fields__}
    unknown = set(raw) - known
    if unknown:
        raise SpecError(f"unknown spec fields: {sorted(unknown)}")
    try:
        return ExperimentSpec(**raw)
    except TypeError as exc:
        raise SpecError(str(exc)) from exc
