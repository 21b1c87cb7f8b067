"""Desk-scale learning benchmarks over converted binary-gradient datasets."""

from .models import LeNet, SkipAutoencoder
from .specs import ExperimentSpec, SpecError, load_spec
from .train import (
    AccuracyRow,
    ReconstructionReport,
    quantization_sweep,
    train_classifier,
    train_reconstructor,
)

__version__ = "0.1.0"
