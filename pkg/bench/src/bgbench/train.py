"""Training entry points and CSV reporting.

All runs are seeded and single-threaded so that identical specs produce
identical report rows. Accuracy rows use the schema the simulator's
sweep joiner consumes: task, modality, bits, test_accuracy.
"""

from __future__ import annotations

import fcntl
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import torch
import torch.nn.functional as F

from . import data
from .models import LeNet, SkipAutoencoder
from .specs import ExperimentSpec, SpecError

ACCURACY_HEADER = "task,modality,bits,test_accuracy"
PSNR_HEADER = "split,mean_psnr_db,baseline_psnr_db,gain_db"


def _seed_everything(seed: int) -> None:
    torch.manual_seed(seed)
    torch.use_deterministic_algorithms(True)
    torch.set_num_threads(1)
    np.random.seed(seed % (2**32))


def append_csv_row(path: Path, header: str, row: str) -> None:
    """Append under an exclusive lock, writing the header once."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a+") as fh:
        fcntl.flock(fh, fcntl.LOCK_EX)
        fh.seek(0)
        if not fh.read(1):
            fh.write(header + "\n")
        fh.seek(0, 2)
        fh.write(row + "\n")
        fcntl.flock(fh, fcntl.LOCK_UN)


@dataclass(frozen=True)
class AccuracyRow:
    task: str
    modality: str
    bits: int
    test_accuracy: float

    def as_csv(self) -> str:
        return f"{self.task},{self.modality},{self.bits},{self.test_accuracy:.6f}"


def _train_test_split(n: int, seed: int, test_fraction: float = 0.2):
    order = np.random.default_rng(seed).permutation(n)
    cut = max(1, int(n * test_fraction))
    return order[cut:], order[:cut]


def train_classifier(spec: ExperimentSpec) -> AccuracyRow:
    """Train LeNet on a converted dataset and report test accuracy."""
    if spec.task == "reconstruct":
        raise SpecError("train_classifier does not handle the reconstruct task")
    _seed_everything(spec.seed)
    dataset = data.load_dataset(spec.manifest_path)
    images, labels, names = data.load_arrays(dataset, spec.input_modality, spec.task)
    bits = dataset.bits if spec.input_modality.endswith("gradient") else 0

    x = torch.from_numpy(images).permute(0, 3, 1, 2).contiguous()
    y = torch.from_numpy(labels)
    train_idx, test_idx = _train_test_split(len(x), spec.seed)

    model = LeNet(in_channels=x.shape[1], num_classes=len(names), image_size=x.shape[-1])
    optimizer = torch.optim.Adam(model.parameters(), lr=spec.learning_rate)
    model.train()
    for _ in range(spec.epochs):
        perm = torch.randperm(len(train_idx))
        for start in range(0, len(train_idx), spec.batch_size):
            idx = torch.from_numpy(train_idx[perm[start:start + spec.batch_size].numpy()])
            optimizer.zero_grad()
            loss = F.cross_entropy(model(x[idx]), y[idx])
            loss.backward()
            optimizer.step()

    model.eval()
    with torch.no_grad():
        correct = 0
        for start in range(0, len(test_idx), 256):
            idx = torch.from_numpy(test_idx[start:start + 256])
            correct += (model(x[idx]).argmax(dim=1) == y[idx]).sum().item()
    accuracy = correct / len(test_idx)

    row = AccuracyRow(spec.task, spec.input_modality, bits, accuracy)
    if spec.output_csv is not None:
        append_csv_row(spec.output_csv, ACCURACY_HEADER, row.as_csv())
    return row


def quantization_sweep(
    task: str,
    manifests: dict[int, Path],
    output_csv: Path,
    epochs: int = 5,
    seed: int = 0,
    bits_range: Sequence[int] = range(1, 9),
) -> tuple[list[AccuracyRow], list[int]]:
    """One classifier run per bit depth; missing depths become explicit gaps.

    Returns (rows, missing_bits); callers should exit nonzero when
    missing_bits is nonempty.
    """
    rows: list[AccuracyRow] = []
    missing: list[int] = []
    for bits in bits_range:
        manifest = manifests.get(bits)
        if manifest is None or not Path(manifest).is_file():
            missing.append(bits)
            continue
        spec = ExperimentSpec(
            task=task,
            input_modality="multibit_gradient" if bits > 1 else "binary_gradient",
            manifest_path=Path(manifest),
            epochs=epochs,
            seed=seed,
            output_csv=None,
        )
        rows.append(train_classifier(spec))
    output_csv = Path(output_csv)
    output_csv.parent.mkdir(parents=True, exist_ok=True)
    lines = [ACCURACY_HEADER] + [r.as_csv() for r in rows]
    output_csv.write_text("\n".join(lines) + "\n")
    return rows, missing


def psnr(mse: float) -> float:
    if mse <= 0:
        return float("inf")
    return 10.0 * math.log10(1.0 / mse)


@dataclass(frozen=True)
class ReconstructionReport:
    mean_psnr: float
    baseline_psnr: float
    holdout_labels: tuple[str, ...]
    sample_grid: Optional[Path]

    @property
    def gain_db(self) -> float:
        return self.mean_psnr - self.baseline_psnr


def _save_grid(inputs, outputs, targets, path: Path, limit: int = 8) -> None:
    from PIL import Image

    n = min(limit, inputs.shape[0])
    rows = []
    for bank in (targets, inputs, outputs):
        rows.append(np.concatenate([bank[i, 0] for i in range(n)], axis=1))
    grid = (np.clip(np.concatenate(rows, axis=0), 0, 1) * 255).astype(np.uint8)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(grid, mode="L").save(path)


def train_reconstructor(
    spec: ExperimentSpec,
    widths=(32, 64, 128, 256, 512),
    grid_path: Optional[Path] = None,
) -> ReconstructionReport:
    """Train the skip autoencoder on (gradient, intensity) pairs.

    Entries whose label is in spec.holdout_labels are excluded from
    training and used as the held-out evaluation set; when the spec
    names none, the two lexicographically-first labels are held out.
    """
    if spec.task != "reconstruct":
        raise SpecError("train_reconstructor requires task=reconstruct")
    _seed_everything(spec.seed)
    dataset = data.load_dataset(spec.manifest_path)
    grads, targets, labels = data.load_pairs(dataset)
    if any(lbl is None for lbl in labels):
        raise SpecError("reconstruction requires per-subject labels")

    holdout = set(spec.holdout_labels) or set(sorted(set(labels))[:2])
    unknown = holdout - set(labels)
    if unknown:
        raise SpecError(f"holdout labels not in manifest: {sorted(unknown)}")
    mask = np.array([lbl in holdout for lbl in labels])
    if mask.all() or not mask.any():
        raise SpecError("holdout split would leave an empty train or test set")

    x_train = torch.from_numpy(grads[~mask])
    y_train = torch.from_numpy(targets[~mask])
    x_test = torch.from_numpy(grads[mask])
    y_test = torch.from_numpy(targets[mask])

    model = SkipAutoencoder(widths=widths)
    optimizer = torch.optim.Adam(model.parameters(), lr=spec.learning_rate)
    model.train()
    for _ in range(spec.epochs):
        perm = torch.randperm(len(x_train))
        for start in range(0, len(x_train), spec.batch_size):
            idx = perm[start:start + spec.batch_size]
            optimizer.zero_grad()
            loss = F.mse_loss(model(x_train[idx]), y_train[idx])
            loss.backward()
            optimizer.step()

    model.eval()
    with torch.no_grad():
        outputs = []
        for start in range(0, len(x_test), 16):
            outputs.append(model(x_test[start:start + 16]))
        recon = torch.cat(outputs)
    recon_psnrs = [
        psnr(F.mse_loss(recon[i], y_test[i]).item()) for i in range(len(y_test))
    ]
    mean_image = y_train.mean(dim=0)
    baseline_psnrs = [
        psnr(F.mse_loss(mean_image, y_test[i]).item()) for i in range(len(y_test))
    ]

    grid = None
    if grid_path is not None:
        grid = Path(grid_path)
        _save_grid(x_test.numpy(), recon.numpy(), y_test.numpy(), grid)

    report = ReconstructionReport(
        mean_psnr=float(np.mean(recon_psnrs)),
        baseline_psnr=float(np.mean(baseline_psnrs)),
        holdout_labels=tuple(sorted(holdout)),
        sample_grid=grid,
    )
    if spec.output_csv is not None:
        append_csv_row(
            spec.output_csv,
            PSNR_HEADER,
            f"holdout,{report.mean_psnr:.4f},{report.baseline_psnr:.4f},{report.gain_db:.4f}",
        )
    return report
