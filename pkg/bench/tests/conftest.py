import subprocess
import sys

import numpy as np
import pytest
from PIL import Image


def save_gray(path, img01):
    Image.fromarray((np.clip(img01, 0, 1) * 255).astype(np.uint8), mode="L").save(path)


def run_convert(src, dst, *flags):
    """Drive the simulator through its CLI, its external interface."""
    cmd = [sys.executable, "-m", "bgcam.cli", "convert", str(src), str(dst), *flags]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return dst / "manifest.tsv"


def make_shape_image(kind, rng, size=28):
    """One image of a synthetic 3-class shape corpus with pose jitter."""
    img = np.full((size, size), 0.15 + 0.1 * rng.random())
    cy, cx = size // 2 + rng.integers(-3, 4), size // 2 + rng.integers(-3, 4)
    tone = 0.7 + 0.25 * rng.random()
    yy, xx = np.mgrid[0:size, 0:size]
    if kind == "disk":
        r = 5 + rng.integers(0, 4)
        img[(yy - cy) ** 2 + (xx - cx) ** 2 <= r * r] = tone
    elif kind == "cross":
        w = 1 + rng.integers(0, 2)
        img[max(0, cy - 8):cy + 8, max(0, cx - w):cx + w + 1] = tone
        img[max(0, cy - w):cy + w + 1, max(0, cx - 8):cx + 8] = tone
    elif kind == "frame":
        r = 6 + rng.integers(0, 3)
        box = (np.abs(yy - cy) <= r) & (np.abs(xx - cx) <= r)
        inner = (np.abs(yy - cy) <= r - 3) & (np.abs(xx - cx) <= r - 3)
        img[box & ~inner] = tone
    return np.clip(img, 0, 1)


@pytest.fixture(scope="session")
def shape_corpus(tmp_path_factory):
    """Labeled intensity images converted to binary gradients via the CLI."""
    root = tmp_path_factory.mktemp("shapes")
    src = root / "src"
    rng = np.random.default_rng(11)
    for kind in ("disk", "cross", "frame"):
        sub = src / kind
        sub.mkdir(parents=True)
        for i in range(60):
            save_gray(sub / f"{i:03d}.png", make_shape_image(kind, rng))
    out = root / "converted"
    manifest = run_convert(src, out, "--recursive", "--threshold", "0.1")
    return {"src": src, "out": out, "manifest": manifest}


def make_face_image(subject, rng, size=64):
    """Face-like synthetic image; 'identity' fixes geometry, pose jitters."""
    srng = np.random.default_rng(1000 + subject)
    rx = int(14 + 6 * srng.random())
    ry = int(18 + 6 * srng.random())
    eye_dx = int(5 + 3 * srng.random())
    mouth_w = int(4 + 4 * srng.random())
    skin = 0.55 + 0.3 * srng.random()
    back = 0.1 + 0.15 * srng.random()

    img = np.full((size, size), back)
    cy = size // 2 + rng.integers(-4, 5)
    cx = size // 2 + rng.integers(-4, 5)
    yy, xx = np.mgrid[0:size, 0:size]
    face = ((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2 <= 1.0
    img[face] = skin
    for side in (-1, 1):
        ey, ex = cy - ry // 3, cx + side * eye_dx
        img[(yy - ey) ** 2 + (xx - ex) ** 2 <= 4] = 0.05
    my = cy + ry // 2
    img[my:my + 2, cx - mouth_w:cx + mouth_w] = 0.1
    return np.clip(img, 0, 1)


@pytest.fixture(scope="session")
def face_corpus(tmp_path_factory):
    """Per-subject face-like crops converted to binary gradients via the CLI."""
    root = tmp_path_factory.mktemp("faces")
    src = root / "src"
    rng = np.random.default_rng(12)
    for subject in range(8):
        sub = src / f"s{subject:02d}"
        sub.mkdir(parents=True)
        for i in range(16):
            save_gray(sub / f"{i:03d}.png", make_face_image(subject, rng))
    out = root / "converted"
    manifest = run_convert(src, out, "--recursive", "--target-fraction", "0.1")
    return {"src": src, "out": out, "manifest": manifest}
