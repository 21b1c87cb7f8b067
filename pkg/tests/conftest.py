import numpy as np
import pytest
from skimage import data as skdata

import bgcam


def _to_gray01(img: np.ndarray) -> np.ndarray:
    arr = np.asarray(img)
    if arr.dtype == bool:
        arr = arr.astype(np.uint8) * 255
    arr = arr.astype(np.float64) / 255.0
    if arr.ndim == 3:
        arr = arr[..., :3] @ np.array([0.299, 0.587, 0.114])
    return np.clip(arr, 0.0, 1.0)


PHOTO_NAMES = [
    "camera", "astronaut", "coffee", "chelsea", "moon", "rocket",
    "hubble_deep_field", "coins", "clock", "page", "text", "cat",
    "grass", "gravel", "brick", "immunohistochemistry",
]


@pytest.fixture(scope="session")
def photo_corpus():
    """>= 500 distinct 64x64 natural-photo crops, deterministic order."""
    crops = []
    for name in PHOTO_NAMES:
        gray = _to_gray01(getattr(skdata, name)())
        h, w = gray.shape
        for r in range(0, h - 63, 64):
            for c in range(0, w - 63, 64):
                crops.append(gray[r:r + 64, c:c + 64])
    assert len(crops) >= 500, f"only {len(crops)} crops available"
    return [
        bgcam.IntensityFrame(pixels=crop, timestamp_index=i)
        for i, crop in enumerate(crops[:max(500, len(crops))])
    ]


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260823)
