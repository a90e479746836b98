"""Procedural toy imagery, fully offline and seeded.

The victim task is a 10-class glyph set whose class pairs differ in fine
detail on purpose -- single versus double bars three pixels apart, ring
versus filled disc -- so classification genuinely depends on resolution:
at side 8 the distinguishing detail is gone, at 16 it is marginal, at 32
it is easy.  The attack pool is unlabeled compositions of the same drawing
primitives: feature-compatible with the victim's world (as out-of-
distribution photo pools are for photo classifiers) without containing any
class instance.

Everything is single-channel float in [0, 1], shaped (N, 1, side, side),
generated at the original side I_O = 32.
"""

from __future__ import annotations

import numpy as np
import torch
import torch.nn.functional as F
from scipy.ndimage import gaussian_filter

ORIGINAL_SIDE = 32
NUM_CLASSES = 10
_SIDE = ORIGINAL_SIDE


def resize(images: torch.Tensor, side: int) -> torch.Tensor:
    """Bilinear resize to a square side; identity when already that size."""
    if images.shape[-1] == side and images.shape[-2] == side:
        return images
    return F.interpolate(images, size=(side, side), mode="bilinear", align_corners=False)


def _draw(img: np.ndarray, kind: int, cy: int, cx: int, rng: np.random.Generator) -> None:
    length = int(rng.integers(9, 13))
    half = length // 2
    if kind == 0:  # bar
        img[cy, cx - half:cx + half] = 1.0
    elif kind == 1:  # double bar, 4 px apart: merges below side ~16
        img[cy - 2, cx - half:cx + half] = 1.0
        img[cy + 2, cx - half:cx + half] = 1.0
    elif kind == 2:
        img[cy - half:cy + half, cx] = 1.0
    elif kind == 3:
        img[cy - half:cy + half, cx - 2] = 1.0
        img[cy - half:cy + half, cx + 2] = 1.0
    elif kind in (4, 5):  # diagonals
        sign = 1 if kind == 4 else -1
        for t in range(-half, half):
            y, x = cy + t, cx + sign * t
            if 0 <= y < _SIDE and 0 <= x < _SIDE:
                img[y, x] = 1.0
                img[y, min(_SIDE - 1, x + 1)] = 1.0
    elif kind in (6, 7):  # ring vs filled disc
        yy, xx = np.mgrid[0:_SIDE, 0:_SIDE]
        r = int(rng.integers(5, 8))
        d2 = (yy - cy) ** 2 + (xx - cx) ** 2
        if kind == 6:
            img[(d2 <= r * r) & (d2 >= (r - 2) ** 2)] = 1.0
        else:
            img[d2 <= r * r] = 1.0
    elif kind == 8:  # cross
        img[cy, cx - half:cx + half] = 1.0
        img[cy - half:cy + half, cx] = 1.0
    else:  # x
        for t in range(-half, half):
            for dx in (t, -t):
                y, x = cy + t, cx + dx
                if 0 <= y < _SIDE and 0 <= x < _SIDE:
                    img[y, x] = 1.0


def _finish(img: np.ndarray) -> np.ndarray:
    img = gaussian_filter(img, 0.7)
    peak = img.max()
    return img / peak if peak > 0 else img


def glyph_dataset(per_class: int, seed: int) -> tuple[torch.Tensor, torch.Tensor]:
    """Labeled glyphs at side 32, shuffled deterministically."""
    rng = np.random.default_rng(seed)
    images, labels = [], []
    for cls in range(NUM_CLASSES):
        for _ in range(per_class):
            img = np.zeros((_SIDE, _SIDE), dtype=np.float32)
            cy = _SIDE // 2 + int(rng.integers(-3, 4))
            cx = _SIDE // 2 + int(rng.integers(-3, 4))
            _draw(img, cls, cy, cx, rng)
            images.append(_finish(img))
            labels.append(cls)
    order = np.random.default_rng(seed + 1).permutation(len(images))
    x = torch.from_numpy(np.stack(images)[order]).unsqueeze(1)
    y = torch.tensor(np.array(labels)[order], dtype=torch.long)
    return x, y


def composition_pool(count: int, seed: int) -> torch.Tensor:
    """Unlabeled attack pool: 1-3 primitives scattered per image."""
    rng = np.random.default_rng(seed)
    out = np.zeros((count, _SIDE, _SIDE), dtype=np.float32)
    for i in range(count):
        img = np.zeros((_SIDE, _SIDE), dtype=np.float32)
        for _ in range(int(rng.integers(1, 4))):
            cy = int(rng.integers(8, _SIDE - 8))
            cx = int(rng.integers(8, _SIDE - 8))
            _draw(img, int(rng.integers(0, NUM_CLASSES)), cy, cx, rng)
        out[i] = _finish(img)
    return torch.from_numpy(out).unsqueeze(1)
