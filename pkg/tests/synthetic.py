"""Synthetic video generator used as the ground-truth oracle for tracker
tests: a bright square on a gray background with optional intensity noise."""

from __future__ import annotations

import numpy as np

from vidannot.core import BoundingBox
from vidannot.tracker import Frame

FRAME_SIZE = 64
TARGET_HALF = 8  # 16x16 square
BACKGROUND = 60
FOREGROUND = 220


def square_frame_rgb(cx, cy, rng=None, size=FRAME_SIZE, half=TARGET_HALF) -> np.ndarray:
    img = np.full((size, size), float(BACKGROUND))
    x0, x1 = int(round(cx - half)), int(round(cx + half))
    y0, y1 = int(round(cy - half)), int(round(cy + half))
    img[max(0, y0) : max(0, y1), max(0, x0) : max(0, x1)] = FOREGROUND
    if rng is not None:
        img = img + rng.integers(-5, 6, size=img.shape)
    gray = np.clip(img, 0, 255).astype(np.uint8)
    return np.stack([gray, gray, gray], axis=-1)


def square_frame(cx, cy, rng=None) -> Frame:
    return Frame.from_rgb(square_frame_rgb(cx, cy, rng))


def bouncing_sequence(n_frames=100, speed=2.0, seed=1, noisy=True):
    """Horizontal bouncing motion at `speed` px/frame. Returns
    (frames, ground-truth centers)."""
    rng = np.random.default_rng(seed) if noisy else None
    cx, cy, vx = 12.0, 32.0, speed
    frames, centers = [], []
    lo, hi = TARGET_HALF + 4, FRAME_SIZE - TARGET_HALF - 4
    for _ in range(n_frames):
        frames.append(square_frame(cx, cy, rng))
        centers.append((cx, cy))
        cx += vx
        if cx > hi or cx < lo:
            vx = -vx
    return frames, centers


def bouncing_sequence_rgb(n_frames=100, speed=2.0, seed=1, noisy=True):
    rng = np.random.default_rng(seed) if noisy else None
    cx, cy, vx = 12.0, 32.0, speed
    frames, centers = [], []
    lo, hi = TARGET_HALF + 4, FRAME_SIZE - TARGET_HALF - 4
    for _ in range(n_frames):
        frames.append(square_frame_rgb(cx, cy, rng))
        centers.append((cx, cy))
        cx += vx
        if cx > hi or cx < lo:
            vx = -vx
    return frames, centers


def gt_box(center) -> BoundingBox:
    cx, cy = center
    return BoundingBox(x=cx - TARGET_HALF, y=cy - TARGET_HALF,
                       w=2 * TARGET_HALF, h=2 * TARGET_HALF)


def iou(a: BoundingBox, b: BoundingBox) -> float:
    ix = max(0.0, min(a.x + a.w, b.x + b.w) - max(a.x, b.x))
    iy = max(0.0, min(a.y + a.h, b.y + b.h) - max(a.y, b.y))
    inter = ix * iy
    union = a.w * a.h + b.w * b.h - inter
    return inter / union


def center_error(box: BoundingBox, center) -> float:
    return max(
        abs(box.x + box.w / 2 - center[0]),
        abs(box.y + box.h / 2 - center[1]),
    )
