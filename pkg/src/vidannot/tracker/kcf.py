"""Kernelized correlation filter tracking on raw grayscale features.

Training solves a ridge regression over all cyclic shifts of the target
patch in the frequency domain; detection finds the peak of the kernel
response in a padded search window around the previous location.
Translation only: box dimensions never change.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..core.models import BoundingBox
from .frames import Frame


class SeedOutsideFrame(Exception):
    pass


@dataclass(frozen=True)
class TrackerParams:
    padding: float = 1.5          # search area ratio around the target
    kernel_sigma: float = 0.5
    lambda_: float = 1e-4         # ridge regularization
    learning_rate: float = 0.075
    template_size: int = 64
    confidence_floor: float = 0.2
    output_sigma_factor: float = 0.1

    def __post_init__(self):
        for name in ("padding", "kernel_sigma", "lambda_", "learning_rate",
                     "template_size", "confidence_floor"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        t = self.template_size
        if t & (t - 1):
            raise ValueError("template_size must be a power of two")


@dataclass(frozen=True)
class TrackerState:
    alphaf: np.ndarray        # learned dual coefficients, frequency domain (T, T) complex
    template: np.ndarray      # learned appearance, windowed (T, T) float
    center: tuple[float, float]   # box center in frame pixels
    box_size: tuple[float, float]  # (w, h), fixed over the track
    window_size: tuple[float, float]  # padded search window in frame pixels
    params: TrackerParams

    def box(self) -> BoundingBox:
        (cx, cy), (w, h) = self.center, self.box_size
        return BoundingBox(x=cx - w / 2, y=cy - h / 2, w=w, h=h)


def _cos_window(t: int) -> np.ndarray:
    return np.outer(np.hanning(t), np.hanning(t))


def _shift_grid(t: int) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic shift offsets along each axis: 0, 1, ..., -2, -1."""
    idx = np.arange(t)
    d = np.where(idx <= t // 2, idx, idx - t)
    return np.meshgrid(d, d, indexing="xy")


def _target_response(t: int, params: TrackerParams) -> np.ndarray:
    # gaussian centered at zero shift; bandwidth proportional to target size
    target_extent = t / (1 + params.padding)
    sigma = target_extent * params.output_sigma_factor
    dx, dy = _shift_grid(t)
    return np.exp(-0.5 * (dx**2 + dy**2) / sigma**2)


def extract_patch(
    frame: Frame, center: tuple[float, float], window: tuple[float, float], t: int
) -> np.ndarray:
    """Bilinear resample of the padded window around center to (t, t),
    replicating border pixels where the window leaves the frame."""
    cx, cy = center
    ww, wh = window
    xs = cx - ww / 2 + (np.arange(t) + 0.5) * ww / t
    ys = cy - wh / 2 + (np.arange(t) + 0.5) * wh / t
    xs = np.clip(xs, 0, frame.width - 1)
    ys = np.clip(ys, 0, frame.height - 1)
    x0 = np.floor(xs).astype(int)
    y0 = np.floor(ys).astype(int)
    x1 = np.minimum(x0 + 1, frame.width - 1)
    y1 = np.minimum(y0 + 1, frame.height - 1)
    fx = (xs - x0)[None, :]
    fy = (ys - y0)[:, None]
    p = frame.pixels.astype(np.float64)
    top = p[np.ix_(y0, x0)] * (1 - fx) + p[np.ix_(y0, x1)] * fx
    bot = p[np.ix_(y1, x0)] * (1 - fx) + p[np.ix_(y1, x1)] * fx
    return top * (1 - fy) + bot * fy


def _features(patch: np.ndarray, cos_window: np.ndarray) -> np.ndarray:
    x = patch / 255.0
    x -= x.mean()
    return x * cos_window


def gaussian_kernel_response(a: np.ndarray, b: np.ndarray, sigma: float) -> np.ndarray:
    """Gaussian kernel between a and every cyclic shift of b.

    Entry (dy, dx) holds k(a, shift(b, dy, dx)); the map peaks where the
    shift best aligns b with a.
    """
    if a.shape != b.shape:
        raise ValueError(f"patch shapes differ: {a.shape} vs {b.shape}")
    n = a.size
    cross = np.real(np.fft.ifft2(np.conj(np.fft.fft2(a)) * np.fft.fft2(b)))
    dist2 = np.maximum(np.sum(a**2) + np.sum(b**2) - 2 * cross, 0)
    return np.exp(-dist2 / (sigma**2 * n))


def _train(features: np.ndarray, yf: np.ndarray, params: TrackerParams) -> np.ndarray:
    kf = np.fft.fft2(gaussian_kernel_response(features, features, params.kernel_sigma))
    return yf / (kf + params.lambda_)


def kcf_init(frame: Frame, box: BoundingBox, params: TrackerParams | None = None) -> TrackerState:
    params = params or TrackerParams()
    if (
        box.x + box.w <= 0
        or box.y + box.h <= 0
        or box.x >= frame.width
        or box.y >= frame.height
    ):
        raise SeedOutsideFrame(f"seed box {box} does not intersect the frame")
    t = params.template_size
    center = (box.x + box.w / 2, box.y + box.h / 2)
    window = (box.w * (1 + params.padding), box.h * (1 + params.padding))
    cos_window = _cos_window(t)
    yf = np.fft.fft2(_target_response(t, params))
    features = _features(extract_patch(frame, center, window, t), cos_window)
    alphaf = _train(features, yf, params)
    return TrackerState(
        alphaf=alphaf,
        template=features,
        center=center,
        box_size=(box.w, box.h),
        window_size=window,
        params=params,
    )


def _subpixel(resp: np.ndarray, peak: tuple[int, int]) -> tuple[float, float]:
    """3-point parabolic refinement per axis around the (circular) peak."""
    py, px = peak
    t_h, t_w = resp.shape

    def refine(minus: float, center: float, plus: float) -> float:
        denom = 2 * center - minus - plus
        if denom <= 1e-12:
            return 0.0
        return float(np.clip(0.5 * (plus - minus) / denom, -0.5, 0.5))

    dx = refine(resp[py, (px - 1) % t_w], resp[py, px], resp[py, (px + 1) % t_w])
    dy = refine(resp[(py - 1) % t_h, px], resp[py, px], resp[(py + 1) % t_h, px])
    return dx, dy


def kcf_step(state: TrackerState, frame: Frame) -> tuple[TrackerState, BoundingBox, float]:
    """Detect the target near the previous location, update the model, and
    return (new state, translated box, peak-response confidence)."""
    params = state.params
    t = params.template_size
    cos_window = _cos_window(t)
    patch = _features(extract_patch(frame, state.center, state.window_size, t), cos_window)
    k = gaussian_kernel_response(state.template, patch, params.kernel_sigma)
    resp = np.real(np.fft.ifft2(state.alphaf * np.fft.fft2(k)))
    confidence = float(resp.max())
    py, px = np.unravel_index(int(resp.argmax()), resp.shape)
    sx, sy = _subpixel(resp, (py, px))
    dx = (px if px <= t // 2 else px - t) + sx
    dy = (py if py <= t // 2 else py - t) + sy
    ww, wh = state.window_size
    new_center = (
        state.center[0] + dx * ww / t,
        state.center[1] + dy * wh / t,
    )
    new_patch = _features(extract_patch(frame, new_center, state.window_size, t), cos_window)
    yf = np.fft.fft2(_target_response(t, params))
    new_alphaf = _train(new_patch, yf, params)
    lr = params.learning_rate
    state = replace(
        state,
        center=new_center,
        alphaf=(1 - lr) * state.alphaf + lr * new_alphaf,
        template=(1 - lr) * state.template + lr * new_patch,
    )
    return state, state.box(), confidence
