"""Frame input for the tracker.

Frames are 8-bit grayscale. The reference frame source is a directory of
binary PPM (P6) files named frame_%06d.ppm plus a manifest.json mapping
frame index to a millisecond timestamp; an external decoder command is
expected to populate such a directory from a video file.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass

import numpy as np

MANIFEST_NAME = "manifest.json"
FRAME_NAME = "frame_%06d.ppm"


class FrameSourceGap(Exception):
    """No frame close enough to a requested timestamp."""


@dataclass
class Frame:
    width: int
    height: int
    pixels: np.ndarray  # (height, width) uint8 grayscale

    def __post_init__(self):
        if self.pixels.shape != (self.height, self.width):
            raise ValueError(
                f"pixel buffer {self.pixels.shape} does not match "
                f"{self.height}x{self.width}"
            )

    @staticmethod
    def from_rgb(rgb: np.ndarray) -> "Frame":
        """Convert an (H, W, 3) uint8 RGB array using the BT.601 luma weights."""
        gray = np.rint(
            0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
        ).astype(np.uint8)
        return Frame(width=gray.shape[1], height=gray.shape[0], pixels=gray)


def read_ppm(path: str) -> np.ndarray:
    """Read a binary P6 PPM into an (H, W, 3) uint8 array."""
    with open(path, "rb") as fh:
        data = fh.read()
    header = re.match(
        rb"P6\s+(?:#[^\n]*\n\s*)*(\d+)\s+(\d+)\s+(\d+)\s", data
    )
    if not header:
        raise ValueError(f"{path}: not a binary PPM (P6) file")
    width, height, maxval = (int(g) for g in header.groups())
    if maxval != 255:
        raise ValueError(f"{path}: only maxval 255 supported")
    body = data[header.end() : header.end() + width * height * 3]
    if len(body) != width * height * 3:
        raise ValueError(f"{path}: truncated pixel data")
    return np.frombuffer(body, dtype=np.uint8).reshape(height, width, 3)


def write_ppm(path: str, rgb: np.ndarray) -> None:
    height, width = rgb.shape[:2]
    with open(path, "wb") as fh:
        fh.write(b"P6\n%d %d\n255\n" % (width, height))
        fh.write(np.ascontiguousarray(rgb, dtype=np.uint8).tobytes())


def write_frame_dir(
    directory: str, frames_rgb: list[np.ndarray], frame_period_ms: float
) -> None:
    """Write a frame directory in the format the tracker consumes."""
    os.makedirs(directory, exist_ok=True)
    manifest = {"frames": []}
    for i, rgb in enumerate(frames_rgb):
        write_ppm(os.path.join(directory, FRAME_NAME % i), rgb)
        manifest["frames"].append({"index": i, "ms": round(i * frame_period_ms)})
    with open(os.path.join(directory, MANIFEST_NAME), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh)


class DirectoryFrameSource:
    """Ordered (ms, Frame) access over a decoded frame directory."""

    def __init__(self, directory: str):
        self._dir = directory
        with open(os.path.join(directory, MANIFEST_NAME), "r", encoding="utf-8") as fh:
            manifest = json.load(fh)
        self._index = sorted(
            ((e["ms"], e["index"]) for e in manifest["frames"]), key=lambda e: e[0]
        )
        if not self._index:
            raise ValueError(f"{directory}: empty frame manifest")

    @property
    def timestamps(self) -> list[int]:
        return [ms for ms, _ in self._index]

    @property
    def frame_period_ms(self) -> float:
        ts = self.timestamps
        if len(ts) < 2:
            return 0.0
        return (ts[-1] - ts[0]) / (len(ts) - 1)

    def load(self, index: int) -> Frame:
        rgb = read_ppm(os.path.join(self._dir, FRAME_NAME % index))
        return Frame.from_rgb(rgb)

    def nearest(self, ms: int, max_distance_ms: float) -> tuple[int, Frame]:
        """Frame closest to ms; FrameSourceGap if none within max_distance_ms."""
        best = min(self._index, key=lambda e: abs(e[0] - ms))
        if abs(best[0] - ms) > max_distance_ms:
            raise FrameSourceGap(
                f"no frame within {max_distance_ms} ms of t={ms} ms"
            )
        return best[0], self.load(best[1])
