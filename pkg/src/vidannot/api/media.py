"""Video probing and thumbnails via the configured external decoder.

The decoder command is a template receiving an input path and an output
directory; it must populate the directory with the tracker's frame format
(frame_%06d.ppm + manifest.json). The service treats it as a black box.
"""

from __future__ import annotations

import io
import shlex
import subprocess

from PIL import Image

from ..tracker.frames import DirectoryFrameSource

THUMBNAIL_WIDTH = 320
THUMBNAIL_POSITION = 0.10  # fraction of the video duration


class ProbeFailed(Exception):
    pass


def run_decoder(decoder_cmd: str, input_path: str, output_dir: str) -> None:
    cmd = decoder_cmd.format(input=shlex.quote(input_path), output_dir=shlex.quote(output_dir))
    result = subprocess.run(
        cmd, shell=True, capture_output=True, text=True, timeout=600
    )
    if result.returncode != 0:
        raise ProbeFailed(
            f"decoder exited with {result.returncode}: {result.stderr.strip()[:500]}"
        )


def probe_frames(frames_dir: str) -> dict:
    """Duration, frame rate and dimensions from a decoded frame directory."""
    try:
        source = DirectoryFrameSource(frames_dir)
        period = source.frame_period_ms
        first = source.load(0)
    except Exception as exc:
        raise ProbeFailed(f"undecodable input: {exc}") from exc
    timestamps = source.timestamps
    duration_ms = int(timestamps[-1] + (period or 40))
    return {
        "durationMs": duration_ms,
        "frameRate": 1000.0 / period if period else 25.0,
        "width": first.width,
        "height": first.height,
    }


def make_thumbnail(frames_dir: str, duration_ms: int) -> bytes:
    """PNG of the frame at 10% of the duration, scaled to 320 px width."""
    source = DirectoryFrameSource(frames_dir)
    target = int(duration_ms * THUMBNAIL_POSITION)
    _, frame = source.nearest(target, max_distance_ms=duration_ms)
    img = Image.fromarray(frame.pixels, mode="L")
    height = max(1, round(img.height * THUMBNAIL_WIDTH / img.width))
    img = img.resize((THUMBNAIL_WIDTH, height))
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()
