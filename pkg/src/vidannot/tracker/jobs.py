"""Turns a seed box into a keyframe sequence by stepping the tracker over a
frame source, and runs such jobs on a bounded worker pool."""

from __future__ import annotations

import threading
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from ..core.models import Annotation, BoxTrack, Keyframe
from .frames import DirectoryFrameSource, FrameSourceGap
from .kcf import TrackerParams, kcf_init, kcf_step

EMIT_THRESHOLD_PX = 0.5  # box change below this emits no keyframe


@dataclass
class TrackJobReport:
    annotation_id: str
    frames_processed: int = 0
    keyframes_emitted: int = 0
    min_confidence: float = float("inf")
    low_confidence_spans: list[tuple[int, int]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "annotationId": self.annotation_id,
            "framesProcessed": self.frames_processed,
            "keyframesEmitted": self.keyframes_emitted,
            "minConfidence": (
                None if self.min_confidence == float("inf") else self.min_confidence
            ),
            "lowConfidenceSpans": [list(s) for s in self.low_confidence_spans],
        }


class JobAborted(Exception):
    def __init__(self, report: TrackJobReport, cause: Exception):
        super().__init__(str(cause))
        self.report = report
        self.cause = cause


def _boxes_differ(a, b, threshold=EMIT_THRESHOLD_PX) -> bool:
    return (
        abs(a.x - b.x) > threshold
        or abs(a.y - b.y) > threshold
        or abs(a.w - b.w) > threshold
        or abs(a.h - b.h) > threshold
    )


def run_track_job(
    frames: DirectoryFrameSource,
    ann: Annotation,
    params: TrackerParams | None = None,
    stride_ms: int | None = None,
) -> tuple[BoxTrack, TrackJobReport]:
    """Track from the annotation's first keyframe across its span.

    The seed keyframe is preserved verbatim; a keyframe is emitted whenever
    the proposed box differs from the last emitted one by more than
    0.5 px in any component. Missing frames abort with a partial report
    (raised as JobAborted).
    """
    if ann.track is None or not ann.track.keyframes:
        raise ValueError(f"annotation {ann.id} has no seed keyframe")
    params = params or TrackerParams()
    if stride_ms is None:
        stride_ms = max(1, round(frames.frame_period_ms) or 40)
    report = TrackJobReport(annotation_id=ann.id)
    seed = ann.track.keyframes[0]
    tolerance = max(stride_ms, frames.frame_period_ms)
    try:
        _, frame = frames.nearest(seed.ts, tolerance)
    except FrameSourceGap as exc:
        raise JobAborted(report, exc) from exc
    state = kcf_init(frame, seed.box, params)
    keyframes = [seed]
    low_start: int | None = None
    last_ms = seed.ts
    t = seed.ts + stride_ms
    try:
        while t <= ann.end_ms:
            ms, frame = frames.nearest(t, tolerance)
            if ms > last_ms:
                state, box, confidence = kcf_step(state, frame)
                report.frames_processed += 1
                report.min_confidence = min(report.min_confidence, confidence)
                if confidence < params.confidence_floor:
                    if low_start is None:
                        low_start = ms
                else:
                    if low_start is not None:
                        report.low_confidence_spans.append((low_start, ms))
                        low_start = None
                if _boxes_differ(box, keyframes[-1].box) and ms <= ann.end_ms:
                    keyframes.append(Keyframe(ts=ms, box=box))
                    report.keyframes_emitted += 1
                last_ms = ms
            t += stride_ms
    except FrameSourceGap as exc:
        raise JobAborted(report, exc) from exc
    if low_start is not None:
        report.low_confidence_spans.append((low_start, last_ms))
    return BoxTrack(keyframes=tuple(keyframes)), report


class JobRunner:
    """Bounded worker pool; at most one in-flight job per annotation."""

    def __init__(self, workers: int = 2):
        self._pool = ThreadPoolExecutor(max_workers=workers)
        self._active: set[str] = set()
        self._lock = threading.Lock()

    def submit(self, annotation_id: str, work: Callable[[], None]) -> Future:
        with self._lock:
            if annotation_id in self._active:
                raise RuntimeError(f"job already active for annotation {annotation_id}")
            self._active.add(annotation_id)

        def wrapped():
            try:
                return work()
            finally:
                with self._lock:
                    self._active.discard(annotation_id)

        return self._pool.submit(wrapped)

    def shutdown(self) -> None:
        self._pool.shutdown(wait=True)
