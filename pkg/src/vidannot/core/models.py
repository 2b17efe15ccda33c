"""Core annotation domain types.

All types are immutable values; timestamps are integer milliseconds from
video start, coordinates are real-valued native-video pixels with the
origin at the top-left corner.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum

_COLOR_RE = re.compile(r"^#[0-9a-fA-F]{6}$")


class LabelKind(str, Enum):
    PHASE = "phase"
    ACTION = "action"
    EVENT = "event"
    STRUCTURE = "structure"

    @property
    def is_spatial(self) -> bool:
        """STRUCTURE labels carry a box track; the other kinds are temporal-only."""
        return self is LabelKind.STRUCTURE


@dataclass(frozen=True)
class Label:
    """Ontology entry. (name, kind) is unique platform-wide."""

    id: str
    name: str
    color: str  # "#RRGGBB"
    kind: LabelKind

    def __post_init__(self):
        if not self.name:
            raise ValueError("label name must be non-empty")
        if not _COLOR_RE.match(self.color):
            raise ValueError(f"label color must be '#RRGGBB', got {self.color!r}")


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box in pixels. May partially exceed frame bounds."""

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"box dimensions must be positive, got w={self.w}, h={self.h}")


@dataclass(frozen=True)
class Keyframe:
    ts: int  # milliseconds from video start
    box: BoundingBox

    def __post_init__(self):
        if self.ts < 0:
            raise ValueError("keyframe ts must be >= 0")


@dataclass(frozen=True)
class BoxTrack:
    """Ordered keyframes with linear interpolation in between."""

    keyframes: tuple[Keyframe, ...]
    interpolation: str = "linear"

    def __post_init__(self):
        if not self.keyframes:
            raise ValueError("track must hold at least one keyframe")
        if self.interpolation != "linear":
            raise ValueError(f"unsupported interpolation {self.interpolation!r}")
        object.__setattr__(self, "keyframes", tuple(self.keyframes))
        ts = [kf.ts for kf in self.keyframes]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("keyframe timestamps must be strictly increasing")


@dataclass(frozen=True)
class Annotation:
    """A labeled time interval on a video, optionally carrying a box track."""

    id: str
    video_id: str
    label_id: str
    start_ms: int
    duration_ms: int
    created_by: str
    is_false_positive: bool = False
    group_id: str | None = None
    track: BoxTrack | None = None
    show_label_on_viewer: bool = False
    created_seq: int = 0  # creation-order tiebreak for occurrence numbering

    def __post_init__(self):
        if self.start_ms < 0:
            raise ValueError("start_ms must be >= 0")
        if self.duration_ms <= 0:
            raise ValueError("duration_ms must be > 0")

    @property
    def end_ms(self) -> int:
        return self.start_ms + self.duration_ms

    def with_track(self, track: BoxTrack | None) -> "Annotation":
        return replace(self, track=track)


@dataclass(frozen=True)
class OccurrenceAssignment:
    """Derived sequencing number; recomputed on read, never stored."""

    annotation_id: str
    occurrence: int  # 1-based
