"""Pure operations on annotations: interpolation, keyframe editing, split,
occurrence numbering and validation."""

from __future__ import annotations

from dataclasses import replace

from .errors import EmptyTrack, InvalidSplitPoint, MixedScope, OutOfSpan
from .models import (
    Annotation,
    BoundingBox,
    BoxTrack,
    Keyframe,
    Label,
    LabelKind,
    OccurrenceAssignment,
)


def interpolate_box(track: BoxTrack, t: int) -> BoundingBox:
    """Box at time t: componentwise linear interpolation between the
    bracketing keyframes, clamped to the nearest keyframe outside the range."""
    if track is None or not track.keyframes:
        raise EmptyTrack("cannot interpolate an empty track")
    kfs = track.keyframes
    if t <= kfs[0].ts:
        return kfs[0].box
    if t >= kfs[-1].ts:
        return kfs[-1].box
    for k0, k1 in zip(kfs, kfs[1:]):
        if k0.ts <= t <= k1.ts:
            if t == k0.ts:
                return k0.box
            if t == k1.ts:
                return k1.box
            f = (t - k0.ts) / (k1.ts - k0.ts)
            b0, b1 = k0.box, k1.box
            return BoundingBox(
                x=b0.x + f * (b1.x - b0.x),
                y=b0.y + f * (b1.y - b0.y),
                w=b0.w + f * (b1.w - b0.w),
                h=b0.h + f * (b1.h - b0.h),
            )
    raise AssertionError("unreachable: t inside keyframe range")


def insert_keyframe(
    track: BoxTrack,
    t: int,
    box: BoundingBox,
    span: tuple[int, int] | None = None,
) -> BoxTrack:
    """Return track with a keyframe at t set to box, replacing any keyframe
    at exactly t. When the owning annotation span is given, t must lie in it."""
    if span is not None and not (span[0] <= t <= span[1]):
        raise OutOfSpan(f"keyframe ts {t} outside span {span}")
    kept = [kf for kf in track.keyframes if kf.ts != t]
    kept.append(Keyframe(ts=t, box=box))
    kept.sort(key=lambda kf: kf.ts)
    return BoxTrack(keyframes=tuple(kept), interpolation=track.interpolation)


def split_annotation(ann: Annotation, t: int) -> tuple[Annotation, Annotation]:
    """Divide ann at t into [start, t) and [t, end); keyframes are partitioned
    around t and a boundary keyframe is duplicated so geometry is unchanged."""
    if not (ann.start_ms < t < ann.end_ms):
        raise InvalidSplitPoint(
            f"split point {t} not strictly inside [{ann.start_ms}, {ann.end_ms}]"
        )
    left_track = right_track = None
    if ann.track is not None:
        boundary = Keyframe(ts=t, box=interpolate_box(ann.track, t))
        left_kfs = [kf for kf in ann.track.keyframes if kf.ts < t] + [boundary]
        right_kfs = [boundary] + [kf for kf in ann.track.keyframes if kf.ts > t]
        left_track = BoxTrack(keyframes=tuple(left_kfs))
        right_track = BoxTrack(keyframes=tuple(right_kfs))
    left = replace(ann, duration_ms=t - ann.start_ms, track=left_track)
    right = replace(ann, start_ms=t, duration_ms=ann.end_ms - t, track=right_track)
    return left, right


def compute_occurrences(anns: list[Annotation]) -> list[OccurrenceAssignment]:
    """Number annotations of one (video, group, label) 1..n by start time,
    breaking ties by creation order."""
    if not anns:
        return []
    scope = (anns[0].video_id, anns[0].group_id, anns[0].label_id)
    for a in anns:
        if (a.video_id, a.group_id, a.label_id) != scope:
            raise MixedScope(
                f"annotation {a.id} not in scope {scope}"
            )
    ordered = sorted(anns, key=lambda a: (a.start_ms, a.created_seq, a.id))
    return [
        OccurrenceAssignment(annotation_id=a.id, occurrence=i + 1)
        for i, a in enumerate(ordered)
    ]


# validate_annotation violation codes
SPAN_OUT_OF_VIDEO = "SpanOutOfVideo"
TRACK_REQUIRED = "TrackRequired"
TRACK_FORBIDDEN = "TrackForbidden"
KEYFRAME_OUT_OF_SPAN = "KeyframeOutOfSpan"
NON_POSITIVE_DURATION = "NonPositiveDuration"


def validate_annotation(
    ann: Annotation, label: Label, video_duration_ms: int
) -> list[str]:
    """Check ann against its label kind and the video duration.

    Returns an empty list when valid, otherwise the violation codes.
    """
    violations: list[str] = []
    if ann.duration_ms <= 0:
        violations.append(NON_POSITIVE_DURATION)
    if ann.end_ms > video_duration_ms:
        violations.append(SPAN_OUT_OF_VIDEO)
    if label.kind.is_spatial:
        if ann.track is None:
            violations.append(TRACK_REQUIRED)
    elif ann.track is not None:
        violations.append(TRACK_FORBIDDEN)
    if ann.track is not None:
        if any(not (ann.start_ms <= kf.ts <= ann.end_ms) for kf in ann.track.keyframes):
            violations.append(KEYFRAME_OUT_OF_SPAN)
    return violations
