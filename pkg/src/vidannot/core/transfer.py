"""Export/import document format for annotation sets.

The document is self-contained JSON: every label referenced by an
annotation is embedded, and label identity across platforms is the
(name, kind) pair. Occurrence numbers are exported as advisory values
and ignored on import.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field

from .errors import DurationMismatch, UnknownFormatVersion
from .models import Annotation, BoundingBox, BoxTrack, Keyframe, Label, LabelKind
from .ops import compute_occurrences

FORMAT_VERSION = "1"


@dataclass(frozen=True)
class ExportDocument:
    format_version: str
    video_name: str
    video_duration_ms: int
    labels: tuple[Label, ...]
    annotations: tuple[Annotation, ...]
    occurrences: dict[str, int] = field(default_factory=dict)  # annotation id -> advisory occurrence

    def to_json_dict(self) -> dict:
        return {
            "formatVersion": self.format_version,
            "videoName": self.video_name,
            "videoDurationMs": self.video_duration_ms,
            "labels": [
                {"name": l.name, "color": l.color, "kind": l.kind.value}
                for l in self.labels
            ],
            "annotations": [
                self._annotation_to_dict(a) for a in self.annotations
            ],
        }

    def _annotation_to_dict(self, a: Annotation) -> dict:
        label = next(l for l in self.labels if l.id == a.label_id)
        d = {
            "id": a.id,
            "labelName": label.name,
            "labelKind": label.kind.value,
            "startMs": a.start_ms,
            "durationMs": a.duration_ms,
            "isFalsePositive": a.is_false_positive,
            "createdBy": a.created_by,
            "occurrence": self.occurrences.get(a.id),
            "track": None,
        }
        if a.track is not None:
            d["track"] = {
                "interpolation": a.track.interpolation,
                "keyframes": [
                    {"ts": kf.ts, "x": kf.box.x, "y": kf.box.y, "w": kf.box.w, "h": kf.box.h}
                    for kf in a.track.keyframes
                ],
            }
        return d


def export_document(
    video_name: str,
    video_duration_ms: int,
    labels: list[Label],
    annotations: list[Annotation],
) -> ExportDocument:
    """Build a self-contained document for the given annotation set."""
    by_id = {l.id: l for l in labels}
    used = {a.label_id for a in annotations}
    missing = used - by_id.keys()
    if missing:
        raise ValueError(f"annotations reference labels not supplied: {missing}")
    occurrences: dict[str, int] = {}
    for label_id in sorted(used):
        group = [a for a in annotations if a.label_id == label_id]
        for assignment in compute_occurrences(group):
            occurrences[assignment.annotation_id] = assignment.occurrence
    return ExportDocument(
        format_version=FORMAT_VERSION,
        video_name=video_name,
        video_duration_ms=video_duration_ms,
        labels=tuple(by_id[i] for i in sorted(used)),
        annotations=tuple(annotations),
        occurrences=occurrences,
    )


@dataclass(frozen=True)
class ImportResult:
    annotations: tuple[Annotation, ...]
    created_labels: tuple[Label, ...]  # labels absent from the platform, auto-created


def parse_document(doc: dict) -> dict:
    """Light structural check of a document dict; raises on unknown version."""
    if doc.get("formatVersion") != FORMAT_VERSION:
        raise UnknownFormatVersion(
            f"unsupported formatVersion {doc.get('formatVersion')!r}"
        )
    return doc


def import_document(
    doc: dict,
    video_id: str,
    video_duration_ms: int,
    existing_labels: list[Label],
    created_by_fallback: str = "import",
    group_id: str | None = None,
) -> ImportResult:
    """Materialize a document's annotations onto a target video.

    Fresh annotation ids are assigned; labels are matched by (name, kind)
    and created with the document's color when missing.
    """
    parse_document(doc)
    if doc["videoDurationMs"] > video_duration_ms:
        raise DurationMismatch(
            f"document covers {doc['videoDurationMs']} ms, target video is "
            f"{video_duration_ms} ms"
        )
    label_map: dict[tuple[str, LabelKind], Label] = {
        (l.name, l.kind): l for l in existing_labels
    }
    created: list[Label] = []
    for entry in doc["labels"]:
        key = (entry["name"], LabelKind(entry["kind"]))
        if key not in label_map:
            label = Label(
                id=str(uuid.uuid4()),
                name=entry["name"],
                color=entry["color"],
                kind=key[1],
            )
            label_map[key] = label
            created.append(label)

    annotations: list[Annotation] = []
    for seq, entry in enumerate(doc["annotations"]):
        end = entry["startMs"] + entry["durationMs"]
        if end > video_duration_ms:
            raise DurationMismatch(
                f"annotation ends at {end} ms beyond video duration "
                f"{video_duration_ms} ms"
            )
        key = (entry["labelName"], LabelKind(entry["labelKind"]))
        if key not in label_map:
            raise ValueError(f"annotation references label missing from document: {key}")
        track = None
        if entry.get("track") is not None:
            track = BoxTrack(
                keyframes=tuple(
                    Keyframe(
                        ts=kf["ts"],
                        box=BoundingBox(x=kf["x"], y=kf["y"], w=kf["w"], h=kf["h"]),
                    )
                    for kf in entry["track"]["keyframes"]
                ),
                interpolation=entry["track"]["interpolation"],
            )
        annotations.append(
            Annotation(
                id=str(uuid.uuid4()),
                video_id=video_id,
                label_id=label_map[key].id,
                start_ms=entry["startMs"],
                duration_ms=entry["durationMs"],
                created_by=entry.get("createdBy") or created_by_fallback,
                is_false_positive=bool(entry.get("isFalsePositive", False)),
                group_id=group_id,
                track=track,
                created_seq=seq,
            )
        )
    return ImportResult(annotations=tuple(annotations), created_labels=tuple(created))
