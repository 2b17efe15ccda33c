"""Persistent record types and their dict (de)serialization."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ..core.models import Annotation, BoundingBox, BoxTrack, Keyframe, Label, LabelKind


class Role(str, Enum):
    ADMIN = "admin"
    MODERATOR = "moderator"
    ANNOTATOR = "annotator"


class VideoStatus(str, Enum):
    TO_ANNOTATE = "to_annotate"
    ANNOTATING = "annotating"
    DONE = "done"


class JobState(str, Enum):
    QUEUED = "queued"
    RUNNING = "running"
    DONE = "done"
    FAILED = "failed"

    @property
    def terminal(self) -> bool:
        return self in (JobState.DONE, JobState.FAILED)


@dataclass
class UserRecord:
    id: str
    email: str
    display_name: str
    password_hash: str
    role: Role = Role.ANNOTATOR
    is_activated: bool = False
    version: int = 0

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "email": self.email,
            "displayName": self.display_name,
            "passwordHash": self.password_hash,
            "role": self.role.value,
            "isActivated": self.is_activated,
            "version": self.version,
        }

    @staticmethod
    def from_dict(d: dict) -> "UserRecord":
        return UserRecord(
            id=d["id"],
            email=d["email"],
            display_name=d["displayName"],
            password_hash=d["passwordHash"],
            role=Role(d["role"]),
            is_activated=d["isActivated"],
            version=d.get("version", 0),
        )


@dataclass
class VideoRecord:
    id: str
    name: str
    duration_ms: int
    frame_rate: float
    width: int
    height: int
    blob_ref: str
    uploaded_by: str
    thumbnail_ref: str | None = None
    frames_dir: str | None = None  # decoder output, used by tracking jobs
    status: VideoStatus = VideoStatus.TO_ANNOTATE
    bookmarked_by: set[str] = field(default_factory=set)
    version: int = 0

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "durationMs": self.duration_ms,
            "frameRate": self.frame_rate,
            "width": self.width,
            "height": self.height,
            "blobRef": self.blob_ref,
            "thumbnailRef": self.thumbnail_ref,
            "framesDir": self.frames_dir,
            "status": self.status.value,
            "uploadedBy": self.uploaded_by,
            "bookmarkedBy": sorted(self.bookmarked_by),
            "version": self.version,
        }

    @staticmethod
    def from_dict(d: dict) -> "VideoRecord":
        return VideoRecord(
            id=d["id"],
            name=d["name"],
            duration_ms=d["durationMs"],
            frame_rate=d["frameRate"],
            width=d["width"],
            height=d["height"],
            blob_ref=d["blobRef"],
            thumbnail_ref=d.get("thumbnailRef"),
            frames_dir=d.get("framesDir"),
            status=VideoStatus(d["status"]),
            uploaded_by=d["uploadedBy"],
            bookmarked_by=set(d.get("bookmarkedBy", [])),
            version=d.get("version", 0),
        )


@dataclass
class GroupRecord:
    id: str
    name: str
    video_ids: set[str] = field(default_factory=set)
    label_ids: set[str] = field(default_factory=set)
    member_ids: set[str] = field(default_factory=set)
    version: int = 0

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "videoIds": sorted(self.video_ids),
            "labelIds": sorted(self.label_ids),
            "memberIds": sorted(self.member_ids),
            "version": self.version,
        }

    @staticmethod
    def from_dict(d: dict) -> "GroupRecord":
        return GroupRecord(
            id=d["id"],
            name=d["name"],
            video_ids=set(d.get("videoIds", [])),
            label_ids=set(d.get("labelIds", [])),
            member_ids=set(d.get("memberIds", [])),
            version=d.get("version", 0),
        )


@dataclass
class JobRecord:
    id: str
    annotation_id: str
    state: JobState = JobState.QUEUED
    report: dict | None = None
    error: str | None = None
    version: int = 0

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "annotationId": self.annotation_id,
            "state": self.state.value,
            "report": self.report,
            "error": self.error,
            "version": self.version,
        }

    @staticmethod
    def from_dict(d: dict) -> "JobRecord":
        return JobRecord(
            id=d["id"],
            annotation_id=d["annotationId"],
            state=JobState(d["state"]),
            report=d.get("report"),
            error=d.get("error"),
            version=d.get("version", 0),
        )


def label_to_dict(label: Label, version: int = 0) -> dict:
    return {
        "id": label.id,
        "name": label.name,
        "color": label.color,
        "kind": label.kind.value,
        "version": version,
    }


def label_from_dict(d: dict) -> Label:
    return Label(id=d["id"], name=d["name"], color=d["color"], kind=LabelKind(d["kind"]))


def annotation_to_dict(ann: Annotation, version: int = 0) -> dict:
    track = None
    if ann.track is not None:
        track = {
            "interpolation": ann.track.interpolation,
            "keyframes": [
                {"ts": kf.ts, "x": kf.box.x, "y": kf.box.y, "w": kf.box.w, "h": kf.box.h}
                for kf in ann.track.keyframes
            ],
        }
    return {
        "id": ann.id,
        "videoId": ann.video_id,
        "labelId": ann.label_id,
        "startMs": ann.start_ms,
        "durationMs": ann.duration_ms,
        "isFalsePositive": ann.is_false_positive,
        "createdBy": ann.created_by,
        "groupId": ann.group_id,
        "showLabelOnViewer": ann.show_label_on_viewer,
        "createdSeq": ann.created_seq,
        "track": track,
        "version": version,
    }


def annotation_from_dict(d: dict) -> Annotation:
    track = None
    if d.get("track") is not None:
        track = BoxTrack(
            keyframes=tuple(
                Keyframe(
                    ts=kf["ts"],
                    box=BoundingBox(x=kf["x"], y=kf["y"], w=kf["w"], h=kf["h"]),
                )
                for kf in d["track"]["keyframes"]
            ),
            interpolation=d["track"]["interpolation"],
        )
    return Annotation(
        id=d["id"],
        video_id=d["videoId"],
        label_id=d["labelId"],
        start_ms=d["startMs"],
        duration_ms=d["durationMs"],
        is_false_positive=d["isFalsePositive"],
        created_by=d["createdBy"],
        group_id=d.get("groupId"),
        show_label_on_viewer=d.get("showLabelOnViewer", False),
        created_seq=d.get("createdSeq", 0),
        track=track,
    )
