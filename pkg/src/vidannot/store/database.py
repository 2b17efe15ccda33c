"""Typed facade over the record store: collection helpers, video queries,
and referential-integrity rules (cascade deletes, label reference checks)."""

from __future__ import annotations

import os

from ..core.models import Annotation, Label
from .backend import FileStore, NotFound, Store, StoreError, Transaction
from .blobs import BlobStore
from .records import (
    GroupRecord,
    JobRecord,
    UserRecord,
    VideoRecord,
    VideoStatus,
    annotation_from_dict,
    annotation_to_dict,
    label_from_dict,
    label_to_dict,
)

USERS = "users"
VIDEOS = "videos"
LABELS = "labels"
GROUPS = "groups"
ANNOTATIONS = "annotations"
JOBS = "jobs"


class LabelInUse(StoreError):
    pass


class DuplicateEmail(StoreError):
    pass


class DuplicateLabel(StoreError):
    pass


class Database:
    def __init__(self, store: Store, blobs: BlobStore):
        self.store = store
        self.blobs = blobs

    @staticmethod
    def open(data_dir: str) -> "Database":
        os.makedirs(data_dir, exist_ok=True)
        return Database(
            store=FileStore(os.path.join(data_dir, "db")),
            blobs=BlobStore(data_dir),
        )

    @staticmethod
    def in_memory(blob_dir: str) -> "Database":
        return Database(store=Store(), blobs=BlobStore(blob_dir))

    # -- users -----------------------------------------------------------
    def save_user(self, user: UserRecord) -> UserRecord:
        def mutate(txn: Transaction):
            for other in txn.list(USERS):
                if other["email"] == user.email and other["id"] != user.id:
                    raise DuplicateEmail(user.email)
            _, version = txn.save(USERS, user.to_dict())
            return version

        user.version = self.store.update(mutate)
        return user

    def get_user(self, user_id: str) -> UserRecord:
        return UserRecord.from_dict(self.store.get(USERS, user_id))

    def find_user_by_email(self, email: str) -> UserRecord | None:
        for d in self.store.list(USERS):
            if d["email"] == email:
                return UserRecord.from_dict(d)
        return None

    def list_users(self) -> list[UserRecord]:
        return sorted(
            (UserRecord.from_dict(d) for d in self.store.list(USERS)),
            key=lambda u: u.email,
        )

    def delete_user(self, user_id: str) -> None:
        # annotations keep their creator id (dangling by design)
        def mutate(txn: Transaction):
            txn.delete(USERS, user_id)
            for g in txn.list(GROUPS):
                if user_id in g["memberIds"]:
                    g["memberIds"] = [m for m in g["memberIds"] if m != user_id]
                    txn.save(GROUPS, g)

        self.store.update(mutate)

    # -- labels ----------------------------------------------------------
    def save_label(self, label: Label, version: int = 0) -> int:
        def mutate(txn: Transaction):
            for other in txn.list(LABELS):
                if (
                    other["name"] == label.name
                    and other["kind"] == label.kind.value
                    and other["id"] != label.id
                ):
                    raise DuplicateLabel(f"({label.name}, {label.kind.value})")
            d = label_to_dict(label, version)
            _, new_version = txn.save(LABELS, d)
            return new_version

        return self.store.update(mutate)

    def get_label(self, label_id: str) -> Label:
        return label_from_dict(self.store.get(LABELS, label_id))

    def list_labels(self) -> list[Label]:
        return sorted(
            (label_from_dict(d) for d in self.store.list(LABELS)),
            key=lambda l: (l.name, l.kind.value),
        )

    def delete_label(self, label_id: str) -> None:
        def mutate(txn: Transaction):
            if any(a["labelId"] == label_id for a in txn.list(ANNOTATIONS)):
                raise LabelInUse(label_id)
            txn.delete(LABELS, label_id)
            for g in txn.list(GROUPS):
                if label_id in g["labelIds"]:
                    g["labelIds"] = [l for l in g["labelIds"] if l != label_id]
                    txn.save(GROUPS, g)

        self.store.update(mutate)

    # -- videos ----------------------------------------------------------
    def save_video(self, video: VideoRecord) -> VideoRecord:
        _, video.version = self.store.save(VIDEOS, video.to_dict())
        return video

    def get_video(self, video_id: str) -> VideoRecord:
        return VideoRecord.from_dict(self.store.get(VIDEOS, video_id))

    def delete_video(self, video_id: str) -> None:
        """Cascade: drops the video's annotations and group references."""

        def mutate(txn: Transaction):
            txn.delete(VIDEOS, video_id)
            for a in txn.list(ANNOTATIONS):
                if a["videoId"] == video_id:
                    txn.delete(ANNOTATIONS, a["id"])
            for g in txn.list(GROUPS):
                if video_id in g["videoIds"]:
                    g["videoIds"] = [v for v in g["videoIds"] if v != video_id]
                    txn.save(GROUPS, g)

        self.store.update(mutate)

    def query_videos(
        self,
        name_substring: str | None = None,
        bookmarked_by: str | None = None,
        status: VideoStatus | None = None,
        group_id: str | None = None,
        page: int = 1,
        page_size: int = 50,
    ) -> tuple[list[VideoRecord], int]:
        """Conjunctive filters; stable (name, id) ordering; returns
        (page of records, total match count)."""
        if not (1 <= page_size <= 200):
            raise ValueError("page_size must be in [1, 200]")
        group_videos: set[str] | None = None
        if group_id is not None:
            group_videos = self.get_group(group_id).video_ids
        matches = []
        for d in self.store.list(VIDEOS):
            v = VideoRecord.from_dict(d)
            if name_substring and name_substring.lower() not in v.name.lower():
                continue
            if bookmarked_by and bookmarked_by not in v.bookmarked_by:
                continue
            if status and v.status != status:
                continue
            if group_videos is not None and v.id not in group_videos:
                continue
            matches.append(v)
        matches.sort(key=lambda v: (v.name, v.id))
        start = (max(1, page) - 1) * page_size
        return matches[start : start + page_size], len(matches)

    # -- groups ----------------------------------------------------------
    def save_group(self, group: GroupRecord) -> GroupRecord:
        _, group.version = self.store.save(GROUPS, group.to_dict())
        return group

    def get_group(self, group_id: str) -> GroupRecord:
        return GroupRecord.from_dict(self.store.get(GROUPS, group_id))

    def list_groups(self) -> list[GroupRecord]:
        return sorted(
            (GroupRecord.from_dict(d) for d in self.store.list(GROUPS)),
            key=lambda g: (g.name, g.id),
        )

    # -- annotations -----------------------------------------------------
    def create_annotation(self, ann: Annotation) -> Annotation:
        """Persist with a per-video creation sequence number assigned here."""

        def mutate(txn: Transaction):
            seq = 1 + max(
                (
                    a["createdSeq"]
                    for a in txn.list(ANNOTATIONS)
                    if a["videoId"] == ann.video_id
                ),
                default=0,
            )
            stamped = annotation_to_dict(ann)
            stamped["createdSeq"] = seq
            _, version = txn.save(ANNOTATIONS, stamped)
            return seq, version

        seq, version = self.store.update(mutate)
        d = annotation_to_dict(ann, version)
        d["createdSeq"] = seq
        return annotation_from_dict(d), version

    def save_annotation(self, ann: Annotation, version: int) -> int:
        _, new_version = self.store.save(ANNOTATIONS, annotation_to_dict(ann, version))
        return new_version

    def get_annotation(self, ann_id: str) -> tuple[Annotation, int]:
        d = self.store.get(ANNOTATIONS, ann_id)
        return annotation_from_dict(d), d["version"]

    def delete_annotation(self, ann_id: str) -> None:
        self.store.delete(ANNOTATIONS, ann_id)

    def list_annotations(
        self, video_id: str | None = None, group_id: str | object = "*"
    ) -> list[Annotation]:
        out = []
        for d in self.store.list(ANNOTATIONS):
            if video_id is not None and d["videoId"] != video_id:
                continue
            if group_id != "*" and d.get("groupId") != group_id:
                continue
            out.append(annotation_from_dict(d))
        out.sort(key=lambda a: (a.start_ms, a.created_seq, a.id))
        return out

    # -- jobs ------------------------------------------------------------
    def save_job(self, job: JobRecord) -> JobRecord:
        def mutate(txn: Transaction):
            for other in txn.list(JOBS):
                if (
                    other["annotationId"] == job.annotation_id
                    and other["id"] != job.id
                    and other["state"] in ("queued", "running")
                    and job.state.value in ("queued", "running")
                ):
                    raise StoreError(
                        f"annotation {job.annotation_id} already has active job "
                        f"{other['id']}"
                    )
            _, version = txn.save(JOBS, job.to_dict())
            return version

        job.version = self.store.update(mutate)
        return job

    def get_job(self, job_id: str) -> JobRecord:
        return JobRecord.from_dict(self.store.get(JOBS, job_id))

    def active_job_for(self, annotation_id: str) -> JobRecord | None:
        for d in self.store.list(JOBS):
            j = JobRecord.from_dict(d)
            if j.annotation_id == annotation_id and not j.state.terminal:
                return j
        return None
