"""Application service: business operations behind the HTTP endpoints and
the admin CLI. Composes the database, the event hub, the tracker job
runner, and auth."""

from __future__ import annotations

import os
import tempfile
import uuid

from ..core import (
    Annotation,
    BoundingBox,
    BoxTrack,
    Keyframe,
    Label,
    LabelKind,
    compute_occurrences,
    export_document,
    import_document,
    split_annotation,
    validate_annotation,
)
from ..realtime import EVENT_CREATED, EVENT_DELETED, EVENT_UPDATED, EventHub
from ..store import (
    Database,
    DuplicateEmail,
    GroupRecord,
    JobRecord,
    JobState,
    NotFound,
    Role,
    UserRecord,
    VideoRecord,
    VideoStatus,
    annotation_from_dict,
    annotation_to_dict,
)
from ..tracker import DirectoryFrameSource, JobAborted, JobRunner, TrackerParams, run_track_job
from . import media
from .auth import TokenSigner, WeakPassword, check_password_strength, hash_password, verify_password
from .rbac import PermissionAction, authorize

IDEMPOTENCY = "idempotency"


class ServiceError(Exception):
    status = 400
    code = "bad_request"


class PermissionDenied(ServiceError):
    status = 403
    code = "permission_denied"


class InvalidCredentials(ServiceError):
    status = 401
    code = "invalid_credentials"


class AccountNotActivated(ServiceError):
    status = 403
    code = "account_not_activated"


class EmailTaken(ServiceError):
    status = 409
    code = "email_taken"


class ValidationFailed(ServiceError):
    status = 400
    code = "validation_failed"

    def __init__(self, violations: list[str]):
        super().__init__(", ".join(violations))
        self.violations = violations


class LabelNotInGroupOntology(ServiceError):
    status = 400
    code = "label_not_in_group_ontology"


class NotStructure(ServiceError):
    status = 400
    code = "not_structure"


class JobAlreadyActive(ServiceError):
    status = 409
    code = "job_already_active"


class Service:
    def __init__(
        self,
        db: Database,
        hub: EventHub,
        tokens: TokenSigner,
        data_dir: str,
        decoder_cmd: str | None = None,
        tracker_workers: int = 2,
    ):
        self.db = db
        self.hub = hub
        self.tokens = tokens
        self.data_dir = data_dir
        self.decoder_cmd = decoder_cmd
        self.jobs = JobRunner(workers=tracker_workers)

    # -- auth ------------------------------------------------------------
    def signup(self, email: str, display_name: str, password: str) -> UserRecord:
        try:
            check_password_strength(password)
        except WeakPassword as exc:
            raise ServiceError(str(exc)) from exc
        user = UserRecord(
            id=str(uuid.uuid4()),
            email=email,
            display_name=display_name,
            password_hash=hash_password(password),
            role=Role.ANNOTATOR,
            is_activated=False,
        )
        try:
            return self.db.save_user(user)
        except DuplicateEmail as exc:
            raise EmailTaken(email) from exc

    def login(self, email: str, password: str) -> str:
        user = self.db.find_user_by_email(email)
        # same failure for unknown email and wrong password
        password_hash = user.password_hash if user else hash_password("-placeholder-")
        if not verify_password(password, password_hash) or user is None:
            raise InvalidCredentials("invalid email or password")
        if not user.is_activated:
            raise AccountNotActivated("account awaiting administrator activation")
        return self.tokens.issue(user.id, user.role.value)

    def authenticate(self, token: str) -> UserRecord:
        from .auth import InvalidToken

        try:
            payload = self.tokens.verify(token)
        except InvalidToken as exc:
            raise InvalidCredentials(str(exc)) from exc
        try:
            user = self.db.get_user(payload["userId"])
        except NotFound:
            raise InvalidCredentials("unknown user") from None
        if not user.is_activated:
            raise AccountNotActivated("account deactivated")
        return user

    def _require(self, actor: UserRecord, action: PermissionAction) -> None:
        if not authorize(actor.role, action):
            raise PermissionDenied(f"{actor.role.value} may not {action.value}")

    # -- user administration ---------------------------------------------
    def activate_user(self, actor: UserRecord, user_id: str) -> UserRecord:
        self._require(actor, PermissionAction.ADD_USER)
        user = self.db.get_user(user_id)
        user.is_activated = True
        return self.db.save_user(user)

    def list_users(self, actor: UserRecord) -> list[UserRecord]:
        self._require(actor, PermissionAction.ADD_USER)
        return self.db.list_users()

    def delete_user(self, actor: UserRecord, user_id: str) -> None:
        self._require(actor, PermissionAction.DELETE_USER)
        self.db.delete_user(user_id)

    def create_admin(self, email: str, display_name: str, password: str) -> UserRecord:
        """Bootstrap path used by the CLI only; bypasses role checks."""
        check_password_strength(password)
        user = UserRecord(
            id=str(uuid.uuid4()),
            email=email,
            display_name=display_name,
            password_hash=hash_password(password),
            role=Role.ADMIN,
            is_activated=True,
        )
        return self.db.save_user(user)

    # -- videos ----------------------------------------------------------
    def upload_video(self, actor: UserRecord, data: bytes, name: str) -> VideoRecord:
        self._require(actor, PermissionAction.ADD_VIDEO)
        blob_ref, _, _ = self.db.blobs.put(data)
        video_id = str(uuid.uuid4())
        frames_dir = os.path.join(self.data_dir, "frames", video_id)
        os.makedirs(frames_dir, exist_ok=True)
        if not self.decoder_cmd:
            raise media.ProbeFailed("no decoder command configured")
        with tempfile.NamedTemporaryFile(delete=False, dir=self.data_dir) as tmp:
            tmp.write(data)
            tmp_path = tmp.name
        try:
            media.run_decoder(self.decoder_cmd, tmp_path, frames_dir)
            info = media.probe_frames(frames_dir)
            thumb = media.make_thumbnail(frames_dir, info["durationMs"])
        finally:
            os.unlink(tmp_path)
        thumb_ref, _, _ = self.db.blobs.put(thumb)
        video = VideoRecord(
            id=video_id,
            name=name,
            duration_ms=info["durationMs"],
            frame_rate=info["frameRate"],
            width=info["width"],
            height=info["height"],
            blob_ref=blob_ref,
            thumbnail_ref=thumb_ref,
            frames_dir=frames_dir,
            uploaded_by=actor.id,
            status=VideoStatus.TO_ANNOTATE,
        )
        return self.db.save_video(video)

    def rename_video(self, actor: UserRecord, video_id: str, *, name=None, status=None) -> VideoRecord:
        self._require(actor, PermissionAction.ADD_VIDEO)
        video = self.db.get_video(video_id)
        if name is not None:
            video.name = name
        if status is not None:
            video.status = VideoStatus(status)
        return self.db.save_video(video)

    def delete_video(self, actor: UserRecord, video_id: str) -> None:
        self._require(actor, PermissionAction.DELETE_VIDEO)
        self.db.get_video(video_id)
        self.db.delete_video(video_id)

    def set_bookmark(self, actor: UserRecord, video_id: str, bookmarked: bool) -> VideoRecord:
        video = self.db.get_video(video_id)
        if bookmarked:
            video.bookmarked_by.add(actor.id)
        else:
            video.bookmarked_by.discard(actor.id)
        return self.db.save_video(video)

    # -- labels ----------------------------------------------------------
    def create_label(self, actor: UserRecord, name: str, color: str, kind: str) -> Label:
        self._require(actor, PermissionAction.ANNOTATE_VIDEO)
        label = Label(id=str(uuid.uuid4()), name=name, color=color, kind=LabelKind(kind))
        self.db.save_label(label)
        return label

    # -- groups ----------------------------------------------------------
    def create_group(self, actor: UserRecord, name: str) -> GroupRecord:
        self._require(actor, PermissionAction.ANNOTATE_VIDEO)
        group = GroupRecord(id=str(uuid.uuid4()), name=name, member_ids={actor.id})
        return self.db.save_group(group)

    def modify_group(self, actor: UserRecord, group_id: str, field: str, value: str, add: bool) -> GroupRecord:
        self._require(actor, PermissionAction.ANNOTATE_VIDEO)
        group = self.db.get_group(group_id)
        target = {
            "videos": group.video_ids,
            "labels": group.label_ids,
            "members": group.member_ids,
        }[field]
        if add:
            if field == "videos":
                self.db.get_video(value)
            elif field == "labels":
                self.db.get_label(value)
            elif field == "members":
                self.db.get_user(value)
            target.add(value)
        else:
            target.discard(value)
        return self.db.save_group(group)

    # -- annotations -----------------------------------------------------
    def _check_group_scope(self, actor: UserRecord, ann: Annotation, label: Label) -> None:
        if ann.group_id is None:
            return
        group = self.db.get_group(ann.group_id)
        if actor.id not in group.member_ids:
            raise PermissionDenied(f"not a member of group {group.name}")
        if label.id not in group.label_ids:
            raise LabelNotInGroupOntology(
                f"label {label.name} is outside the group's ontology subset"
            )
        if ann.video_id not in group.video_ids:
            raise ServiceError(f"video {ann.video_id} is not in group {group.name}")

    def _validated(self, ann: Annotation) -> Label:
        label = self.db.get_label(ann.label_id)
        video = self.db.get_video(ann.video_id)
        violations = validate_annotation(ann, label, video.duration_ms)
        if violations:
            raise ValidationFailed(violations)
        return label

    def create_annotation(
        self,
        actor: UserRecord,
        draft: dict,
        idempotency_key: str | None = None,
    ) -> dict:
        self._require(actor, PermissionAction.ANNOTATE_VIDEO)
        if idempotency_key:
            try:
                existing = self.db.store.get(IDEMPOTENCY, idempotency_key)
                ann, version = self.db.get_annotation(existing["annotationId"])
                return annotation_to_dict(ann, version)
            except NotFound:
                pass
        draft = dict(draft)
        draft.setdefault("id", str(uuid.uuid4()))
        draft["createdBy"] = actor.id
        draft.setdefault("isFalsePositive", False)
        draft.setdefault("groupId", None)
        draft.setdefault("showLabelOnViewer", False)
        ann = annotation_from_dict({**draft, "createdSeq": 0})
        label = self._validated(ann)
        self._check_group_scope(actor, ann, label)
        ann, version = self.db.create_annotation(ann)
        if idempotency_key:
            self.db.store.save(IDEMPOTENCY, {"id": idempotency_key, "annotationId": ann.id})
        payload = annotation_to_dict(ann, version)
        self.hub.publish(EVENT_CREATED, ann.video_id, ann.group_id, payload, actor.id)
        return payload

    PATCHABLE = {"labelId", "startMs", "durationMs", "isFalsePositive",
                 "showLabelOnViewer", "track", "version"}

    def update_annotation(self, actor: UserRecord, ann_id: str, patch: dict) -> dict:
        self._require(actor, PermissionAction.ANNOTATE_VIDEO)
        unknown = set(patch) - self.PATCHABLE
        if unknown:
            raise ServiceError(f"fields not patchable: {sorted(unknown)}")

        from ..store import ANNOTATIONS

        def mutate(txn):
            current = txn.get(ANNOTATIONS, ann_id)
            expected = patch.get("version", current["version"])
            merged = {**current, **{k: v for k, v in patch.items() if k != "version"}}
            merged["version"] = expected
            ann = annotation_from_dict(merged)
            label = self._validated(ann)
            self._check_group_scope(actor, ann, label)
            _, version = txn.save(ANNOTATIONS, annotation_to_dict(ann, expected) | {
                "createdSeq": current["createdSeq"]
            })
            return annotation_to_dict(ann, version) | {"createdSeq": current["createdSeq"]}

        payload = self.db.store.update(mutate)
        self.hub.publish(
            EVENT_UPDATED, payload["videoId"], payload["groupId"], payload, actor.id
        )
        return payload

    def delete_annotation(self, actor: UserRecord, ann_id: str) -> None:
        self._require(actor, PermissionAction.ANNOTATE_VIDEO)
        ann, _ = self.db.get_annotation(ann_id)
        if ann.group_id is not None:
            group = self.db.get_group(ann.group_id)
            if actor.id not in group.member_ids:
                raise PermissionDenied(f"not a member of group {group.name}")
        self.db.delete_annotation(ann_id)
        self.hub.publish(
            EVENT_DELETED, ann.video_id, ann.group_id, {"id": ann.id}, actor.id
        )

    def split(self, actor: UserRecord, ann_id: str, at_ms: int) -> tuple[dict, dict]:
        self._require(actor, PermissionAction.ANNOTATE_VIDEO)
        ann, _ = self.db.get_annotation(ann_id)
        if ann.group_id is not None:
            group = self.db.get_group(ann.group_id)
            if actor.id not in group.member_ids:
                raise PermissionDenied(f"not a member of group {group.name}")
        import dataclasses

        left, right = split_annotation(ann, at_ms)
        left = dataclasses.replace(left, id=str(uuid.uuid4()))
        right = dataclasses.replace(right, id=str(uuid.uuid4()))

        from ..store import ANNOTATIONS

        def mutate(txn):
            txn.delete(ANNOTATIONS, ann_id)
            results = []
            for part in (left, right):
                d = annotation_to_dict(part)
                _, version = txn.save(ANNOTATIONS, d)
                results.append(annotation_to_dict(part, version))
            return results

        left_payload, right_payload = self.db.store.update(mutate)
        channel = (ann.video_id, ann.group_id)
        self.hub.publish(EVENT_DELETED, *channel, {"id": ann.id}, actor.id)
        self.hub.publish(EVENT_CREATED, *channel, left_payload, actor.id)
        self.hub.publish(EVENT_CREATED, *channel, right_payload, actor.id)
        return left_payload, right_payload

    def list_annotations(self, video_id: str, group_id: str | None) -> list[dict]:
        self.db.get_video(video_id)
        anns = self.db.list_annotations(video_id=video_id, group_id=group_id)
        occurrences: dict[str, int] = {}
        for label_id in {a.label_id for a in anns}:
            scoped = [a for a in anns if a.label_id == label_id]
            for o in compute_occurrences(scoped):
                occurrences[o.annotation_id] = o.occurrence
        out = []
        for a in anns:
            _, version = self.db.get_annotation(a.id)
            out.append(annotation_to_dict(a, version) | {"occurrence": occurrences[a.id]})
        return out

    # -- export / import -------------------------------------------------
    def export_annotations(self, video_id: str, group_id: str | None) -> dict:
        video = self.db.get_video(video_id)
        anns = self.db.list_annotations(video_id=video_id, group_id=group_id)
        labels = [self.db.get_label(lid) for lid in sorted({a.label_id for a in anns})]
        doc = export_document(video.name, video.duration_ms, labels, anns)
        return doc.to_json_dict()

    def import_annotations(
        self, actor: UserRecord, video_id: str, doc: dict, group_id: str | None = None
    ) -> list[dict]:
        self._require(actor, PermissionAction.ANNOTATE_VIDEO)
        video = self.db.get_video(video_id)
        result = import_document(
            doc,
            video_id,
            video.duration_ms,
            existing_labels=self.db.list_labels(),
            created_by_fallback=actor.id,
            group_id=group_id,
        )
        for label in result.created_labels:
            self.db.save_label(label)
        payloads = []
        for ann in result.annotations:
            stored, version = self.db.create_annotation(ann)
            payload = annotation_to_dict(stored, version)
            self.hub.publish(EVENT_CREATED, video_id, group_id, payload, actor.id)
            payloads.append(payload)
        return payloads

    # -- tracking jobs ---------------------------------------------------
    def start_track_job(
        self, actor: UserRecord, ann_id: str, stride_ms: int | None = None
    ) -> JobRecord:
        self._require(actor, PermissionAction.ANNOTATE_VIDEO)
        ann, _ = self.db.get_annotation(ann_id)
        label = self.db.get_label(ann.label_id)
        if not label.kind.is_spatial or ann.track is None:
            raise NotStructure(f"annotation {ann_id} is not a structure annotation")
        if self.db.active_job_for(ann_id) is not None:
            raise JobAlreadyActive(f"annotation {ann_id} already has an active job")
        video = self.db.get_video(ann.video_id)
        if not video.frames_dir or not os.path.isdir(video.frames_dir):
            raise ServiceError(f"video {video.id} has no decoded frames")
        job = JobRecord(id=str(uuid.uuid4()), annotation_id=ann_id, state=JobState.QUEUED)
        self.db.save_job(job)

        def work():
            current = self.db.get_job(job.id)
            current.state = JobState.RUNNING
            self.db.save_job(current)
            try:
                source = DirectoryFrameSource(video.frames_dir)
                track, report = run_track_job(source, ann, TrackerParams(), stride_ms)
                from ..store import ANNOTATIONS, JOBS

                def commit(txn):
                    ann_rec = txn.get(ANNOTATIONS, ann_id)
                    updated = annotation_from_dict(ann_rec).with_track(track)
                    _, version = txn.save(
                        ANNOTATIONS,
                        annotation_to_dict(updated, ann_rec["version"])
                        | {"createdSeq": ann_rec["createdSeq"]},
                    )
                    job_rec = txn.get(JOBS, job.id)
                    job_rec["state"] = JobState.DONE.value
                    job_rec["report"] = report.to_dict()
                    txn.save(JOBS, job_rec)
                    return annotation_to_dict(updated, version) | {
                        "createdSeq": ann_rec["createdSeq"]
                    }

                payload = self.db.store.update(commit)
                self.hub.publish(
                    EVENT_UPDATED, ann.video_id, ann.group_id, payload, actor.id
                )
            except Exception as exc:
                failed = self.db.get_job(job.id)
                failed.state = JobState.FAILED
                failed.error = str(exc)
                if isinstance(exc, JobAborted):
                    failed.report = exc.report.to_dict()
                self.db.save_job(failed)

        try:
            self.jobs.submit(ann_id, work)
        except RuntimeError as exc:
            raise JobAlreadyActive(str(exc)) from exc
        return job

    def shutdown(self) -> None:
        self.jobs.shutdown()
