"""Durable persistence: transactional record store, content-addressed blobs,
and the typed database facade."""

from .backend import FileStore, NotFound, Store, StoreError, Transaction, VersionConflict
from .blobs import BlobMissing, BlobStore
from .database import (
    ANNOTATIONS,
    Database,
    DuplicateEmail,
    DuplicateLabel,
    GROUPS,
    JOBS,
    LABELS,
    LabelInUse,
    USERS,
    VIDEOS,
)
from .records import (
    GroupRecord,
    JobRecord,
    JobState,
    Role,
    UserRecord,
    VideoRecord,
    VideoStatus,
    annotation_from_dict,
    annotation_to_dict,
    label_from_dict,
    label_to_dict,
)

__all__ = [
    "ANNOTATIONS",
    "BlobMissing",
    "BlobStore",
    "Database",
    "DuplicateEmail",
    "DuplicateLabel",
    "FileStore",
    "GROUPS",
    "GroupRecord",
    "JOBS",
    "JobRecord",
    "JobState",
    "LABELS",
    "LabelInUse",
    "NotFound",
    "Role",
    "Store",
    "StoreError",
    "Transaction",
    "USERS",
    "UserRecord",
    "VIDEOS",
    "VersionConflict",
    "VideoRecord",
    "VideoStatus",
    "annotation_from_dict",
    "annotation_to_dict",
    "label_from_dict",
    "label_to_dict",
]
