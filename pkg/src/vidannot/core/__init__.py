"""Pure annotation domain model: types, interpolation, split, occurrence
numbering, validation and the export/import document format."""

from .errors import (
    DomainError,
    DurationMismatch,
    EmptyTrack,
    InvalidSplitPoint,
    MixedScope,
    OutOfSpan,
    UnknownFormatVersion,
)
from .models import (
    Annotation,
    BoundingBox,
    BoxTrack,
    Keyframe,
    Label,
    LabelKind,
    OccurrenceAssignment,
)
from .ops import (
    compute_occurrences,
    insert_keyframe,
    interpolate_box,
    split_annotation,
    validate_annotation,
)
from .transfer import (
    ExportDocument,
    ImportResult,
    export_document,
    import_document,
)

__all__ = [
    "Annotation",
    "BoundingBox",
    "BoxTrack",
    "DomainError",
    "DurationMismatch",
    "EmptyTrack",
    "ExportDocument",
    "ImportResult",
    "InvalidSplitPoint",
    "Keyframe",
    "Label",
    "LabelKind",
    "MixedScope",
    "OccurrenceAssignment",
    "OutOfSpan",
    "UnknownFormatVersion",
    "compute_occurrences",
    "export_document",
    "import_document",
    "insert_keyframe",
    "interpolate_box",
    "split_annotation",
    "validate_annotation",
]
