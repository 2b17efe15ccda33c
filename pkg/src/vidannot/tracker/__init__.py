"""Correlation-filter box tracking: frame input, the tracker itself, and the
job runner that augments an annotation's track."""

from .frames import (
    DirectoryFrameSource,
    Frame,
    FrameSourceGap,
    read_ppm,
    write_frame_dir,
    write_ppm,
)
from .jobs import JobAborted, JobRunner, TrackJobReport, run_track_job
from .kcf import (
    SeedOutsideFrame,
    TrackerParams,
    TrackerState,
    extract_patch,
    gaussian_kernel_response,
    kcf_init,
    kcf_step,
)

__all__ = [
    "DirectoryFrameSource",
    "Frame",
    "FrameSourceGap",
    "JobAborted",
    "JobRunner",
    "SeedOutsideFrame",
    "TrackJobReport",
    "TrackerParams",
    "TrackerState",
    "extract_patch",
    "gaussian_kernel_response",
    "kcf_init",
    "kcf_step",
    "read_ppm",
    "run_track_job",
    "write_frame_dir",
    "write_ppm",
]
