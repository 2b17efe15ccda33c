"""Realtime fan-out of annotation lifecycle events."""

from .hub import (
    EVENT_CREATED,
    EVENT_DELETED,
    EVENT_UPDATED,
    RESYNC_REQUIRED_CLOSE_CODE,
    SUBSCRIBER_BUFFER,
    AnnotationEvent,
    EventHub,
    Subscription,
)

__all__ = [
    "AnnotationEvent",
    "EVENT_CREATED",
    "EVENT_DELETED",
    "EVENT_UPDATED",
    "EventHub",
    "RESYNC_REQUIRED_CLOSE_CODE",
    "SUBSCRIBER_BUFFER",
    "Subscription",
]
