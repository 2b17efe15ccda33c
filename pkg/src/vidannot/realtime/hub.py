"""Per-video event hub: channel subscriptions, total ordering of annotation
lifecycle events, and fan-out to live consumers.

The channel key is (videoId, groupId-or-None); sequence numbers are
assigned atomically per channel so every subscriber observes a gap-free,
strictly increasing stream. Slow consumers are buffered up to a fixed
number of events, then marked for disconnect (close code 4001, resync
required).
"""

from __future__ import annotations

import queue
import threading
from dataclasses import dataclass, field

EVENT_CREATED = "annotation.created"
EVENT_UPDATED = "annotation.updated"
EVENT_DELETED = "annotation.deleted"

RESYNC_REQUIRED_CLOSE_CODE = 4001
SUBSCRIBER_BUFFER = 1024


@dataclass(frozen=True)
class AnnotationEvent:
    seq: int
    type: str  # EVENT_CREATED / EVENT_UPDATED / EVENT_DELETED
    video_id: str
    group_id: str | None
    payload: dict  # full annotation, or {"id": ...} for deletions
    origin_user_id: str

    def to_dict(self) -> dict:
        return {
            "type": self.type,
            "seq": self.seq,
            "videoId": self.video_id,
            "groupId": self.group_id,
            "originUserId": self.origin_user_id,
            "payload": self.payload,
        }


@dataclass
class Subscription:
    video_id: str
    group_id: str | None
    events: queue.Queue = field(
        default_factory=lambda: queue.Queue(maxsize=SUBSCRIBER_BUFFER)
    )
    overflowed: bool = False
    closed: bool = False


class EventHub:
    def __init__(self):
        self._lock = threading.Lock()
        self._seq: dict[tuple[str, str | None], int] = {}
        self._subs: dict[tuple[str, str | None], list[Subscription]] = {}

    def subscribe(self, video_id: str, group_id: str | None = None) -> tuple[Subscription, int]:
        """Attach a subscriber; returns (subscription, seq at attach time).
        Every event with a larger seq will be delivered."""
        key = (video_id, group_id)
        sub = Subscription(video_id=video_id, group_id=group_id)
        with self._lock:
            self._subs.setdefault(key, []).append(sub)
            return sub, self._seq.get(key, 0)

    def unsubscribe(self, sub: Subscription) -> None:
        key = (sub.video_id, sub.group_id)
        with self._lock:
            sub.closed = True
            subs = self._subs.get(key, [])
            if sub in subs:
                subs.remove(sub)

    def publish(
        self,
        event_type: str,
        video_id: str,
        group_id: str | None,
        payload: dict,
        origin_user_id: str,
    ) -> int:
        """Assign the next channel seq and fan out; returns the seq.

        Must be called only after the corresponding store transaction has
        committed, so subscribers never observe ghost events.
        """
        key = (video_id, group_id)
        with self._lock:
            seq = self._seq.get(key, 0) + 1
            self._seq[key] = seq
            event = AnnotationEvent(
                seq=seq,
                type=event_type,
                video_id=video_id,
                group_id=group_id,
                payload=payload,
                origin_user_id=origin_user_id,
            )
            for sub in list(self._subs.get(key, [])):
                if sub.overflowed:
                    continue
                try:
                    sub.events.put_nowait(event)
                except queue.Full:
                    sub.overflowed = True
        return seq

    def latest_seq(self, video_id: str, group_id: str | None = None) -> int:
        with self._lock:
            return self._seq.get((video_id, group_id), 0)
