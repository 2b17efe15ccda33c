"""Transactional record storage with optimistic versioning.

Two backends share one interface: an in-memory store for tests and a
single-file JSON store for deployment. Commits on the file backend are
atomic (temp file + fsync + rename), so an interrupted transaction never
leaves a partially visible state.
"""

from __future__ import annotations

import copy
import json
import os
import threading
from typing import Any, Callable, Iterator


class StoreError(Exception):
    pass


class NotFound(StoreError):
    pass


class VersionConflict(StoreError):
    pass


Record = dict[str, Any]


class Transaction:
    """Mutation buffer applied atomically on commit.

    Reads see committed state overlaid with the transaction's own writes.
    """

    def __init__(self, store: "Store"):
        self._store = store
        self._writes: dict[tuple[str, str], Record | None] = {}  # None = delete

    def get(self, collection: str, record_id: str) -> Record:
        key = (collection, record_id)
        if key in self._writes:
            rec = self._writes[key]
            if rec is None:
                raise NotFound(f"{collection}/{record_id}")
            return copy.deepcopy(rec)
        return self._store._committed_get(collection, record_id)

    def list(self, collection: str) -> list[Record]:
        records = {r["id"]: r for r in self._store._committed_list(collection)}
        for (coll, rid), rec in self._writes.items():
            if coll != collection:
                continue
            if rec is None:
                records.pop(rid, None)
            else:
                records[rid] = copy.deepcopy(rec)
        return list(records.values())

    def save(self, collection: str, record: Record) -> tuple[str, int]:
        record = copy.deepcopy(record)
        rid = record["id"]
        current = None
        try:
            current = self.get(collection, rid)
        except NotFound:
            pass
        if current is None:
            if record.get("version") not in (None, 0):
                raise VersionConflict(
                    f"{collection}/{rid}: record does not exist at version "
                    f"{record.get('version')}"
                )
            record["version"] = 1
        else:
            if record.get("version") != current["version"]:
                raise VersionConflict(
                    f"{collection}/{rid}: stale version {record.get('version')}, "
                    f"current {current['version']}"
                )
            record["version"] = current["version"] + 1
        self._writes[(collection, rid)] = record
        return rid, record["version"]

    def delete(self, collection: str, record_id: str) -> None:
        self.get(collection, record_id)  # NotFound check
        self._writes[(collection, record_id)] = None


class Store:
    """Uniform record CRUD over named collections, with transactions."""

    def __init__(self):
        self._lock = threading.RLock()
        self._data: dict[str, dict[str, Record]] = {}

    # -- committed-state access ------------------------------------------
    def _committed_get(self, collection: str, record_id: str) -> Record:
        with self._lock:
            try:
                return copy.deepcopy(self._data[collection][record_id])
            except KeyError:
                raise NotFound(f"{collection}/{record_id}") from None

    def _committed_list(self, collection: str) -> list[Record]:
        with self._lock:
            return copy.deepcopy(list(self._data.get(collection, {}).values()))

    # -- public API ------------------------------------------------------
    def get(self, collection: str, record_id: str) -> Record:
        return self._committed_get(collection, record_id)

    def list(self, collection: str) -> list[Record]:
        return self._committed_list(collection)

    def save(self, collection: str, record: Record) -> tuple[str, int]:
        return self.update(lambda txn: txn.save(collection, record))

    def delete(self, collection: str, record_id: str) -> None:
        self.update(lambda txn: txn.delete(collection, record_id))

    def update(self, mutate: Callable[[Transaction], Any]) -> Any:
        """Run mutate inside a transaction and commit atomically."""
        with self._lock:
            txn = Transaction(self)
            result = mutate(txn)
            self._apply(txn._writes)
            return result

    def _apply(self, writes: dict[tuple[str, str], Record | None]) -> None:
        if not writes:
            return
        staged = copy.deepcopy(self._data)
        for (collection, rid), rec in writes.items():
            table = staged.setdefault(collection, {})
            if rec is None:
                table.pop(rid, None)
            else:
                table[rid] = rec
        self._persist(staged)
        self._data = staged

    def _persist(self, staged: dict[str, dict[str, Record]]) -> None:
        pass  # memory backend keeps nothing durable

    def close(self) -> None:
        pass


class FileStore(Store):
    """Store persisted as one JSON file, rewritten atomically per commit."""

    def __init__(self, path: str):
        super().__init__()
        self._path = path
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        if os.path.exists(path):
            with open(path, "r", encoding="utf-8") as fh:
                self._data = json.load(fh)

    def _persist(self, staged) -> None:
        tmp = self._path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(staged, fh)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, self._path)
