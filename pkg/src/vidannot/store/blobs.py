"""Content-addressed blob storage under {data_dir}/blobs/<sha2>/<sha256>."""

from __future__ import annotations

import hashlib
import os
import tempfile
from typing import BinaryIO, Iterable


class BlobMissing(Exception):
    pass


class BlobStore:
    def __init__(self, root: str):
        self._root = os.path.join(root, "blobs")
        os.makedirs(self._root, exist_ok=True)

    def _path(self, ref: str) -> str:
        return os.path.join(self._root, ref[:2], ref)

    def put(self, data: bytes | BinaryIO) -> tuple[str, str, int]:
        """Store bytes; returns (blobRef, sha256 hex, size). Identical bytes
        always map to the same ref and are stored once."""
        digest = hashlib.sha256()
        fd, tmp = tempfile.mkstemp(dir=self._root)
        size = 0
        try:
            with os.fdopen(fd, "wb") as out:
                if isinstance(data, bytes):
                    chunks: Iterable[bytes] = [data]
                else:
                    chunks = iter(lambda: data.read(1 << 20), b"")
                for chunk in chunks:
                    digest.update(chunk)
                    out.write(chunk)
                    size += len(chunk)
                out.flush()
                os.fsync(out.fileno())
            ref = digest.hexdigest()
            path = self._path(ref)
            if os.path.exists(path):
                os.unlink(tmp)
            else:
                os.makedirs(os.path.dirname(path), exist_ok=True)
                os.replace(tmp, path)
            return ref, ref, size
        except Exception:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def get(self, ref: str) -> bytes:
        try:
            with open(self._path(ref), "rb") as fh:
                return fh.read()
        except FileNotFoundError:
            raise BlobMissing(ref) from None

    def open(self, ref: str) -> BinaryIO:
        try:
            return open(self._path(ref), "rb")
        except FileNotFoundError:
            raise BlobMissing(ref) from None

    def size(self, ref: str) -> int:
        try:
            return os.path.getsize(self._path(ref))
        except FileNotFoundError:
            raise BlobMissing(ref) from None

    def exists(self, ref: str) -> bool:
        return os.path.exists(self._path(ref))
