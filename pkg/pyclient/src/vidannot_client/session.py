"""Authenticated convenience wrapper over the annotation service REST API.

Every SDK call maps onto the documented REST endpoints; there is no side
channel. A recording hook (`on_request`) exists so tests can assert exactly
that.
"""

from __future__ import annotations

import hashlib
import os
import time
from typing import Any, Callable, Iterator

import httpx

from .errors import (
    AuthenticationFailed,
    IntegrityError,
    TransportError,
    error_for,
)

RETRY_ATTEMPTS = 3
RETRY_BASE_DELAY = 0.2
RETRYABLE_STATUS = frozenset({502, 503, 504})


class ClientSession:
    """One authenticated session against a service instance.

    Transient transport failures and gateway errors are retried up to
    RETRY_ATTEMPTS times with exponential backoff. A 401 triggers a single
    re-login per call chain (credentials permitting) before surfacing.
    """

    def __init__(
        self,
        base_url: str,
        email: str | None = None,
        password: str | None = None,
        token: str | None = None,
        on_request: Callable[[str, str], None] | None = None,
        transport: httpx.BaseTransport | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self._email = email
        self._password = password
        self.token = token
        self._on_request = on_request
        self._http = httpx.Client(
            base_url=self.base_url + "/api/v1",
            timeout=30.0,
            transport=transport,
        )
        if token is None and email is not None:
            self.login()

    def close(self) -> None:
        self._http.close()

    def __enter__(self) -> "ClientSession":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- plumbing ---------------------------------------------------------

    def login(self) -> None:
        if self._email is None or self._password is None:
            raise AuthenticationFailed(401, "NoCredentials", "no credentials to log in with")
        body = self._call("POST", "/auth/login", json={
            "email": self._email, "password": self._password,
        }, authenticated=False).json()
        self.token = body["token"]

    def _call(
        self,
        method: str,
        path: str,
        *,
        authenticated: bool = True,
        relogin_allowed: bool = True,
        **kwargs: Any,
    ) -> httpx.Response:
        if self._on_request is not None:
            self._on_request(method, path)
        headers = dict(kwargs.pop("headers", {}))
        if authenticated and self.token is not None:
            headers["Authorization"] = f"Bearer {self.token}"
        last_exc: Exception | None = None
        for attempt in range(RETRY_ATTEMPTS):
            try:
                resp = self._http.request(method, path, headers=headers, **kwargs)
            except httpx.TransportError as exc:
                last_exc = exc
                time.sleep(RETRY_BASE_DELAY * (2**attempt))
                continue
            if resp.status_code in RETRYABLE_STATUS:
                last_exc = error_for(resp.status_code, "Upstream", resp.text)
                time.sleep(RETRY_BASE_DELAY * (2**attempt))
                continue
            if resp.status_code == 401 and authenticated and relogin_allowed \
                    and self._email is not None:
                self.login()
                return self._call(method, path, authenticated=True,
                                  relogin_allowed=False, headers=headers, **kwargs)
            if resp.status_code >= 400:
                try:
                    detail = resp.json()
                    code = detail.get("error", "HttpError")
                    message = detail.get("message", resp.text)
                except ValueError:
                    code, message = "HttpError", resp.text
                raise error_for(resp.status_code, code, message)
            return resp
        raise TransportError(f"{method} {path} failed after {RETRY_ATTEMPTS} attempts: {last_exc}")

    # -- videos -----------------------------------------------------------

    def upload_video(self, path: str, name: str) -> dict:
        """Multipart upload; verifies the server-echoed content hash against
        the local file before returning the video record."""
        with open(path, "rb") as fh:
            data = fh.read()
        local_sha = hashlib.sha256(data).hexdigest()
        video = self._call(
            "POST", "/videos",
            files={"file": (os.path.basename(path), data)},
            data={"name": name},
        ).json()
        if video.get("blobRef") != local_sha:
            raise IntegrityError(
                f"server stored {video.get('blobRef')}, local file is {local_sha}"
            )
        return video

    def get_videos(self, page: int = 1, page_size: int = 50, **filters: str) -> dict:
        params = {"page": page, "pageSize": page_size, **filters}
        return self._call("GET", "/videos", params=params).json()

    def iter_videos(self, page_size: int = 50, **filters: str) -> Iterator[dict]:
        """Generator over every matching video, fetching pages on demand."""
        page = 1
        while True:
            body = self.get_videos(page=page, page_size=page_size, **filters)
            yield from body["items"]
            if page * page_size >= body["total"] or not body["items"]:
                return
            page += 1

    def delete_video(self, video_id: str) -> None:
        self._call("DELETE", f"/videos/{video_id}")

    # -- users ------------------------------------------------------------

    def list_users(self) -> list[dict]:
        return self._call("GET", "/users").json()

    def activate_user(self, user_id: str) -> dict:
        return self._call("POST", f"/users/{user_id}/activate").json()

    # -- labels and annotations -------------------------------------------

    def create_label(self, name: str, color: str, kind: str) -> dict:
        return self._call("POST", "/labels", json={
            "name": name, "color": color, "kind": kind,
        }).json()

    def list_labels(self) -> list[dict]:
        return self._call("GET", "/labels").json()

    def list_annotations(self, video_id: str, group_id: str | None = None) -> list[dict]:
        params = {"groupId": group_id} if group_id else {}
        return self._call("GET", f"/videos/{video_id}/annotations", params=params).json()

    def create_annotation(self, draft: dict) -> dict:
        return self._call("POST", "/annotations", json=draft).json()

    def delete_annotation(self, annotation_id: str) -> None:
        self._call("DELETE", f"/annotations/{annotation_id}")

    # -- export / import --------------------------------------------------

    def export_annotations(self, video_id: str, group_id: str | None = None) -> dict:
        return self._call("GET", *self._export_route(video_id, group_id)).json()

    def export_annotations_raw(self, video_id: str, group_id: str | None = None) -> bytes:
        """Byte-faithful export body, exactly as the HTTP endpoint sends it."""
        return self._call("GET", *self._export_route(video_id, group_id)).content

    @staticmethod
    def _export_route(video_id: str, group_id: str | None):
        path = f"/videos/{video_id}/annotations/export"
        if group_id:
            path += f"?groupId={group_id}"
        return (path,)

    def import_annotations(self, video_id: str, doc: dict,
                           group_id: str | None = None) -> list[dict]:
        params = {"groupId": group_id} if group_id else {}
        return self._call(
            "POST", f"/videos/{video_id}/annotations/import", json=doc, params=params
        ).json()
