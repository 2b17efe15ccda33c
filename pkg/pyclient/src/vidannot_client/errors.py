"""Typed exceptions mirroring the service's error envelope."""

from __future__ import annotations


class ClientError(Exception):
    """Base for every error raised by the SDK."""


class TransportError(ClientError):
    """The server could not be reached after exhausting retries."""


class ApiError(ClientError):
    """Non-2xx response; carries the server's error code verbatim."""

    def __init__(self, status: int, code: str, message: str):
        super().__init__(f"{code} ({status}): {message}")
        self.status = status
        self.code = code
        self.detail = message


class AuthenticationFailed(ApiError):
    """401 that could not be repaired by re-login."""


class PermissionDeniedError(ApiError):
    """403: the account's role does not allow this action."""


class NotFoundError(ApiError):
    """404: unknown resource id."""


class ConflictError(ApiError):
    """409: version conflict, duplicate, or an already-active job."""


class ValidationError(ApiError):
    """400: the request was understood but rejected (spans, formats...)."""


class IntegrityError(ClientError):
    """Server-echoed content hash does not match the local file."""


def error_for(status: int, code: str, message: str) -> ApiError:
    if status == 401:
        return AuthenticationFailed(status, code, message)
    if status == 403:
        return PermissionDeniedError(status, code, message)
    if status == 404:
        return NotFoundError(status, code, message)
    if status == 409:
        return ConflictError(status, code, message)
    if status == 400:
        return ValidationError(status, code, message)
    return ApiError(status, code, message)
