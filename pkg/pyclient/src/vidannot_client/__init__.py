"""Scripting SDK for the vidannot annotation service."""

from .errors import (
    ApiError,
    AuthenticationFailed,
    ClientError,
    ConflictError,
    IntegrityError,
    NotFoundError,
    PermissionDeniedError,
    TransportError,
    ValidationError,
)
from .session import ClientSession

__all__ = [
    "ApiError",
    "AuthenticationFailed",
    "ClientError",
    "ClientSession",
    "ConflictError",
    "IntegrityError",
    "NotFoundError",
    "PermissionDeniedError",
    "TransportError",
    "ValidationError",
]

__version__ = "0.1.0"
