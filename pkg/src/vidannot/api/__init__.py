"""HTTP service, authentication, role enforcement and the admin CLI."""

from .app import AppConfig, create_app, create_service
from .auth import InvalidToken, TokenSigner, WeakPassword, hash_password, verify_password
from .rbac import ROLE_PERMISSIONS, PermissionAction, authorize
from .service import (
    AccountNotActivated,
    EmailTaken,
    InvalidCredentials,
    JobAlreadyActive,
    LabelNotInGroupOntology,
    NotStructure,
    PermissionDenied,
    Service,
    ServiceError,
    ValidationFailed,
)

__all__ = [
    "AccountNotActivated",
    "AppConfig",
    "EmailTaken",
    "InvalidCredentials",
    "InvalidToken",
    "JobAlreadyActive",
    "LabelNotInGroupOntology",
    "NotStructure",
    "PermissionAction",
    "PermissionDenied",
    "ROLE_PERMISSIONS",
    "Service",
    "ServiceError",
    "TokenSigner",
    "ValidationFailed",
    "WeakPassword",
    "authorize",
    "create_app",
    "create_service",
    "hash_password",
    "verify_password",
]
