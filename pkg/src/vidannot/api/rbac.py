"""Role-based permission matrix.

Three roles, five actions; admins hold every permission, moderators manage
videos and annotate, annotators only annotate.
"""

from __future__ import annotations

from enum import Enum

from ..store.records import Role


class PermissionAction(str, Enum):
    ANNOTATE_VIDEO = "annotate_video"
    ADD_VIDEO = "add_video"
    DELETE_VIDEO = "delete_video"
    ADD_USER = "add_user"
    DELETE_USER = "delete_user"


ROLE_PERMISSIONS: dict[Role, frozenset[PermissionAction]] = {
    Role.ADMIN: frozenset(PermissionAction),
    Role.MODERATOR: frozenset(
        {
            PermissionAction.ANNOTATE_VIDEO,
            PermissionAction.ADD_VIDEO,
            PermissionAction.DELETE_VIDEO,
        }
    ),
    Role.ANNOTATOR: frozenset({PermissionAction.ANNOTATE_VIDEO}),
}


def authorize(role: Role, action: PermissionAction) -> bool:
    return action in ROLE_PERMISSIONS[role]
