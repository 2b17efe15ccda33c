"""Password hashing (scrypt) and signed bearer session tokens."""

from __future__ import annotations

import base64
import hashlib
import hmac
import json
import os
import time

SCRYPT_N = 2**14
SCRYPT_R = 8
SCRYPT_P = 1
TOKEN_TTL_SECONDS = 12 * 3600
MIN_PASSWORD_LENGTH = 10


class InvalidToken(Exception):
    pass


class WeakPassword(Exception):
    pass


def check_password_strength(password: str) -> None:
    if len(password) < MIN_PASSWORD_LENGTH:
        raise WeakPassword(f"password must be at least {MIN_PASSWORD_LENGTH} characters")


def hash_password(password: str) -> str:
    salt = os.urandom(16)
    digest = hashlib.scrypt(
        password.encode(), salt=salt, n=SCRYPT_N, r=SCRYPT_R, p=SCRYPT_P
    )
    return "scrypt$%d$%d$%d$%s$%s" % (
        SCRYPT_N, SCRYPT_R, SCRYPT_P,
        base64.b64encode(salt).decode(),
        base64.b64encode(digest).decode(),
    )


def verify_password(password: str, stored: str) -> bool:
    try:
        scheme, n, r, p, salt_b64, digest_b64 = stored.split("$")
        if scheme != "scrypt":
            return False
        digest = hashlib.scrypt(
            password.encode(),
            salt=base64.b64decode(salt_b64),
            n=int(n), r=int(r), p=int(p),
        )
        return hmac.compare_digest(digest, base64.b64decode(digest_b64))
    except (ValueError, TypeError):
        return False


def _b64(data: bytes) -> str:
    return base64.urlsafe_b64encode(data).rstrip(b"=").decode()


def _unb64(data: str) -> bytes:
    return base64.urlsafe_b64decode(data + "=" * (-len(data) % 4))


class TokenSigner:
    """HMAC-SHA256 signed tokens carrying user id, role and expiry."""

    def __init__(self, secret: str, ttl_seconds: int = TOKEN_TTL_SECONDS):
        self._key = secret.encode()
        self._ttl = ttl_seconds

    def issue(self, user_id: str, role: str, now: float | None = None) -> str:
        now = time.time() if now is None else now
        payload = json.dumps(
            {"userId": user_id, "role": role, "exp": int(now + self._ttl)},
            separators=(",", ":"),
        ).encode()
        body = _b64(payload)
        sig = _b64(hmac.new(self._key, body.encode(), hashlib.sha256).digest())
        return f"{body}.{sig}"

    def verify(self, token: str, now: float | None = None) -> dict:
        now = time.time() if now is None else now
        try:
            body, sig = token.split(".")
            expected = hmac.new(self._key, body.encode(), hashlib.sha256).digest()
            if not hmac.compare_digest(expected, _unb64(sig)):
                raise InvalidToken("bad signature")
            payload = json.loads(_unb64(body))
        except (ValueError, json.JSONDecodeError):
            raise InvalidToken("malformed token") from None
        if payload.get("exp", 0) < now:
            raise InvalidToken("token expired")
        return payload
