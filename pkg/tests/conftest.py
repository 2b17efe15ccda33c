import json
import os
import sys
import textwrap

import pytest
from fastapi.testclient import TestClient

from vidannot.api import AppConfig, create_app, create_service
from vidannot.store import Role

sys.path.insert(0, os.path.dirname(__file__))

# Stand-in decoder: treats the "video file" as a JSON descriptor and renders
# synthetic PPM frames plus the manifest, like a real decoder command would.
DECODER_SCRIPT = textwrap.dedent(
    """
    import json, os, sys
    import numpy as np

    src, out = sys.argv[1], sys.argv[2]
    with open(src) as fh:
        spec = json.load(fh)
    n = spec.get("frames", 50)
    period = spec.get("periodMs", 40)
    speed = spec.get("speed", 2.0)
    size = spec.get("size", 64)
    rng = np.random.default_rng(spec.get("seed", 0)) if spec.get("noisy", True) else None
    cx, cy, vx = 12.0, size / 2, speed
    os.makedirs(out, exist_ok=True)
    manifest = {"frames": []}
    for i in range(n):
        img = np.full((size, size), 60.0)
        x0, x1 = int(round(cx - 8)), int(round(cx + 8))
        y0, y1 = int(round(cy - 8)), int(round(cy + 8))
        img[max(0, y0):max(0, y1), max(0, x0):max(0, x1)] = 220
        if rng is not None:
            img = img + rng.integers(-5, 6, size=img.shape)
        gray = np.clip(img, 0, 255).astype(np.uint8)
        rgb = np.stack([gray, gray, gray], axis=-1)
        with open(os.path.join(out, "frame_%06d.ppm" % i), "wb") as fh:
            fh.write(b"P6\\n%d %d\\n255\\n" % (size, size))
            fh.write(rgb.tobytes())
        manifest["frames"].append({"index": i, "ms": round(i * period)})
        cx += vx
        if cx > size - 12 or cx < 12:
            vx = -vx
    with open(os.path.join(out, "manifest.json"), "w") as fh:
        json.dump(manifest, fh)
    """
)


def video_descriptor(frames=50, period_ms=40, speed=2.0, seed=0, noisy=True) -> bytes:
    return json.dumps(
        {"frames": frames, "periodMs": period_ms, "speed": speed,
         "seed": seed, "noisy": noisy}
    ).encode()


@pytest.fixture
def decoder_cmd(tmp_path):
    script = tmp_path / "decoder.py"
    script.write_text(DECODER_SCRIPT)
    return f"{sys.executable} {script} {{input}} {{output_dir}}"


@pytest.fixture
def service(tmp_path, decoder_cmd):
    cfg = AppConfig(
        data_dir=str(tmp_path / "data"),
        token_secret="test-secret",
        decoder_cmd=decoder_cmd,
        tracker_workers=2,
        in_memory=True,
    )
    os.makedirs(cfg.data_dir, exist_ok=True)
    svc = create_service(cfg)
    yield svc
    svc.shutdown()


@pytest.fixture
def app(service, tmp_path, decoder_cmd):
    cfg = AppConfig(
        data_dir=str(tmp_path / "data"),
        token_secret="test-secret",
        decoder_cmd=decoder_cmd,
        in_memory=True,
    )
    return create_app(cfg, service=service)


@pytest.fixture
def client(app):
    with TestClient(app) as c:
        yield c


class Actors:
    """Convenience bundle: one activated user per role, plus login helpers."""

    def __init__(self, service, client):
        self.service = service
        self.client = client
        self.tokens = {}
        for role in (Role.ADMIN, Role.MODERATOR, Role.ANNOTATOR):
            email = f"{role.value}@example.org"
            if role is Role.ADMIN:
                service.create_admin(email, role.value.title(), "hunter2hunter2")
            else:
                user = service.signup(email, role.value.title(), "hunter2hunter2")
                user.role = role
                user.is_activated = True
                service.db.save_user(user)
            resp = client.post(
                "/api/v1/auth/login",
                json={"email": email, "password": "hunter2hunter2"},
            )
            assert resp.status_code == 200, resp.text
            self.tokens[role] = resp.json()["token"]

    def headers(self, role: Role) -> dict:
        return {"Authorization": f"Bearer {self.tokens[role]}"}


@pytest.fixture
def actors(service, client):
    return Actors(service, client)


@pytest.fixture
def uploaded_video(client, actors):
    resp = client.post(
        "/api/v1/videos",
        files={"file": ("synthetic.json", video_descriptor(frames=50))},
        data={"name": "Cholecystectomy_01"},
        headers=actors.headers(Role.MODERATOR),
    )
    assert resp.status_code == 201, resp.text
    return resp.json()
