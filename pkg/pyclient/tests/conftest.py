import json
import os
import socket
import subprocess
import sys
import tempfile
import textwrap
import time

import httpx
import pytest

# Stand-in decoder honoring the service's decoder contract; the "video file"
# is a JSON descriptor like {"frames": 25}.
DECODER_SCRIPT = textwrap.dedent(
    """
    import json, os, sys
    src, out = sys.argv[1], sys.argv[2]
    with open(src) as fh:
        spec = json.load(fh)
    os.makedirs(out, exist_ok=True)
    manifest = {"frames": []}
    for i in range(spec.get("frames", 25)):
        row = bytes([60, 60, 60]) * 64
        with open(os.path.join(out, "frame_%06d.ppm" % i), "wb") as fh:
            fh.write(b"P6\\n64 64\\n255\\n")
            fh.write(row * 64)
        manifest["frames"].append({"index": i, "ms": i * 40})
    with open(os.path.join(out, "manifest.json"), "w") as fh:
        json.dump(manifest, fh)
    """
)

ADMIN_EMAIL = "admin@example.org"
ADMIN_PASSWORD = "correct-horse-battery"


def _free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


@pytest.fixture(scope="session")
def server():
    """A real service instance in a subprocess; the SDK talks pure HTTP."""
    with tempfile.TemporaryDirectory() as tmp:
        decoder = os.path.join(tmp, "decoder.py")
        with open(decoder, "w") as fh:
            fh.write(DECODER_SCRIPT)
        env = dict(
            os.environ,
            DATA_DIR=os.path.join(tmp, "data"),
            AUTH_TOKEN_SECRET="sdk-test-secret",
            DECODER_CMD=f"{sys.executable} {decoder} {{input}} {{output_dir}}",
        )
        cli = [sys.executable, "-m", "vidannot.api.cli"]
        subprocess.run(
            cli + ["create-admin", "--email", ADMIN_EMAIL, "--password", ADMIN_PASSWORD],
            env=env, check=True, capture_output=True,
        )
        port = _free_port()
        proc = subprocess.Popen(
            cli + ["serve", "--port", str(port), "--host", "127.0.0.1"],
            env=env, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL,
        )
        base_url = f"http://127.0.0.1:{port}"
        deadline = time.time() + 20
        while time.time() < deadline:
            try:
                httpx.get(base_url + "/api/v1/videos", timeout=1.0)
                break
            except httpx.TransportError:
                time.sleep(0.1)
        else:
            proc.terminate()
            raise RuntimeError("service did not come up")
        try:
            yield base_url
        finally:
            proc.terminate()
            proc.wait(timeout=10)


@pytest.fixture
def admin(server):
    from vidannot_client import ClientSession

    with ClientSession(server, email=ADMIN_EMAIL, password=ADMIN_PASSWORD) as session:
        yield session


@pytest.fixture
def annotator(server, admin):
    from vidannot_client import ClientSession

    email = "annotator@example.org"
    existing = [u for u in admin.list_users() if u["email"] == email]
    if not existing:
        httpx.post(server + "/api/v1/auth/signup", json={
            "email": email, "displayName": "Ann", "password": "longenough1",
        }).raise_for_status()
        user = next(u for u in admin.list_users() if u["email"] == email)
        admin.activate_user(user["id"])
    with ClientSession(server, email=email, password="longenough1") as session:
        yield session


@pytest.fixture
def video_file(tmp_path):
    path = tmp_path / "clip.json"
    path.write_text(json.dumps({"frames": 25}))
    return str(path)
