"""Admin command line: serve the API and manage users/videos/annotations
directly against the data directory."""

from __future__ import annotations

import json
import os
import sys

import click

from .app import AppConfig, create_app, create_service


def config_from_env(**overrides) -> AppConfig:
    cfg = AppConfig(
        data_dir=os.environ.get("DATA_DIR", "./data"),
        token_secret=os.environ.get("AUTH_TOKEN_SECRET", ""),
        decoder_cmd=os.environ.get("DECODER_CMD"),
        tracker_workers=int(os.environ.get("TRACKER_WORKERS", "2")),
    )
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    if not cfg.token_secret:
        click.echo("warning: AUTH_TOKEN_SECRET not set, using an ephemeral secret", err=True)
        cfg.token_secret = os.urandom(32).hex()
    return cfg


@click.group()
def main():
    """Collaborative video annotation service."""


@main.command()
@click.option("--port", default=lambda: int(os.environ.get("APP_PORT", "8080")), type=int)
@click.option("--host", default="0.0.0.0")
def serve(port: int, host: str):
    """Run the HTTP service."""
    import uvicorn

    app = create_app(config_from_env())
    uvicorn.run(app, host=host, port=port)


@main.command("create-admin")
@click.option("--email", required=True)
@click.option("--password", required=True)
@click.option("--name", default="Administrator")
def create_admin(email: str, password: str, name: str):
    """Create an activated administrator account."""
    service = create_service(config_from_env())
    user = service.create_admin(email, name, password)
    click.echo(f"created admin {user.email} ({user.id})")


@main.command("activate-user")
@click.argument("email")
def activate_user(email: str):
    """Activate a pending account."""
    service = create_service(config_from_env())
    user = service.db.find_user_by_email(email)
    if user is None:
        click.echo(f"no user with email {email}", err=True)
        sys.exit(1)
    user.is_activated = True
    service.db.save_user(user)
    click.echo(f"activated {email}")


@main.command("ingest-video")
@click.argument("path", type=click.Path(exists=True))
@click.option("--name", required=True)
@click.option("--uploader-email", default=None,
              help="attribute the upload to this account (defaults to any admin)")
def ingest_video(path: str, name: str, uploader_email: str | None):
    """Upload a video file from disk, bypassing HTTP."""
    service = create_service(config_from_env())
    if uploader_email:
        actor = service.db.find_user_by_email(uploader_email)
    else:
        actor = next((u for u in service.db.list_users() if u.role.value == "admin"), None)
    if actor is None:
        click.echo("no uploader account found", err=True)
        sys.exit(1)
    with open(path, "rb") as fh:
        video = service.upload_video(actor, fh.read(), name)
    click.echo(json.dumps({"id": video.id, "name": video.name,
                           "durationMs": video.duration_ms}))


@main.command("export-annotations")
@click.option("--video-id", required=True)
@click.option("--group-id", default=None)
@click.option("--out", type=click.Path(), default="-")
def export_annotations(video_id: str, group_id: str | None, out: str):
    """Write the annotation export document for a video to a file or stdout."""
    service = create_service(config_from_env())
    doc = service.export_annotations(video_id, group_id)
    payload = json.dumps(doc, indent=2)
    if out == "-":
        click.echo(payload)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(payload)
        click.echo(f"wrote {out}")


if __name__ == "__main__":
    main()
