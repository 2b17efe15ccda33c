"""HTTP surface: REST endpoints under /api/v1 plus the /ws websocket."""

from __future__ import annotations

import queue
from dataclasses import dataclass

import anyio
from fastapi import Depends, FastAPI, File, Form, Header, Query, Request, Response, UploadFile, WebSocket
from fastapi.responses import JSONResponse
from starlette.websockets import WebSocketDisconnect

from ..core.errors import DomainError
from ..realtime import RESYNC_REQUIRED_CLOSE_CODE, EventHub, Subscription
from ..store import Database, NotFound, StoreError, VersionConflict
from ..store.records import VideoStatus
from .auth import TokenSigner
from .media import ProbeFailed
from .service import Service, ServiceError


@dataclass
class AppConfig:
    data_dir: str
    token_secret: str
    decoder_cmd: str | None = None
    tracker_workers: int = 2
    in_memory: bool = False


def create_service(config: AppConfig) -> Service:
    if config.in_memory:
        db = Database.in_memory(config.data_dir)
    else:
        db = Database.open(config.data_dir)
    return Service(
        db=db,
        hub=EventHub(),
        tokens=TokenSigner(config.token_secret),
        data_dir=config.data_dir,
        decoder_cmd=config.decoder_cmd,
        tracker_workers=config.tracker_workers,
    )


def create_app(config: AppConfig, service: Service | None = None) -> FastAPI:
    service = service or create_service(config)
    app = FastAPI(title="vidannot")
    app.state.service = service

    def error(status: int, code: str, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"error": code, "message": message})

    @app.exception_handler(ServiceError)
    async def service_error(request: Request, exc: ServiceError):
        return error(exc.status, exc.code, str(exc))

    @app.exception_handler(NotFound)
    async def not_found(request: Request, exc: NotFound):
        return error(404, "not_found", str(exc))

    @app.exception_handler(VersionConflict)
    async def version_conflict(request: Request, exc: VersionConflict):
        return error(409, "version_conflict", str(exc))

    @app.exception_handler(DomainError)
    async def domain_error(request: Request, exc: DomainError):
        return error(400, type(exc).__name__, str(exc))

    @app.exception_handler(ProbeFailed)
    async def probe_failed(request: Request, exc: ProbeFailed):
        return error(400, "probe_failed", str(exc))

    @app.exception_handler(StoreError)
    async def store_error(request: Request, exc: StoreError):
        return error(409, "conflict", str(exc))

    @app.exception_handler(ValueError)
    async def value_error(request: Request, exc: ValueError):
        return error(400, "invalid_value", str(exc))

    def current_user(authorization: str = Header(default="")):
        if not authorization.startswith("Bearer "):
            raise ServiceErrorUnauthorized()
        return service.authenticate(authorization.removeprefix("Bearer "))

    class ServiceErrorUnauthorized(ServiceError):
        status = 401
        code = "missing_token"

        def __init__(self):
            super().__init__("missing bearer token")

    def user_json(u) -> dict:
        return {
            "id": u.id,
            "email": u.email,
            "displayName": u.display_name,
            "role": u.role.value,
            "isActivated": u.is_activated,
        }

    def video_json(v) -> dict:
        d = v.to_dict()
        d.pop("framesDir", None)
        return d

    # -- auth ------------------------------------------------------------
    @app.post("/api/v1/auth/signup", status_code=201)
    def signup(body: dict):
        user = service.signup(body["email"], body.get("displayName", ""), body["password"])
        return user_json(user)

    @app.post("/api/v1/auth/login")
    def login(body: dict):
        token = service.login(body["email"], body["password"])
        return {"token": token}

    # -- users -----------------------------------------------------------
    @app.post("/api/v1/users/{user_id}/activate")
    def activate(user_id: str, actor=Depends(current_user)):
        return user_json(service.activate_user(actor, user_id))

    @app.get("/api/v1/users")
    def list_users(actor=Depends(current_user)):
        return [user_json(u) for u in service.list_users(actor)]

    @app.delete("/api/v1/users/{user_id}", status_code=204)
    def delete_user(user_id: str, actor=Depends(current_user)):
        service.delete_user(actor, user_id)

    # -- videos ----------------------------------------------------------
    @app.post("/api/v1/videos", status_code=201)
    def upload_video(
        file: UploadFile = File(...),
        name: str = Form(...),
        actor=Depends(current_user),
    ):
        return video_json(service.upload_video(actor, file.file.read(), name))

    @app.get("/api/v1/videos")
    def query_videos(
        search: str | None = None,
        bookmarked: bool = False,
        status: str | None = None,
        groupId: str | None = None,
        page: int = 1,
        pageSize: int = Query(default=50),
        actor=Depends(current_user),
    ):
        videos, total = service.db.query_videos(
            name_substring=search,
            bookmarked_by=actor.id if bookmarked else None,
            status=VideoStatus(status) if status else None,
            group_id=groupId,
            page=page,
            page_size=pageSize,
        )
        return {"items": [video_json(v) for v in videos], "total": total,
                "page": page, "pageSize": pageSize}

    @app.patch("/api/v1/videos/{video_id}")
    def patch_video(video_id: str, body: dict, actor=Depends(current_user)):
        return video_json(
            service.rename_video(actor, video_id, name=body.get("name"), status=body.get("status"))
        )

    @app.delete("/api/v1/videos/{video_id}", status_code=204)
    def delete_video(video_id: str, actor=Depends(current_user)):
        service.delete_video(actor, video_id)

    @app.put("/api/v1/videos/{video_id}/bookmark")
    def bookmark(video_id: str, actor=Depends(current_user)):
        return video_json(service.set_bookmark(actor, video_id, True))

    @app.delete("/api/v1/videos/{video_id}/bookmark")
    def unbookmark(video_id: str, actor=Depends(current_user)):
        return video_json(service.set_bookmark(actor, video_id, False))

    @app.get("/api/v1/videos/{video_id}/thumbnail")
    def thumbnail(video_id: str, actor=Depends(current_user)):
        video = service.db.get_video(video_id)
        if not video.thumbnail_ref:
            raise NotFound(f"video {video_id} has no thumbnail")
        return Response(content=service.db.blobs.get(video.thumbnail_ref), media_type="image/png")

    @app.get("/api/v1/videos/{video_id}/stream")
    def stream(video_id: str, request: Request, actor=Depends(current_user)):
        video = service.db.get_video(video_id)
        data = service.db.blobs.get(video.blob_ref)
        range_header = request.headers.get("range")
        if range_header and range_header.startswith("bytes="):
            spec = range_header.removeprefix("bytes=").split("-")
            start = int(spec[0]) if spec[0] else 0
            end = int(spec[1]) if len(spec) > 1 and spec[1] else len(data) - 1
            end = min(end, len(data) - 1)
            chunk = data[start : end + 1]
            return Response(
                content=chunk,
                status_code=206,
                media_type="application/octet-stream",
                headers={
                    "Content-Range": f"bytes {start}-{end}/{len(data)}",
                    "Accept-Ranges": "bytes",
                },
            )
        return Response(content=data, media_type="application/octet-stream",
                        headers={"Accept-Ranges": "bytes"})

    # -- labels ----------------------------------------------------------
    @app.get("/api/v1/labels")
    def list_labels(actor=Depends(current_user)):
        return [
            {"id": l.id, "name": l.name, "color": l.color, "kind": l.kind.value}
            for l in service.db.list_labels()
        ]

    @app.post("/api/v1/labels", status_code=201)
    def create_label(body: dict, actor=Depends(current_user)):
        l = service.create_label(actor, body["name"], body["color"], body["kind"])
        return {"id": l.id, "name": l.name, "color": l.color, "kind": l.kind.value}

    # -- annotations -----------------------------------------------------
    @app.get("/api/v1/videos/{video_id}/annotations")
    def list_annotations(video_id: str, groupId: str | None = None, actor=Depends(current_user)):
        return service.list_annotations(video_id, groupId)

    @app.post("/api/v1/annotations", status_code=201)
    def create_annotation(
        body: dict,
        idempotency_key: str | None = Header(default=None, alias="Idempotency-Key"),
        actor=Depends(current_user),
    ):
        return service.create_annotation(actor, body, idempotency_key)

    @app.patch("/api/v1/annotations/{ann_id}")
    def update_annotation(ann_id: str, body: dict, actor=Depends(current_user)):
        return service.update_annotation(actor, ann_id, body)

    @app.delete("/api/v1/annotations/{ann_id}", status_code=204)
    def delete_annotation(ann_id: str, actor=Depends(current_user)):
        service.delete_annotation(actor, ann_id)

    @app.post("/api/v1/annotations/{ann_id}/split")
    def split(ann_id: str, body: dict, actor=Depends(current_user)):
        left, right = service.split(actor, ann_id, body["atMs"])
        return {"left": left, "right": right}

    @app.post("/api/v1/annotations/{ann_id}/track", status_code=202)
    def start_track(ann_id: str, body: dict | None = None, actor=Depends(current_user)):
        job = service.start_track_job(actor, ann_id, (body or {}).get("strideMs"))
        return job.to_dict()

    # -- export / import -------------------------------------------------
    @app.get("/api/v1/videos/{video_id}/annotations/export")
    def export_annotations(video_id: str, groupId: str | None = None, actor=Depends(current_user)):
        return service.export_annotations(video_id, groupId)

    @app.post("/api/v1/videos/{video_id}/annotations/import", status_code=201)
    def import_annotations(video_id: str, body: dict, groupId: str | None = None,
                           actor=Depends(current_user)):
        return service.import_annotations(actor, video_id, body, groupId)

    # -- groups ----------------------------------------------------------
    @app.get("/api/v1/groups")
    def list_groups(actor=Depends(current_user)):
        return [g.to_dict() for g in service.db.list_groups()]

    @app.post("/api/v1/groups", status_code=201)
    def create_group(body: dict, actor=Depends(current_user)):
        return service.create_group(actor, body["name"]).to_dict()

    def group_membership_route(field: str, id_param: str):
        def add(group_id: str, value: str, actor=Depends(current_user)):
            return service.modify_group(actor, group_id, field, value, add=True).to_dict()

        def remove(group_id: str, value: str, actor=Depends(current_user)):
            return service.modify_group(actor, group_id, field, value, add=False).to_dict()

        app.post(f"/api/v1/groups/{{group_id}}/{field}/{{value}}")(add)
        app.delete(f"/api/v1/groups/{{group_id}}/{field}/{{value}}")(remove)

    group_membership_route("videos", "videoId")
    group_membership_route("labels", "labelId")
    group_membership_route("members", "userId")

    # -- jobs ------------------------------------------------------------
    @app.get("/api/v1/jobs/{job_id}")
    def get_job(job_id: str, actor=Depends(current_user)):
        return service.db.get_job(job_id).to_dict()

    # -- websocket -------------------------------------------------------
    @app.websocket("/ws")
    async def ws(websocket: WebSocket):
        token = websocket.query_params.get("token", "")
        try:
            user = service.authenticate(token)
        except ServiceError:
            await websocket.close(code=4401)
            return
        await websocket.accept()
        subs: dict[tuple[str, str | None], Subscription] = {}
        send_lock = anyio.Lock()

        async def pump(sub: Subscription):
            def next_event():
                try:
                    return sub.events.get(timeout=0.05)
                except queue.Empty:
                    return None

            while not sub.closed:
                event = await anyio.to_thread.run_sync(next_event)
                if event is not None:
                    async with send_lock:
                        await websocket.send_json(event.to_dict())
                elif sub.overflowed:
                    # buffer drained after overflow: client must resync
                    await websocket.close(code=RESYNC_REQUIRED_CLOSE_CODE)
                    sub.closed = True

        try:
            async with anyio.create_task_group() as tg:
                while True:
                    try:
                        message = await websocket.receive_json()
                    except WebSocketDisconnect:
                        tg.cancel_scope.cancel()
                        break
                    kind = message.get("type")
                    key = (message.get("videoId"), message.get("groupId"))
                    if kind == "subscribe":
                        try:
                            snapshot = service.list_annotations(key[0], key[1])
                        except NotFound:
                            async with send_lock:
                                await websocket.send_json(
                                    {"type": "error", "error": "UnknownVideo",
                                     "videoId": key[0]}
                                )
                            continue
                        if key in subs:
                            continue
                        sub, seq = service.hub.subscribe(*key)
                        subs[key] = sub
                        # snapshot is read after attach: events racing the
                        # snapshot arrive with a larger seq and re-apply cleanly
                        snapshot = service.list_annotations(key[0], key[1])
                        async with send_lock:
                            await websocket.send_json(
                                {"type": "snapshot", "seq": seq, "videoId": key[0],
                                 "groupId": key[1], "annotations": snapshot}
                            )
                        tg.start_soon(pump, sub)
                    elif kind == "unsubscribe":
                        sub = subs.pop(key, None)
                        if sub is not None:
                            service.hub.unsubscribe(sub)
        except WebSocketDisconnect:
            pass
        finally:
            for sub in subs.values():
                service.hub.unsubscribe(sub)

    return app
