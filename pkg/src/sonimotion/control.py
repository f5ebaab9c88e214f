"""Operator control surface: WebSocket JSON protocol plus log download.

One JSON object per WebSocket message. Requests carry kind, optional
path/value, and an opaque request_id echoed in the reply:

    {"kind": "set_param", "path": "tempo", "value": 100, "request_id": 7}

Reply kinds are "reply" (ok, echoed applied value, optional clamp
warning), "error" (error name + detail), and "snapshot" (pushed at the
configured rate and on snapshot_request). Mutations are serialized
through the real-time runner's mailbox so they land between engine
ticks; nothing here touches engine state concurrently with the loop.
"""

from __future__ import annotations

import asyncio
import json
import threading
from dataclasses import dataclass

import uvicorn
from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import PlainTextResponse, Response
from fastapi.staticfiles import StaticFiles

from .config import InvalidValue, TypeMismatch, UnknownPath, get_param
from .engine import EngineCore
from .motion import NotStationary
from .runtime import EngineStopped, RealTimeRunner

DEFAULT_PORT = 9000

MESSAGE_KINDS = ("set_param", "get_param", "set_mode", "transport",
                 "standby", "snapshot_request", "calibrate")


@dataclass
class ControlContext:
    """Couples the engine with its (optional) live loop and log location."""

    engine: EngineCore
    runner: RealTimeRunner | None = None
    log_path: str | None = None
    console_dir: str | None = None

    def call(self, fn):
        """Apply fn between ticks when live; directly when not."""
        if self.runner is None:
            return fn()
        return self.runner.call(fn)


def _reply(msg: dict, **fields) -> dict:
    out = {"kind": "reply", "request_id": msg.get("request_id")}
    out.update(fields)
    return out


def _error(msg: dict, name: str, detail: str) -> dict:
    return {"kind": "error", "request_id": msg.get("request_id"),
            "error": name, "detail": detail}


def handle_control_message(ctx: ControlContext, msg: dict) -> dict:
    """Dispatch one decoded control message and build the reply object."""
    kind = msg.get("kind")
    engine = ctx.engine
    try:
        if kind == "set_param":
            path = str(msg.get("path", ""))
            applied, clamped = ctx.call(
                lambda: engine.apply_param(path, msg.get("value")))
            out = _reply(msg, ok=True, path=path, value=applied,
                         clamped=clamped)
            if clamped:
                out["warning"] = f"value out of range; clamped to {applied}"
            return out
        if kind == "get_param":
            path = str(msg.get("path", ""))
            value = ctx.call(lambda: get_param(engine.state, path))
            return _reply(msg, ok=True, path=path, value=value)
        if kind == "set_mode":
            mode = str(msg.get("value", ""))
            ctx.call(lambda: engine.set_mode(mode))
            return _reply(msg, ok=True, value=mode)
        if kind == "transport":
            action = str(msg.get("value", ""))
            if action not in ("play", "pause", "rewind"):
                return _error(msg, "BadMessage",
                              f"unknown transport action {action!r}")
            ctx.call(lambda: getattr(engine, action)())
            return _reply(msg, ok=True, value=action)
        if kind == "standby":
            flag = bool(msg.get("value"))
            def set_standby():
                engine.state.standby = flag
            ctx.call(set_standby)
            return _reply(msg, ok=True, value=flag)
        if kind == "snapshot_request":
            snap = ctx.call(engine.snapshot)
            return {"kind": "snapshot",
                    "request_id": msg.get("request_id"), **snap}
        if kind == "calibrate":
            gyro_bias, acc_bias = ctx.call(engine.calibrate)
            return _reply(msg, ok=True, value={"gyro_bias": list(gyro_bias),
                                               "acc_bias": list(acc_bias)})
        return _error(msg, "BadMessage", f"unknown kind {kind!r}")
    except UnknownPath as exc:
        return _error(msg, "UnknownPath", str(exc))
    except TypeMismatch as exc:
        return _error(msg, "TypeMismatch", str(exc))
    except InvalidValue as exc:
        return _error(msg, "InvalidValue", str(exc))
    except NotStationary as exc:
        return _error(msg, "NotStationary", str(exc))
    except EngineStopped as exc:
        return _error(msg, "EngineStopped", str(exc))
    except (ValueError, TypeError, KeyError) as exc:
        return _error(msg, "InvalidValue", str(exc))


def build_app(ctx: ControlContext) -> FastAPI:
    app = FastAPI(title="sonimotion control", docs_url=None, redoc_url=None)

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):          # noqa: D103
        await ws.accept()
        send_lock = asyncio.Lock()

        async def push_snapshots():
            while True:
                rate = max(1.0, float(ctx.engine.state.snapshot_rate_hz))
                await asyncio.sleep(1.0 / rate)
                try:
                    snap = await asyncio.to_thread(ctx.call,
                                                   ctx.engine.snapshot)
                except EngineStopped:
                    continue
                async with send_lock:
                    await ws.send_text(json.dumps({"kind": "snapshot",
                                                   **snap}))

        pusher = asyncio.create_task(push_snapshots())
        try:
            while True:
                text = await ws.receive_text()
                try:
                    msg = json.loads(text)
                    if not isinstance(msg, dict):
                        raise ValueError("message must be a JSON object")
                except ValueError as exc:
                    reply = _error({}, "BadMessage", str(exc))
                else:
                    reply = await asyncio.to_thread(handle_control_message,
                                                    ctx, msg)
                async with send_lock:
                    await ws.send_text(json.dumps(reply))
        except WebSocketDisconnect:
            pass
        finally:
            pusher.cancel()

    @app.get("/log")
    async def download_log():                      # noqa: D103
        if ctx.log_path is None:
            return Response(status_code=404, content="no log configured")
        try:
            await asyncio.to_thread(
                ctx.call,
                lambda: ctx.engine.log_writer and ctx.engine.log_writer.flush())
        except EngineStopped:
            pass
        try:
            with open(ctx.log_path, encoding="utf-8") as f:
                body = f.read()
        except OSError:
            return Response(status_code=404, content="log not found")
        return PlainTextResponse(body, media_type="text/csv")

    if ctx.console_dir is not None:
        app.mount("/", StaticFiles(directory=ctx.console_dir, html=True),
                  name="console")
    return app


class ControlServer:
    """Uvicorn on a daemon thread serving the control app."""

    def __init__(self, ctx: ControlContext, port: int = DEFAULT_PORT,
                 host: str = "127.0.0.1"):
        self.ctx = ctx
        config = uvicorn.Config(build_app(ctx), host=host, port=port,
                                log_level="warning")
        self.server = uvicorn.Server(config)
        self._thread: threading.Thread | None = None

    def start(self) -> None:
        self._thread = threading.Thread(target=self.server.run, daemon=True,
                                        name="control-api")
        self._thread.start()

    @property
    def started(self) -> bool:
        return self.server.started

    def stop(self) -> None:
        self.server.should_exit = True
        if self._thread is not None:
            self._thread.join(timeout=3.0)
            self._thread = None
