"""HTTP + WebSocket facade over the recognition engine.

The service holds no recognition logic of its own: every number pushed over
a session socket comes straight from a StreamEngine fed with the session's
frames, so live output is byte-identical to an offline replay of the same
stream.  The shipped database and model are loaded once and shared read-only
across sessions; record-mode captures are persisted to a separate user-signs
file behind a single writer lock.

HTTP:  GET /signs            catalog, sorted by id
       GET /signs/{id}       full template with all joint positions
WS:    /session?mode=record|learn|test[&target=<sign id>]
       client -> {"type": "frame", "t": ..., ...hand schema}
                 {"type": "finish", ...}
       server -> confidence / event / feedback / recorded / error messages
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect

from signum.dtree import DecisionTree
from signum.errors import SignumError
from signum.handmodel import (
    SCHEMA_VERSION,
    Category,
    HandFrame,
    SignDatabase,
    build_sign,
    capture_sign_pose,
    gesture_to_dict,
    load_database,
    save_database,
)
from signum.stream import (
    DwellConfig,
    PracticeMode,
    StreamEngine,
    frame_from_dict,
)


class ProtocolError(SignumError):
    """A session message does not follow the wire schema."""


@dataclass
class SessionState:
    """Per-connection state; never shared between sessions."""

    session_id: str
    mode: str                      # "record" | "learn" | "test"
    target: str | None
    engine: StreamEngine | None    # None in record mode
    frames: list[HandFrame] = field(default_factory=list)
    last_feedback: dict | None = None


def _catalog_entry(sign) -> dict:
    return {
        "id": sign.id,
        "label": sign.label,
        "category": sign.category.value,
        "handedness": sign.handedness.value,
        "arity": sign.arity,
    }


def _parse_frame(raw: dict) -> HandFrame:
    try:
        return frame_from_dict(raw)
    except SignumError as exc:
        raise ProtocolError(str(exc)) from exc


class RecordStore:
    """Single-writer persistence for user-recorded signs."""

    def __init__(self, path, language: str):
        self.path = Path(path)
        self.language = language
        self._lock = threading.Lock()

    def append(self, sign) -> None:
        with self._lock:
            if self.path.exists():
                db = load_database(self.path)
            else:
                db = SignDatabase(SCHEMA_VERSION, self.language, ())
            save_database(db.with_sign(sign), self.path)


def create_app(db: SignDatabase, tree: DecisionTree,
               cfg: DwellConfig = DwellConfig(),
               user_db_path="user_signs.json") -> FastAPI:
    app = FastAPI(title="signum practice service")
    catalog = sorted(db.signs, key=lambda s: s.id)
    store = RecordStore(user_db_path, db.language)

    @app.get("/signs")
    def list_signs():
        return [_catalog_entry(s) for s in catalog]

    @app.get("/signs/{sign_id}")
    def get_sign(sign_id: str):
        sign = db.get(sign_id)
        if sign is None:
            raise HTTPException(status_code=404, detail="UnknownSign")
        return gesture_to_dict(sign)

    def open_session(mode: str, target: str | None) -> SessionState:
        if mode not in ("record", "learn", "test"):
            raise ProtocolError(f"unknown mode {mode!r}")
        engine = None
        if mode in ("learn", "test"):
            if target is None or db.get(target) is None:
                raise SignumError(f"UnknownTarget: {target!r}")
            engine = StreamEngine(tree, db, cfg,
                                  mode=PracticeMode(mode), target=target)
        return SessionState(session_id=uuid.uuid4().hex, mode=mode,
                            target=target, engine=engine)

    async def send(ws: WebSocket, message: dict) -> None:
        await ws.send_text(json.dumps(message, sort_keys=True))

    async def handle_finish(ws: WebSocket, session: SessionState, raw: dict) -> None:
        if session.mode == "record":
            category = Category(raw.get("category", "alphabet"))
            poses = capture_sign_pose(session.frames, category, cfg)
            sign = build_sign(
                sign_id=raw.get("id") or f"user-{session.session_id[:8]}",
                label=raw.get("label") or raw.get("id") or "untitled",
                category=category,
                poses=poses,
            )
            store.append(sign)
            await send(ws, {"type": "recorded", "id": sign.id})
            session.frames = []
        else:
            for message in session.engine.finish():
                if message["type"] == "feedback":
                    session.last_feedback = message
                await send(ws, message)

    @app.websocket("/session")
    async def session_socket(ws: WebSocket, mode: str = "learn",
                             target: str | None = None):
        await ws.accept()
        try:
            session = open_session(mode, target)
        except SignumError as exc:
            await send(ws, {"type": "error", "error": "UnknownTarget"
                            if "UnknownTarget" in str(exc) else "ProtocolError",
                            "detail": str(exc)})
            await ws.close()
            return
        try:
            while True:
                text = await ws.receive_text()
                try:
                    raw = json.loads(text)
                    if not isinstance(raw, dict) or "type" not in raw:
                        raise ProtocolError("messages must be objects with a type")
                    if raw["type"] == "frame":
                        frame = _parse_frame(raw)
                        if session.engine is not None:
                            for message in session.engine.feed(frame):
                                if message["type"] == "feedback":
                                    session.last_feedback = message
                                await send(ws, message)
                        else:
                            session.frames.append(frame)
                    elif raw["type"] == "finish":
                        await handle_finish(ws, session, raw)
                    else:
                        raise ProtocolError(f"unknown message type {raw.get('type')!r}")
                except (json.JSONDecodeError, ProtocolError, ValueError) as exc:
                    # malformed input never kills the session
                    await send(ws, {"type": "error", "error": "ProtocolError",
                                    "detail": str(exc)})
                except SignumError as exc:
                    await send(ws, {"type": "error",
                                    "error": type(exc).__name__,
                                    "detail": str(exc)})
        except WebSocketDisconnect:
            return

    return app
