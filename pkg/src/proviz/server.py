"""Websocket wire protocol for live clients.

Server -> client messages mirror session events:
    {"type": <event kind>, "seq": int, "t": float, "payload": {...}}
On connect the full event backlog streams first (in seq order), then live
events; a reconnecting client therefore reconstructs identical state.

Client -> server messages:
    {"type": "utterance_text", "payload": {"speaker", "text"}}
    {"type": "audio_event",   "payload": {"speaker", "t_start", "t_end", "text"}}
    {"type": "flush_audio",   "payload": {}}
    {"type": "select_chart" | "delete_chart", "payload": {"spec_id"}}
    {"type": "move_resize",   "payload": {"spec_id", "x", "y", "w", "h"}}

Bad requests surface as ``error`` events on the same stream.
"""

from __future__ import annotations

import asyncio
import time
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from proviz.config import SessionConfig
from proviz.segmenter import AudioEvent, EchoBackend, Span, Utterance, transcribe
from proviz.session import Session, build_session

__all__ = ["create_app", "LiveSegmenter"]


class LiveSegmenter:
    """Per-speaker span assembly for streamed audio events.

    A span closes when the next event on the same channel arrives at least
    ``pause_threshold`` after it ends, or when the client flushes. The wall
    timer itself lives client-side with the microphone.
    """

    def __init__(self, session: Session, pause_threshold: float):
        self.session = session
        self.pause_threshold = pause_threshold
        self.backend = EchoBackend()
        self._pending: dict[str, list[AudioEvent]] = {}

    def feed(self, event: AudioEvent) -> None:
        buf = self._pending.setdefault(event.speaker, [])
        if buf and event.start - buf[-1].end >= self.pause_threshold:
            self._flush_speaker(event.speaker)
            buf = self._pending.setdefault(event.speaker, [])
        buf.append(event)

    def flush(self) -> None:
        for speaker in sorted(self._pending):
            self._flush_speaker(speaker)

    def _flush_speaker(self, speaker: str) -> None:
        buf = self._pending.pop(speaker, [])
        if not buf:
            return
        span = Span(speaker=speaker, t_start=buf[0].start, t_end=buf[-1].end, events=tuple(buf))
        utterance = transcribe(span, self.backend, self.session.next_utterance_id)
        if utterance is not None:
            self.session.handle_utterance(utterance)


def _handle_client_message(session: Session, live: LiveSegmenter, message: dict) -> None:
    kind = message.get("type")
    payload = message.get("payload") or {}
    now = session.clock()

    if kind == "utterance_text":
        text = str(payload.get("text", "")).strip()
        if not text:
            return
        utterance = Utterance(
            id=session.next_utterance_id(),
            speaker=str(payload.get("speaker", "A")),
            text=text,
            t_start=now,
            t_end=now,
        )
        session.handle_utterance(utterance)
    elif kind == "audio_event":
        live.feed(
            AudioEvent(
                start=float(payload["t_start"]),
                end=float(payload["t_end"]),
                payload=str(payload.get("text", "")),
                speaker=str(payload.get("speaker", "A")),
            )
        )
    elif kind == "flush_audio":
        live.flush()
    elif kind == "select_chart":
        session.select_chart(str(payload.get("spec_id", "")))
    elif kind == "delete_chart":
        session.delete_chart(str(payload.get("spec_id", "")))
    elif kind == "move_resize":
        session.move_resize(
            str(payload.get("spec_id", "")),
            float(payload.get("x", 0)),
            float(payload.get("y", 0)),
            float(payload.get("w", 0)),
            float(payload.get("h", 0)),
        )
    else:
        session._emit("error", now, {"origin": "client", "message": f"unknown message type {kind!r}"})


def create_app(cfg: SessionConfig, ui_dir: Optional[str] = None, session: Optional[Session] = None) -> FastAPI:
    app = FastAPI(title="proviz session")
    started = time.monotonic()
    if session is None:
        session = build_session(cfg, clock=lambda: time.monotonic() - started)
        session.start()
    live = LiveSegmenter(session, cfg.pause_threshold)
    app.state.session = session

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket):
        await websocket.accept()
        queue: asyncio.Queue = asyncio.Queue()
        for event in session.events:
            queue.put_nowait(event.to_dict())
        listener = lambda e: queue.put_nowait(e.to_dict())
        session.add_listener(listener)

        async def sender():
            while True:
                item = await queue.get()
                await websocket.send_json(
                    {"type": item["kind"], "seq": item["seq"], "t": item["t"], "payload": item["payload"]}
                )

        task = asyncio.create_task(sender())
        try:
            while True:
                message = await websocket.receive_json()
                _handle_client_message(session, live, message)
        except WebSocketDisconnect:
            pass
        finally:
            task.cancel()
            session.remove_listener(listener)

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
