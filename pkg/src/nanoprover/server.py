"""Session service: the proof engine behind a small JSON protocol.

Sessions live in memory for the server's lifetime; scripts are the durable
artifact.  Commands addressed to one session are serialized by a per-session
lock, while distinct sessions proceed concurrently.  Every formula string in
a payload is pretty() output and re-parseable; field names are pinned by
protocol.schema.json shipped next to this module.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .errors import NanoproverError, ParseError, SessionError
from .extract import extract_function
from .kernel import CalculusMode
from .session import (
    LINEAR,
    RANDOM_ACCESS,
    Session,
    create_session,
    session_step,
)
from .surface import pretty

_MODES = {
    "intuitionistic": CalculusMode.INTUITIONISTIC,
    "classical": CalculusMode.CLASSICAL,
    "hilbert": CalculusMode.HILBERT,
}


@dataclass
class _Slot:
    session: Session
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    def __init__(self):
        self._slots: dict[str, _Slot] = {}
        self._ids = itertools.count(1)
        self._lock = threading.Lock()

    def add(self, session: Session) -> str:
        with self._lock:
            sid = f"s{next(self._ids)}"
            self._slots[sid] = _Slot(session)
            return sid

    def get(self, sid: str) -> _Slot | None:
        with self._lock:
            return self._slots.get(sid)


def wire_state(sid: str, s: Session, diagnostics: list | None = None) -> dict:
    st = s.current
    goals = []
    if st.proof is not None:
        for g in st.proof.state.goals:
            goals.append({
                "hypotheses": [{"label": lab, "formula": pretty(f)}
                               for lab, f in g.hyps],
                "goal": pretty(g.goal),
            })
    return {
        "session_id": sid,
        "cursor": s.cursor,
        "item_count": s.item_count,
        "navigation": s.navigation,
        "mode": st.mode.value,
        "proof_name": st.proof.name if st.proof else None,
        "goals": goals,
        "message": st.message,
        "theorems": list(st.theorems),
        "items": [{"start": it.span.start, "end": it.span.end}
                  for it in s.script.items],
        "diagnostics": diagnostics or [],
    }


def _diag(index, message, span=None) -> dict:
    d = {"item_index": index, "message": message}
    if span is not None:
        d["span"] = {"start": span.start, "end": span.end,
                     "line": span.line, "col": span.col}
    return d


class CreateSessionBody(BaseModel):
    script: str
    navigation: str = RANDOM_ACCESS
    calculus_mode: str = "intuitionistic"


class StepBody(BaseModel):
    command: str  # forward | backward | run_to | edit
    index: int | None = None
    text: str | None = None


def create_app() -> FastAPI:
    app = FastAPI(title="nanoprover", version="0.1.0")
    store = SessionStore()

    @app.post("/sessions")
    def post_sessions(body: CreateSessionBody):
        mode = _MODES.get(body.calculus_mode.lower())
        if mode is None:
            return JSONResponse(status_code=422, content={
                "diagnostics": [_diag(None, f"unknown calculus mode {body.calculus_mode}")]})
        if body.navigation not in (LINEAR, RANDOM_ACCESS):
            return JSONResponse(status_code=422, content={
                "diagnostics": [_diag(None, f"unknown navigation {body.navigation}")]})
        try:
            session = create_session(body.script, body.navigation, mode)
        except ParseError as e:
            return JSONResponse(status_code=422, content={
                "diagnostics": [{"item_index": None, "message": str(e),
                                 "span": {"line": e.line, "col": e.col}}]})
        sid = store.add(session)
        return wire_state(sid, session)

    def _with_session(sid: str, fn):
        slot = store.get(sid)
        if slot is None:
            return JSONResponse(status_code=404, content={
                "diagnostics": [_diag(None, f"unknown session {sid}")]})
        with slot.lock:
            return fn(slot)

    @app.post("/sessions/{sid}/step")
    def post_step(sid: str, body: StepBody):
        def go(slot: _Slot):
            try:
                slot.session = session_step(slot.session, body.command,
                                            body.index, body.text)
                return wire_state(sid, slot.session)
            except (SessionError, ParseError) as e:
                partial = getattr(e, "partial", None)
                if partial is not None:
                    slot.session = partial
                idx = getattr(e, "item_index", None)
                span = None
                if idx is not None and idx < slot.session.item_count:
                    span = slot.session.script.items[idx].span
                return wire_state(sid, slot.session,
                                  diagnostics=[_diag(idx, str(e), span)])
        return _with_session(sid, go)

    @app.get("/sessions/{sid}/state")
    def get_state(sid: str):
        return _with_session(sid, lambda slot: wire_state(sid, slot.session))

    @app.get("/sessions/{sid}/theorems")
    def get_theorems(sid: str):
        def go(slot: _Slot):
            env = slot.session.current.env
            out = []
            for name in slot.session.current.theorems:
                rec = env.theorem(name)
                out.append({"name": name, "statement": pretty(rec.statement),
                            "mode": rec.mode.value})
            return {"session_id": sid, "theorems": out}
        return _with_session(sid, go)

    @app.get("/sessions/{sid}/extract")
    def get_extract(sid: str, name: str, dialect: str = "lazy-functional"):
        def go(slot: _Slot):
            try:
                text = extract_function(slot.session.current.env, name, dialect)
            except NanoproverError as e:
                return JSONResponse(status_code=404, content={
                    "diagnostics": [_diag(None, str(e))]})
            return {"session_id": sid, "name": name, "dialect": dialect,
                    "source": text}
        return _with_session(sid, go)

    return app


app = create_app()
