"""Session-based HTTP completion service for predictive editors.

Wire format (all JSON, UTF-8):

    GET  /health                     -> {"status": "ok"}
    GET  /grammars                   -> {"grammars": [{"id", "rule_count"}]}
    POST /sessions {grammar_id}      -> {"session_id", "options": [...], "complete"}
    POST /sessions/{id}/tokens {token}
         -> {"accepted", "options": [...], "antecedents": [...], "complete"}
    DELETE /sessions/{id}/tokens/last
         -> {"options": [...], "antecedents": [...], "complete"}
    GET  /sessions/{id}/tree         -> {"trees": [...]} (409 while incomplete)

Option objects are {token, category, features{}}; antecedent objects are
{position, features{}}; trees use the same structure the CLI's JSON dump
emits. Sessions expire after a configurable idle time; clients hold their
token history and can recover by replaying it into a fresh session.
"""

from __future__ import annotations

import pathlib
import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .core import Grammar
from .errors import TokenRejectedError
from .notation import load_grammar
from .parser import (
    ParseState,
    accessible_antecedents,
    extract_trees,
    feed_token,
    is_complete,
    new_session,
    next_tokens,
)
from .wire import antecedent_to_wire, option_to_wire, tree_to_wire

DEFAULT_TTL = 1800.0


@dataclass
class Session:
    id: str
    grammar_id: str
    state: ParseState
    history: list[str] = field(default_factory=list)
    last_access: float = field(default_factory=time.monotonic)
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    """Thread-safe session map with idle expiry. Operations on one session
    are serialized by its own lock; the store lock only guards the map."""

    def __init__(self, ttl: float):
        self.ttl = ttl
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}

    def _sweep(self, now: float):
        expired = [sid for sid, s in self._sessions.items() if now - s.last_access > self.ttl]
        for sid in expired:
            del self._sessions[sid]

    def create(self, grammar_id: str, state: ParseState) -> Session:
        session = Session(id=uuid.uuid4().hex, grammar_id=grammar_id, state=state)
        with self._lock:
            self._sweep(time.monotonic())
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            now = time.monotonic()
            self._sweep(now)
            session = self._sessions.get(session_id)
            if session is None:
                raise HTTPException(status_code=404, detail="unknown or expired session")
            session.last_access = now
            return session


class CreateSessionBody(BaseModel):
    grammar_id: str


class PushTokenBody(BaseModel):
    token: str


def _load_grammar_dir(grammar_dir) -> dict[str, Grammar]:
    grammars: dict[str, Grammar] = {}
    for path in sorted(pathlib.Path(grammar_dir).glob("*.codeco")):
        grammars[path.stem] = load_grammar(path)
    return grammars


def _state_view(state: ParseState, with_antecedents: bool = True) -> dict:
    view = {
        "options": [option_to_wire(o) for o in next_tokens(state)],
        "complete": is_complete(state),
    }
    if with_antecedents:
        view["antecedents"] = [antecedent_to_wire(a) for a in accessible_antecedents(state)]
    return view


def create_app(grammar_dir, session_ttl: float = DEFAULT_TTL) -> FastAPI:
    """Build the service over a directory of .codeco files; grammars are
    loaded once at startup and shared read-only."""
    grammars = _load_grammar_dir(grammar_dir)
    store = SessionStore(session_ttl)
    app = FastAPI(title="codeco completion service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.get("/health")
    def health():
        return {"status": "ok", "grammars": len(grammars)}

    @app.get("/grammars")
    def list_grammars():
        return {
            "grammars": [
                {"id": gid, "rule_count": len(g.rules) + len(g.lexical_rules)}
                for gid, g in sorted(grammars.items())
            ]
        }

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        grammar = grammars.get(body.grammar_id)
        if grammar is None:
            raise HTTPException(status_code=404, detail=f"unknown grammar {body.grammar_id!r}")
        session = store.create(body.grammar_id, new_session(grammar))
        view = _state_view(session.state, with_antecedents=False)
        return {"session_id": session.id, **view}

    @app.post("/sessions/{session_id}/tokens")
    def push_token(session_id: str, body: PushTokenBody):
        if not body.token:
            raise HTTPException(status_code=422, detail="token must be non-empty")
        session = store.get(session_id)
        with session.lock:
            try:
                session.state = feed_token(session.state, body.token)
                session.history.append(body.token)
                accepted = True
            except TokenRejectedError:
                accepted = False
            return {"accepted": accepted, **_state_view(session.state)}

    @app.delete("/sessions/{session_id}/tokens/last")
    def pop_token(session_id: str):
        session = store.get(session_id)
        with session.lock:
            if not session.history:
                raise HTTPException(status_code=409, detail="no tokens to remove")
            # history is the source of truth: undo replays the prefix
            history = session.history[:-1]
            grammar = grammars[session.grammar_id]
            state = new_session(grammar)
            for token in history:
                state = feed_token(state, token)
            session.state = state
            session.history = history
            return _state_view(session.state)

    @app.get("/sessions/{session_id}/tree")
    def get_tree(session_id: str):
        session = store.get(session_id)
        with session.lock:
            if not is_complete(session.state):
                raise HTTPException(status_code=409, detail="sentence is not complete")
            return {"trees": [tree_to_wire(t) for t in extract_trees(session.state)]}

    return app
