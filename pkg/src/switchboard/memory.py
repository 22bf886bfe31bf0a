"""Per-session bounded conversation history with drop-oldest pruning."""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field

from .backend import ChatMessage

DEFAULT_CAP = 10


@dataclass(frozen=True)
class Turn:
    user_text: str
    assistant_text: str
    domain: str
    timestamp: float = field(default_factory=time.monotonic)

    def __post_init__(self):
        if not self.user_text or not self.assistant_text:
            raise ValueError("turn texts must be non-empty")


class ConversationMemory:
    """Ordered recent turns for one session, capped at `cap` turns."""

    def __init__(self, session_id: str, cap: int = DEFAULT_CAP):
        if cap < 1:
            raise ValueError("cap must be >= 1")
        self.session_id = session_id
        self.cap = cap
        self.turns: list[Turn] = []

    def append_turn(self, turn: Turn) -> None:
        self.turns.append(turn)
        if len(self.turns) > self.cap:
            del self.turns[: len(self.turns) - self.cap]

    def render_history(self) -> list[ChatMessage]:
        """User/assistant message pairs in chronological order."""
        messages: list[ChatMessage] = []
        for turn in self.turns:
            messages.append(ChatMessage("user", turn.user_text))
            messages.append(ChatMessage("assistant", turn.assistant_text))
        return messages

    def clear(self) -> None:
        self.turns.clear()

    def __len__(self) -> int:
        return len(self.turns)


class MemoryStore:
    """Session-keyed memory map with per-session locks.

    Optional persistence appends one JSON record per committed turn to a
    session log; replay rebuilds each session's last `cap` turns.
    """

    def __init__(self, cap: int = DEFAULT_CAP, persist_path: str | None = None):
        self.cap = cap
        self.persist_path = persist_path
        self._sessions: dict[str, ConversationMemory] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._guard = threading.Lock()
        if persist_path:
            self._replay(persist_path)

    def get(self, session_id: str) -> ConversationMemory:
        with self._guard:
            if session_id not in self._sessions:
                self._sessions[session_id] = ConversationMemory(session_id, self.cap)
                self._locks[session_id] = threading.Lock()
            return self._sessions[session_id]

    def lock(self, session_id: str) -> threading.Lock:
        self.get(session_id)
        return self._locks[session_id]

    def commit(self, session_id: str, turn: Turn) -> None:
        self.get(session_id).append_turn(turn)
        if self.persist_path:
            record = {
                "session_id": session_id,
                "user_text": turn.user_text,
                "assistant_text": turn.assistant_text,
                "domain": turn.domain,
                "ts": turn.timestamp,
            }
            with open(self.persist_path, "a", encoding="utf-8") as f:
                f.write(json.dumps(record, ensure_ascii=False) + "\n")

    def _replay(self, path: str) -> None:
        try:
            with open(path, encoding="utf-8") as f:
                lines = f.readlines()
        except FileNotFoundError:
            return
        for line in lines:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            self.get(rec["session_id"]).append_turn(
                Turn(
                    user_text=rec["user_text"],
                    assistant_text=rec["assistant_text"],
                    domain=rec["domain"],
                    timestamp=rec.get("ts", 0.0),
                )
            )
