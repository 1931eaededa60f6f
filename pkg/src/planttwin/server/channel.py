"""Per-session outbound message queues with snapshot backpressure.

Acks are contractual and always queue. Snapshots are refreshable: when a
slow consumer's queue already holds `depth` snapshots, the oldest queued
snapshot is dropped and the next snapshot the client receives carries
``"gap": true`` so it knows continuity broke.
"""
from __future__ import annotations

import threading
from collections import deque

DEFAULT_QUEUE_DEPTH = 16


class SessionChannel:
    def __init__(self, depth: int = DEFAULT_QUEUE_DEPTH):
        self.depth = depth
        self._queue: deque[dict] = deque()
        self._lock = threading.Lock()
        self._ready = threading.Condition(self._lock)
        self._seq = 0
        self._pending_gap = False
        self._closed = False
        self.dropped_snapshots = 0

    def _next_seq(self) -> int:
        self._seq += 1
        return self._seq

    def send(self, msg_type: str, body: dict) -> dict:
        """Queue a message; snapshot overflow drops the oldest snapshot.

        The gap marker goes on the first snapshot the client will still
        receive after the dropped one.
        """
        with self._ready:
            if self._closed:
                return {}
            if msg_type == "snapshot":
                queued = [m for m in self._queue if m["type"] == "snapshot"]
                if len(queued) >= self.depth:
                    self._queue.remove(queued[0])
                    self.dropped_snapshots += 1
                    survivors = [m for m in self._queue if m["type"] == "snapshot"]
                    if survivors:
                        survivors[0]["body"]["gap"] = True
                    else:
                        self._pending_gap = True
                body = dict(body)
                if self._pending_gap:
                    body["gap"] = True
                    self._pending_gap = False
                else:
                    body.setdefault("gap", False)
            message = {"type": msg_type, "seq": self._next_seq(), "body": body}
            self._queue.append(message)
            self._ready.notify_all()
            return message

    def pop(self, timeout: float | None = None) -> dict | None:
        """Next message in order; None on timeout or once closed and drained."""
        with self._ready:
            if not self._queue and not self._closed:
                self._ready.wait(timeout)
            if self._queue:
                return self._queue.popleft()
            return None

    def drain(self) -> list[dict]:
        with self._ready:
            messages = list(self._queue)
            self._queue.clear()
            return messages

    def close(self) -> None:
        with self._ready:
            self._closed = True
            self._ready.notify_all()

    @property
    def closed(self) -> bool:
        with self._lock:
            return self._closed
