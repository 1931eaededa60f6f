"""Append-only JSON-lines audit log of routed commands and their results.

Timestamps are simulated seconds and key order is fixed, so identical
runs produce byte-identical logs. The log is what makes the
stream-separation guarantee externally checkable after the fact.
"""
from __future__ import annotations

import io
import json
import threading


class AuditLog:
    def __init__(self, path: str | None = None):
        self._lock = threading.Lock()
        self._entries: list[dict] = []
        self._file: io.TextIOBase | None = None
        if path is not None:
            self._file = open(path, "w", encoding="utf-8")

    def record(self, entry: dict) -> None:
        line = json.dumps(entry, sort_keys=True)
        with self._lock:
            self._entries.append(entry)
            if self._file is not None:
                self._file.write(line + "\n")
                self._file.flush()

    def entries(self) -> list[dict]:
        with self._lock:
            return list(self._entries)

    def dumps(self) -> str:
        with self._lock:
            return "".join(json.dumps(e, sort_keys=True) + "\n" for e in self._entries)

    def close(self) -> None:
        with self._lock:
            if self._file is not None:
                self._file.flush()
                self._file.close()
                self._file = None


def read_audit_lines(path: str) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]
