"""Durable append-only record store backing the design service.

One newline-delimited JSON log per record kind under the data directory,
plus an in-memory index rebuilt at startup. Writes are serialized through
a lock and fsynced before the id is returned, so an acknowledged record
survives a process restart. Ids are content-independent and never reused.

This is deliberately the smallest durable design: no external database,
no compaction. Read paths work off the in-memory index only.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from datetime import datetime, timezone
from pathlib import Path

from .errors import NotFoundError

KINDS = ("scene", "submission", "assignment")


class RecordStore:
    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._records: dict[str, dict[str, dict]] = {kind: {} for kind in KINDS}
        self._order: dict[str, list[str]] = {kind: [] for kind in KINDS}
        self._handles = {}
        for kind in KINDS:
            path = self._log_path(kind)
            if path.exists():
                with open(path, encoding="utf-8") as handle:
                    for line in handle:
                        line = line.strip()
                        if not line:
                            continue
                        rec = json.loads(line)
                        self._records[kind][rec["id"]] = rec
                        self._order[kind].append(rec["id"])
            self._handles[kind] = open(path, "a", encoding="utf-8")

    def _log_path(self, kind: str) -> Path:
        return self.data_dir / f"{kind}s.ndjson"

    def append(self, kind: str, body: dict) -> str:
        if kind not in KINDS:
            raise ValueError(f"unknown record kind {kind!r}")
        record_id = uuid.uuid4().hex
        record = {
            "id": record_id,
            "kind": kind,
            "created_at": datetime.now(timezone.utc).isoformat(),
            "body": body,
        }
        line = json.dumps(record, separators=(",", ":")) + "\n"
        with self._lock:
            handle = self._handles[kind]
            handle.write(line)
            handle.flush()
            os.fsync(handle.fileno())
            self._records[kind][record_id] = record
            self._order[kind].append(record_id)
        return record_id

    def get(self, kind: str, record_id: str) -> dict:
        try:
            return self._records[kind][record_id]
        except KeyError:
            raise NotFoundError(f"no {kind} record {record_id!r}") from None

    def has(self, kind: str, record_id: str) -> bool:
        return record_id in self._records[kind]

    def count(self, kind: str) -> int:
        return len(self._order[kind])

    def all(self, kind: str) -> list[dict]:
        return [self._records[kind][rid] for rid in self._order[kind]]

    def close(self) -> None:
        with self._lock:
            for handle in self._handles.values():
                handle.close()
