"""Content-addressed cache for raw backend responses.

Keys hash (task kind, model name, request payload); values are the raw
response text. Entries are immutable: the first write wins, so a fixed
cache store makes every backend operation a pure function of its inputs
and long runs resumable after a crash.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from pathlib import Path


def cache_key(kind: str, model: str, payload: str) -> str:
    material = json.dumps([kind, model, payload], ensure_ascii=True, separators=(",", ":"))
    return hashlib.sha256(material.encode("utf-8")).hexdigest()


class ResponseCache:
    """Key-value store, optionally persisted to a directory of JSON files."""

    def __init__(self, root: str | Path | None = None) -> None:
        self.root = Path(root) if root is not None else None
        if self.root is not None:
            self.root.mkdir(parents=True, exist_ok=True)
        self._memory: dict[str, str] = {}
        self.hits = 0
        self.misses = 0

    def _entry_path(self, key: str) -> Path:
        assert self.root is not None
        return self.root / key[:2] / f"{key}.json"

    def get(self, key: str) -> str | None:
        if key in self._memory:
            self.hits += 1
            return self._memory[key]
        if self.root is not None:
            path = self._entry_path(key)
            if path.exists():
                entry = json.loads(path.read_text(encoding="utf-8"))
                self._memory[key] = entry["value"]
                self.hits += 1
                return entry["value"]
        self.misses += 1
        return None

    def put(self, key: str, value: str) -> None:
        if key in self._memory:
            return
        self._memory[key] = value
        if self.root is None:
            return
        path = self._entry_path(key)
        if path.exists():
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        entry = {"key": key, "value": value, "created_at": time.time()}
        tmp = path.with_suffix(f".tmp.{os.getpid()}")
        tmp.write_text(json.dumps(entry, ensure_ascii=False), encoding="utf-8")
        os.replace(tmp, path)
