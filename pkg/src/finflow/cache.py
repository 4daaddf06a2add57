"""Content-addressed cache of reports.

Entries live in ``<dir>/<key[:2]>/<key>.json``. A key is the SHA-256 of the
canonical JSON of its key material (operation tag, canonical encodings and
parameters). Writes go through a temporary file and ``os.replace`` so
concurrent writers never expose a partial entry. Every entry carries a
checksum of its value, and an entry that fails to parse or verify is deleted
and reported as a miss.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .errors import FinflowError

ENV_VAR = "FINFLOW_CACHE_DIR"
FORMAT_VERSION = 1


class IoError(FinflowError):
    """The cache directory cannot be read or written."""


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def make_key(material: dict[str, Any]) -> str:
    return hashlib.sha256(canonical_json(material).encode()).hexdigest()


def _checksum(value: Any) -> str:
    return hashlib.sha256(canonical_json(value).encode()).hexdigest()


@dataclass
class CacheEntry:
    key: str
    value: Any
    meta: dict[str, Any]


class Cache:
    def __init__(self, directory: str | os.PathLike | None = None):
        directory = directory or os.environ.get(ENV_VAR)
        if not directory:
            raise IoError(f"no cache directory (flag or {ENV_VAR})")
        self.root = Path(directory)
        try:
            self.root.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise IoError(f"cannot create cache directory {self.root}: {exc}") from None

    def path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, key: str) -> CacheEntry | None:
        path = self.path(key)
        try:
            raw = path.read_text()
        except FileNotFoundError:
            return None
        except OSError as exc:
            raise IoError(f"cannot read {path}: {exc}") from None
        try:
            doc = json.loads(raw)
            if doc["key"] != key or doc["checksum"] != _checksum(doc["value"]):
                raise ValueError("checksum mismatch")
            return CacheEntry(key, doc["value"], doc.get("meta", {}))
        except (ValueError, KeyError, TypeError):
            self.evict(key)
            return None

    def put(self, key: str, value: Any, stats: dict[str, Any] | None = None) -> CacheEntry:
        from . import __version__

        meta = {"tool_version": __version__, "format": FORMAT_VERSION,
                "timestamp": time.time(), "stats": stats or {}}
        doc = {"key": key, "value": value, "checksum": _checksum(value), "meta": meta}
        path = self.path(key)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
            with os.fdopen(fd, "w") as fh:
                fh.write(canonical_json(doc))
            os.replace(tmp, path)
        except OSError as exc:
            raise IoError(f"cannot write {path}: {exc}") from None
        return CacheEntry(key, value, meta)

    def evict(self, key: str) -> None:
        try:
            self.path(key).unlink()
        except FileNotFoundError:
            pass
        except OSError as exc:
            raise IoError(f"cannot evict {key}: {exc}") from None
