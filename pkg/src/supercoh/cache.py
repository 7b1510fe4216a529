"""In-process memo table and an optional content-addressed disk cache."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
from pathlib import Path
from typing import Any, Callable, Hashable


class Memo:
    """Dictionary memo with lock-protected insertion.

    Values are computed outside the lock and published with a single
    ``setdefault``, so readers never see a half-built entry and concurrent
    writers agree on the first published value.
    """

    def __init__(self) -> None:
        self._data: dict[Hashable, Any] = {}
        self._lock = threading.Lock()

    def get_or_compute(self, key: Hashable, fn: Callable[[], Any]) -> Any:
        try:
            return self._data[key]
        except KeyError:
            pass
        value = fn()
        with self._lock:
            return self._data.setdefault(key, value)

    def clear(self) -> None:
        with self._lock:
            self._data.clear()

    def __len__(self) -> int:
        return len(self._data)

    def __contains__(self, key: Hashable) -> bool:
        return key in self._data


def memoized(memo: Memo):
    """Decorator memoizing a function of hashable arguments in ``memo``."""

    def wrap(fn):
        def inner(*args):
            return memo.get_or_compute((fn.__name__,) + args, lambda: fn(*args))

        inner.__name__ = fn.__name__
        inner.__doc__ = fn.__doc__
        inner.__wrapped__ = fn
        return inner

    return wrap


def cache_key(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


class DiskCache:
    """One JSON file per key under ``root``, named by the sha256 of the key."""

    def __init__(self, root: str | os.PathLike) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        if not os.access(self.root, os.W_OK):
            raise PermissionError(f"cache directory {self.root} is not writable")

    def path(self, key: dict) -> Path:
        h = cache_key(key)
        return self.root / h[:2] / f"{h}.json"

    def get(self, key: dict) -> Any | None:
        p = self.path(key)
        if not p.exists():
            return None
        with open(p) as fh:
            doc = json.load(fh)
        return doc["value"] if doc.get("key") == key else None

    def put(self, key: dict, value: Any) -> None:
        p = self.path(key)
        p.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=p.parent, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump({"key": key, "value": value}, fh, sort_keys=True)
        os.replace(tmp, p)

    def get_or_compute(self, key: dict, fn: Callable[[], Any]) -> Any:
        hit = self.get(key)
        if hit is not None:
            return hit
        value = fn()
        self.put(key, value)
        return value
