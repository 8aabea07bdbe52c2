"""On-disk JSON cache for expensive counts.

Entries are plain JSON files under one directory; large integers are stored
as decimal strings so nothing is lost to floating point.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path

ENV_VAR = "CVTOOL_CACHE"


def default_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "cvtool"


def code_version() -> str:
    """Short hash of the package sources, so stale entries are never reused."""
    h = hashlib.sha256()
    for p in sorted(Path(__file__).parent.glob("*.py")):
        h.update(p.read_bytes())
    return h.hexdigest()[:12]


def dumps(obj) -> str:
    """The canonical JSON text used for every file the tool writes."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


@dataclass
class Cache:
    root: Path
    enabled: bool = True

    def _path(self, key: str) -> Path:
        safe = "".join(c if c.isalnum() or c in "-_." else "_" for c in key)
        return self.root / f"{safe}.json"

    def get(self, key: str):
        if not self.enabled:
            return None
        p = self._path(key)
        if not p.exists():
            return None
        try:
            return json.loads(p.read_text())
        except (OSError, json.JSONDecodeError):
            return None

    def put(self, key: str, value) -> None:
        if not self.enabled:
            return
        self.root.mkdir(parents=True, exist_ok=True)
        tmp = self._path(key).with_suffix(".tmp")
        tmp.write_text(dumps(value))
        tmp.replace(self._path(key))

    def entries(self) -> list:
        if not self.root.exists():
            return []
        return sorted(p.stem for p in self.root.glob("*.json"))

    def clear(self) -> int:
        n = 0
        for p in self.root.glob("*.json") if self.root.exists() else []:
            p.unlink()
            n += 1
        return n
