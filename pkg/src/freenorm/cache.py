"""Content-addressed on-disk cache for convolution powers.

Entries are keyed by the sha256 of (group spec, canonical base element,
exponent) and store the canonical text of the result together with its own
checksum.  A corrupted or tampered entry never surfaces: the checksum is
verified on load and a mismatch reads as a miss, so callers recompute.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

from .algebra import AlgebraElement, parse_element

SCHEMA = "freenorm-power-cache-1"
ENV_CACHE_DIR = "FREENORM_CACHE_DIR"


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_CACHE_DIR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "freenorm"


class PowerCache:
    """load/store convolution powers keyed by (base element, m, group)."""

    def __init__(self, directory: str | Path | None = None):
        self.directory = Path(directory) if directory is not None else default_cache_dir()
        self.directory.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0

    def key(self, base: AlgebraElement, m: int) -> str:
        payload = f"{base.ctx.spec_string()}\n{base.serialize()}\nm={m}".encode()
        return hashlib.sha256(payload).hexdigest()

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def load(self, base: AlgebraElement, m: int) -> AlgebraElement | None:
        key = self.key(base, m)
        path = self._path(key)
        if not path.exists():
            self.misses += 1
            return None
        try:
            record = json.loads(path.read_text())
            text = record["element"]
            digest = hashlib.sha256(text.encode()).hexdigest()
            if record.get("schema") != SCHEMA or record.get("sha256") != digest:
                self.misses += 1
                return None
            element = parse_element(text, base.ctx)
        except Exception:
            self.misses += 1
            return None
        self.hits += 1
        return element

    def store(self, base: AlgebraElement, m: int, value: AlgebraElement) -> str:
        key = self.key(base, m)
        text = value.serialize()
        record = {
            "schema": SCHEMA,
            "key": key,
            "group": base.ctx.spec_string(),
            "m": m,
            "element": text,
            "sha256": hashlib.sha256(text.encode()).hexdigest(),
        }
        path = self._path(key)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(record, sort_keys=True, indent=0))
        os.replace(tmp, path)
        return key
