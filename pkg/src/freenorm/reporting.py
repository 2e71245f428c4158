"""Versioned JSON reports with byte-deterministic bodies.

The report body contains only semantic inputs and outputs (exact values as
decimal strings of integers, never floats); timing and other run metadata
live outside the body, so re-running a command with equal inputs and
configuration yields byte-identical bodies regardless of thread count.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction

SCHEMA_VERSION = "1"


def frac_pair(f: Fraction) -> list[str]:
    return [str(f.numerator), str(f.denominator)]


def canonical_json_bytes(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True).encode()


def flatten(obj, prefix: str = "") -> list[tuple[str, str]]:
    rows: list[tuple[str, str]] = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            rows.extend(flatten(obj[k], f"{prefix}{k}."))
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            rows.extend(flatten(v, f"{prefix}{i}."))
    else:
        rows.append((prefix[:-1], "" if obj is None else str(obj)))
    return rows


@dataclass
class Report:
    command: str
    body: dict
    timing_seconds: float = 0.0
    meta: dict = field(default_factory=dict)

    def body_bytes(self) -> bytes:
        return canonical_json_bytes({"schema": SCHEMA_VERSION, "command": self.command, **self.body})

    def body_sha256(self) -> str:
        return hashlib.sha256(self.body_bytes()).hexdigest()

    def to_json_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "command": self.command,
            **self.body,
            "meta": {
                "timing_seconds": round(self.timing_seconds, 6),
                "body_sha256": self.body_sha256(),
                **self.meta,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2)

    def to_csv(self) -> str:
        rows = flatten({"schema": SCHEMA_VERSION, "command": self.command, **self.body})
        lines = ["key,value"]
        for key, value in rows:
            if "," in value or '"' in value:
                value = '"' + value.replace('"', '""') + '"'
            lines.append(f"{key},{value}")
        return "\n".join(lines) + "\n"


def error_object(kind: str, message: str, **extra) -> str:
    payload = {"error": {"kind": kind, "message": message, **extra}}
    return json.dumps(payload, sort_keys=True, indent=2)
