"""Deterministic report emission: canonical JSON payloads and CSV curves.

Timestamps and wall-clock data never enter report.json (they go to a separate
run_meta.json) so identical configurations and seeds produce byte-identical
analysis payloads.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path

SCHEMA_VERSION = 1


def _sanitize(obj):
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    if hasattr(obj, "item"):  # numpy scalars
        return _sanitize(obj.item())
    if hasattr(obj, "to_dict"):
        return _sanitize(obj.to_dict())
    raise TypeError(f"cannot serialize {type(obj)!r}")


def canonical_json(obj) -> str:
    return json.dumps(_sanitize(obj), sort_keys=True, separators=(",", ":"), allow_nan=False)


def system_digest(description: dict) -> str:
    return hashlib.sha256(canonical_json(description).encode()).hexdigest()


def assemble_report(description: dict, analyses: dict) -> str:
    return canonical_json(
        {
            "schema_version": SCHEMA_VERSION,
            "system_digest": system_digest(description),
            "analyses": analyses,
        }
    )


def write_csv(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
