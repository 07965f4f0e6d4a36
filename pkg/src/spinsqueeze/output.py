"""Result serialization: CSV tables, JSON summaries, run manifests.

CSV files follow RFC 4180 (comma separators, CRLF line endings, header
row); floating-point values carry 17 significant digits so files
round-trip bit for bit.  The manifest records everything needed to
reproduce a run: the resolved configuration, its hash, the master seed
and the tool version (plus wall time, which is informational and the one
non-reproducible field).
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from . import __version__
from .config import RunConfig, config_hash, config_to_mapping


def format_number(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.17g}"
    return str(value)


def write_csv(path, header: list[str], rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)  # csv default lineterminator is CRLF
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_number(v) for v in row])
    return path


def write_json(path, payload: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, allow_nan=True) + "\n")
    return path


def write_manifest(
    path, cfg: RunConfig, seed: int, wall_time_s: float, outputs: list[str]
) -> Path:
    payload = {
        "tool": "spinsqueeze",
        "tool_version": __version__,
        "config_sha256": config_hash(cfg),
        "master_seed": seed,
        "resolved_config": config_to_mapping(cfg),
        "outputs": sorted(outputs),
        "wall_time_s": wall_time_s,
    }
    return write_json(path, payload)
