"""Deterministic CSV/JSON emission with a metadata header.

CSV files start with '#'-prefixed metadata lines (tool version, config hash,
free-form keys) followed by the header row and body; the body is
byte-identical across runs with the same configuration. JSON files carry the
same information under a "meta" key.
"""
from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

from . import __version__


def config_hash(config: dict) -> str:
    """Stable short hash of a flat configuration mapping."""
    canon = json.dumps(
        {str(k): config[k] for k in sorted(config, key=str)},
        sort_keys=True,
        default=str,
    )
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()[:16]


def metadata_lines(meta: dict) -> list[str]:
    lines = [f"# tool_version={__version__}"]
    for key in sorted(meta):
        lines.append(f"# {key}={meta[key]}")
    return lines


def write_csv(path, header: list[str], rows: list[list[str]], meta: dict | None = None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        for line in metadata_lines(meta or {}):
            f.write(line + "\n")
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def write_json(path, payload: dict, meta: dict | None = None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"meta": {"tool_version": __version__, **(meta or {})}, **payload}
    with open(path, "w") as f:
        json.dump(doc, f, indent=1, sort_keys=True)
        f.write("\n")
    return path


def read_csv_body(path) -> str:
    """File contents with metadata header lines stripped (for byte comparison)."""
    with open(path) as f:
        return "".join(line for line in f if not line.startswith("#"))


def read_json_body(path) -> dict:
    """Parsed JSON with the metadata key removed (for comparison)."""
    with open(path) as f:
        doc = json.load(f)
    doc.pop("meta", None)
    return doc
