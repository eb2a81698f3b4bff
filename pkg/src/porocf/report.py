"""Key-value text report with a JSON sibling."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__

__all__ = ["SCHEMA_VERSION", "ReportDocument", "write_report"]

SCHEMA_VERSION = 1


@dataclass
class ReportDocument:
    config: dict = field(default_factory=dict)
    config_hash: str = ""
    sections: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    tool_version: str = __version__


def _plain(x):
    # JSON has no inf/nan and no complex numbers
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x


def _flatten(prefix: str, x, out: list):
    if isinstance(x, dict):
        for k in sorted(x, key=str):
            _flatten(f"{prefix}.{k}" if prefix else str(k), x[k], out)
    elif isinstance(x, list) and x and all(isinstance(v, dict) for v in x):
        for i, v in enumerate(x):
            _flatten(f"{prefix}.{i}", v, out)
    else:
        out.append(f"{prefix} = {json.dumps(x)}")


def write_report(doc: ReportDocument, stem) -> tuple[Path, Path]:
    """Write ``<stem>.txt`` and ``<stem>.json``; I/O errors propagate unchanged."""
    stem = Path(stem)
    body = _plain({"schema_version": SCHEMA_VERSION, "tool_version": doc.tool_version,
                   "config_hash": doc.config_hash, "config": doc.config,
                   "sections": doc.sections, "notes": list(doc.notes)})
    lines: list[str] = []
    for key in ("schema_version", "tool_version", "config_hash"):
        lines.append(f"{key} = {json.dumps(body[key])}")
    _flatten("config", body["config"], lines)
    _flatten("sections", body["sections"], lines)
    for i, note in enumerate(body["notes"]):
        lines.append(f"notes.{i} = {json.dumps(note)}")
    txt, js = stem.with_suffix(".txt"), stem.with_suffix(".json")
    txt.write_text("\n".join(lines) + "\n", encoding="utf-8")
    js.write_text(json.dumps(body, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return txt, js
