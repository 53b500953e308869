"""Deterministic JSON / text rendering of analysis reports."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .linalg import Tolerances

TOOL = "tpsforge"
SIG_DIGITS = 15


def _round(x: float) -> float | str:
    if not np.isfinite(x):
        return repr(float(x))
    return float(f"{x:.{SIG_DIGITS}g}")


def sanitize(obj: Any) -> Any:
    """Convert numpy/complex/tuple payloads into plain JSON values (floats at 15 digits)."""
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return sanitize(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _round(float(obj.real)), "im": _round(float(obj.imag))}
    if isinstance(obj, (float, np.floating)):
        return _round(float(obj))
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def digest(payload: Any) -> str:
    text = json.dumps(sanitize(payload), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass
class Report:
    command: str
    version: str
    input_digest: str
    seed: int
    tolerances: Tolerances
    sections: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def as_dict(self) -> dict:
        return sanitize({
            "tool": TOOL,
            "version": self.version,
            "command": self.command,
            "input_digest": self.input_digest,
            "seed": self.seed,
            "tolerances": self.tolerances.as_dict(),
            "sections": self.sections,
            "checks": self.checks,
            "passed": self.passed,
        })


def to_json(report: Report) -> str:
    return json.dumps(report.as_dict(), sort_keys=True, indent=2) + "\n"


def parse_json(text: str) -> dict:
    return json.loads(text)


def _text_lines(obj: Any, indent: int) -> list[str]:
    pad = "  " * indent
    out = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and not _flat(v):
                out.append(f"{pad}{k}:")
                out.extend(_text_lines(v, indent + 1))
            else:
                out.append(f"{pad}{k}: {_inline(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and v and not _flat(v):
                out.append(f"{pad}-")
                out.extend(_text_lines(v, indent + 1))
            else:
                out.append(f"{pad}- {_inline(v)}")
    else:
        out.append(f"{pad}{_inline(obj)}")
    return out


def _flat(v: Any) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _inline(v: Any) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_inline(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{}"
    return json.dumps(v)


def to_text(report: Report) -> str:
    return "\n".join(_text_lines(report.as_dict(), 0)) + "\n"
