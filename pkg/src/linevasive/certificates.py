"""Verdicts with witnesses, and their JSON certificate form."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .gf import FieldSpec


@dataclass
class Verdict:
    property: str
    ok: bool
    witness: dict | None = None
    counts: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        out = {"property": self.property, "verdict": "ok" if self.ok else "fail", "counts": self.counts}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def _plain(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, FieldSpec):
        return obj.to_json()
    return obj


def certificate(verdict: Verdict, space: dict, fields: Sequence[FieldSpec], **extra) -> dict:
    cert = {"space": space, "fields": [f.to_json() for f in fields], **verdict.to_json()}
    cert.update(extra)
    return _plain(cert)


def dumps(obj: Any) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()
