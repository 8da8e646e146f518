"""File formats for point sets, colorings and graphs.

Point rows are written over F_p: each F_q coordinate expands to its e
coefficient digits, most significant first.  Every export starts with a JSON
header recording the field moduli so the data can be rechecked elsewhere.
"""

from __future__ import annotations

import csv
import io
import json

import numpy as np

from .certificates import _plain, digest, dumps
from .errors import ParameterError
from .gf import FieldSpec


def to_digits(points, field: FieldSpec) -> np.ndarray:
    points = np.asarray(points, dtype=np.int64)
    if len(points) == 0:
        return points.reshape(0, points.shape[1] * field.e if points.ndim == 2 else 0)
    return field.digits[points].reshape(len(points), -1)


def from_digits(rows, field: FieldSpec) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.int64)
    if rows.ndim != 2 or rows.shape[1] % field.e:
        raise ParameterError(f"row length is not a multiple of e = {field.e}")
    if np.any((rows < 0) | (rows >= field.p)):
        raise ParameterError(f"digits must lie in [0, {field.p})")
    grouped = rows.reshape(len(rows), -1, field.e)
    return grouped @ field.weights


def _header_line(header: dict) -> str:
    return "# " + json.dumps(_plain(header), sort_keys=True, separators=(",", ":")) + "\n"


def _rows_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(np.asarray(rows).tolist())
    return buf.getvalue()


def points_document(header: dict, points, field: FieldSpec, fmt: str = "json") -> str:
    rows = to_digits(points, field)
    if fmt == "json":
        return dumps({"header": header, "points": rows})
    if fmt == "csv":
        return _header_line(header) + _rows_csv(rows)
    raise ParameterError(f"unknown format {fmt!r}")


def partition_document(header: dict, classes: dict[int, np.ndarray], field: FieldSpec) -> str:
    return dumps({"header": header, "classes": {str(u): to_digits(pts, field) for u, pts in classes.items()}})


def coloring_document(header: dict, colors) -> str:
    """CSV rank,color preceded by a JSON header carrying the sha256 of the body."""
    body = "rank,color\n" + "".join(f"{r},{int(c)}\n" for r, c in enumerate(colors))
    return _header_line({**header, "digest": digest(body)}) + body


def graph_document(header: dict, edges) -> str:
    body = "".join(f"{a} {b}\n" for a, b in edges)
    return _header_line({**header, "digest": digest(body)}) + body


def _split_header(text: str) -> tuple[dict, list[str]]:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# "):
        raise ParameterError("missing JSON header line")
    return json.loads(lines[0][2:]), lines[1:]


def read_points(text: str) -> tuple[dict, FieldSpec, np.ndarray]:
    """Parse a JSON or CSV point export; returns (header, field, F_q indices)."""
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        header, rows = doc["header"], doc["points"]
    else:
        header, lines = _split_header(text)
        rows = [[int(c) for c in row] for row in csv.reader(lines) if row]
    field = FieldSpec.from_json(header["field"])
    if not rows:
        return header, field, np.zeros((0, int(header.get("dimension", 0))), dtype=np.int64)
    return header, field, from_digits(rows, field)


def read_graph(text: str) -> tuple[dict, list[tuple[int, int]]]:
    header, lines = _split_header(text)
    body = "".join(line + "\n" for line in lines)
    if "digest" in header and header["digest"] != digest(body):
        raise ParameterError("edge list does not match its digest")
    edges = [tuple(int(x) for x in line.split()) for line in lines if line.strip()]
    return header, edges
