"""Network and pair JSON files, and CSV report output.

Network file::

    {"vertices": ["a", "b"], "origin": "a", "edges": [{"u": "a", "v": "b", "c": 1.5}]}

Pair file replaces ``edges`` with ``b_edges`` and ``c_edges``.  Unknown
fields are rejected.  Conductances are written with 17 significant digits,
so a written network re-reads bit-identically.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

from .comparison import ConductancePair
from .graph_core import Network


class FormatError(ValueError):
    """Malformed network or pair document."""


NETWORK_FIELDS = ("vertices", "origin", "edges")
PAIR_FIELDS = ("vertices", "origin", "b_edges", "c_edges")
EDGE_FIELDS = ("u", "v", "c")


def _load(text: str, source: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise FormatError(f"{source}: top level must be an object")
    return doc


def _check_fields(obj: dict, expected: Sequence[str], where: str) -> None:
    unknown = [k for k in obj if k not in expected]
    if unknown:
        raise FormatError(f"{where}: unknown field(s) {', '.join(map(repr, unknown))}")
    missing = [k for k in expected if k not in obj]
    if missing:
        raise FormatError(f"{where}: missing field {missing[0]!r}")


def _vertices(doc: dict, source: str) -> list[str]:
    verts = doc["vertices"]
    if not isinstance(verts, list) or not all(isinstance(v, str) for v in verts):
        raise FormatError(f"{source}: field 'vertices' must be an array of strings")
    if not isinstance(doc["origin"], str):
        raise FormatError(f"{source}: field 'origin' must be a string")
    return verts


def _edges(items, field: str, source: str) -> list[tuple[str, str, float]]:
    if not isinstance(items, list):
        raise FormatError(f"{source}: field {field!r} must be an array")
    out = []
    for k, item in enumerate(items):
        where = f"{source}: {field}[{k}]"
        if not isinstance(item, dict):
            raise FormatError(f"{where}: must be an object")
        _check_fields(item, EDGE_FIELDS, where)
        u, v, c = item["u"], item["v"], item["c"]
        if not isinstance(u, str) or not isinstance(v, str):
            raise FormatError(f"{where}: 'u' and 'v' must be strings")
        if isinstance(c, bool) or not isinstance(c, (int, float)) or not math.isfinite(c) or c <= 0:
            raise FormatError(f"{where}: field 'c' must be a number > 0")
        out.append((u, v, float(c)))
    return out


def parse_network(text: str, source: str = "<network>") -> Network:
    doc = _load(text, source)
    _check_fields(doc, NETWORK_FIELDS, source)
    verts = _vertices(doc, source)
    return Network(verts, _edges(doc["edges"], "edges", source), doc["origin"])


def parse_pair(text: str, source: str = "<pair>") -> ConductancePair:
    doc = _load(text, source)
    _check_fields(doc, PAIR_FIELDS, source)
    verts = _vertices(doc, source)
    return ConductancePair.from_edges(
        verts,
        doc["origin"],
        _edges(doc["b_edges"], "b_edges", source),
        _edges(doc["c_edges"], "c_edges", source),
    )


def read_network(path: str | Path) -> Network:
    return parse_network(Path(path).read_text(encoding="utf-8"), str(path))


def read_pair(path: str | Path) -> ConductancePair:
    return parse_pair(Path(path).read_text(encoding="utf-8"), str(path))


def _edge_lines(network: Network) -> list[str]:
    return [
        f'    {{"u": {json.dumps(u)}, "v": {json.dumps(v)}, "c": {c:.17g}}}'
        for (u, v), c in network.conductances.items()
    ]


def _header(network: Network) -> list[str]:
    return [
        "{",
        f'  "vertices": {json.dumps(list(network.vertices))},',
        f'  "origin": {json.dumps(network.origin)},',
    ]


def dump_network(network: Network) -> str:
    lines = _header(network) + ['  "edges": [', ",\n".join(_edge_lines(network)), "  ]", "}"]
    return "\n".join(lines) + "\n"


def dump_pair(pair: ConductancePair) -> str:
    lines = _header(pair.c)
    lines += ['  "b_edges": [', ",\n".join(_edge_lines(pair.b)), "  ],"]
    lines += ['  "c_edges": [', ",\n".join(_edge_lines(pair.c)), "  ]", "}"]
    return "\n".join(lines) + "\n"


def write_network(network: Network, path: str | Path) -> None:
    Path(path).write_text(dump_network(network), encoding="utf-8", newline="\n")


def write_pair(pair: ConductancePair, path: str | Path) -> None:
    Path(path).write_text(dump_pair(pair), encoding="utf-8", newline="\n")


def format_number(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(v) for v in row])
    return buf.getvalue()
