"""Graph files and result documents.

Two graph formats are accepted:

* JSON: ``{"directed": bool, "nodes": int, "edges": [{"u", "v", "w", "omega"}]}``
  with ``omega`` defaulting to 1.0;
* text: one edge per line, ``u v w [omega]``, ``#`` starts a comment line.
  The node count is the largest label plus one; direction comes from the
  caller.

Result documents are JSON with every float written to 17 significant
digits, so values survive a round trip bit for bit.
"""
from __future__ import annotations

import hashlib
import json
import math
from importlib import resources
from pathlib import Path
from typing import Any

from .errors import GraphFileError, InputError
from .graph import Graph, build_graph

__all__ = [
    "graph_to_dict",
    "graph_from_dict",
    "parse_graph_json",
    "parse_graph_text",
    "read_graph",
    "write_graph",
    "graph_digest",
    "dumps",
    "load_schema",
]


def graph_to_dict(G: Graph) -> dict:
    return {
        "directed": G.directed,
        "nodes": G.n_nodes,
        "edges": [{"u": e.u, "v": e.v, "w": e.w, "omega": e.omega} for e in G.edges],
    }


def _number(value, line, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise GraphFileError(f"expected a number, got {value!r}", line=line, field=name)
    if not math.isfinite(value):
        raise GraphFileError(f"non-finite value {value!r}", line=line, field=name)
    return value


def _node(value, line, name):
    value = _number(value, line, name)
    if int(value) != value:
        raise GraphFileError(f"node labels must be integers, got {value!r}", line=line, field=name)
    return int(value)


def graph_from_dict(doc: Any) -> Graph:
    if not isinstance(doc, dict):
        raise GraphFileError("graph document must be a JSON object")
    for key in ("directed", "edges"):
        if key not in doc:
            raise GraphFileError("missing key", field=key)
    if not isinstance(doc["directed"], bool):
        raise GraphFileError("must be true or false", field="directed")
    if not isinstance(doc["edges"], list):
        raise GraphFileError("must be a list", field="edges")
    edges = []
    for k, item in enumerate(doc["edges"]):
        where = f"edges[{k}]"
        if not isinstance(item, dict):
            raise GraphFileError("edge must be an object", field=where)
        for key in ("u", "v", "w"):
            if key not in item:
                raise GraphFileError("missing key", field=f"{where}.{key}")
        edges.append((
            _node(item["u"], None, f"{where}.u"),
            _node(item["v"], None, f"{where}.v"),
            _number(item["w"], None, f"{where}.w"),
            _number(item.get("omega", 1.0), None, f"{where}.omega"),
        ))
    if "nodes" in doc:
        n = _node(doc["nodes"], None, "nodes")
    else:
        n = 1 + max((max(u, v) for u, v, _, _ in edges), default=0)
    return build_graph(n, doc["directed"], edges)


def parse_graph_json(text: str) -> Graph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFileError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
    return graph_from_dict(doc)


def parse_graph_text(text: str, directed: bool = False) -> Graph:
    edges = []
    names = ("u", "v", "w", "omega")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (3, 4):
            raise GraphFileError(f"expected 'u v w [omega]', got {len(parts)} fields", line=lineno)
        vals = []
        for name, tok in zip(names, parts):
            try:
                vals.append(float(tok))
            except ValueError:
                raise GraphFileError(f"not a number: {tok!r}", line=lineno, field=name) from None
        u = _node(vals[0], lineno, "u")
        v = _node(vals[1], lineno, "v")
        edges.append((u, v, vals[2], vals[3] if len(vals) == 4 else 1.0))
    if not edges:
        raise GraphFileError("no edges found")
    n = 1 + max(max(u, v) for u, v, _, _ in edges)
    return build_graph(n, directed, edges)


def read_graph(path: str | Path, directed: bool | None = None) -> Graph:
    """Read a graph file, choosing the format by content.

    ``directed`` applies to text files only; for JSON it must agree with the
    document when given.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    if text.lstrip().startswith("{"):
        G = parse_graph_json(text)
        if directed is not None and directed != G.directed:
            raise InputError(f"{path} declares directed={G.directed}")
        return G
    return parse_graph_text(text, bool(directed))


def write_graph(G: Graph, path: str | Path) -> None:
    Path(path).write_text(dumps(graph_to_dict(G)) + "\n")


def graph_digest(G: Graph) -> str:
    """SHA-256 of the canonical JSON form; equal graphs share a digest."""
    return "sha256:" + hashlib.sha256(dumps(graph_to_dict(G)).encode()).hexdigest()


def _encode(obj, indent, level):
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    sep = "," if indent is None else ","
    colon = ": "
    if obj is None or obj is True or obj is False:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return "null"
        text = format(obj, ".17g")
        if "." not in text and "e" not in text and "inf" not in text:
            text += ".0"
        return text
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}{colon}{_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + sep.join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}{_encode(v, indent, level + 1)}" for v in obj]
        return "[" + sep.join(items) + end + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return _encode(obj.item(), indent, level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int | None = None) -> str:
    """JSON text with floats at 17 significant digits."""
    return _encode(obj, indent, 0)


def load_schema(name: str) -> dict:
    """Bundled JSON schema: ``"result"`` or ``"graph"``."""
    text = resources.files("treedegree").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)
