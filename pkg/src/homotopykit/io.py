"""JSON readers and writers for meshes, maps and reports.

Floats are written with ``repr`` precision so every file round-trips
exactly, and key order is fixed so identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import io as _io
import json

import numpy as np

from .errors import MeshMismatch
from .lie import GroupSpec
from .maps import CosetMap, GroupMap
from .mesh import SimplicialComplex3

__all__ = [
    "ParseError",
    "read_json",
    "dumps",
    "mesh_to_json",
    "mesh_from_json",
    "map_to_dict",
    "map_from_dict",
    "load_mesh",
    "load_map",
    "save_json",
    "report_to_csv",
]


class ParseError(ValueError):
    """Malformed input file; the message carries line and column."""


def read_json(path_or_text, *, is_text=False):
    if is_text:
        text, name = path_or_text, "<string>"
    else:
        name = str(path_or_text)
        with open(path_or_text, encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"{name}:{err.lineno}:{err.colno}: {err.msg}") from None


def dumps(obj) -> str:
    return json.dumps(_plain(obj), indent=1, allow_nan=True) + "\n"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def save_json(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))


# ------------------------------------------------------------------ meshes

def mesh_to_json(c: SimplicialComplex3) -> dict:
    return c.to_dict()


def mesh_from_json(data) -> SimplicialComplex3:
    for key in ("vertices", "tets"):
        if key not in data:
            raise ParseError(f"mesh file lacks {key!r}")
    return SimplicialComplex3.from_dict(data)


def load_mesh(path) -> SimplicialComplex3:
    return mesh_from_json(read_json(path))


# ------------------------------------------------------------------ maps

def _pairs(M):
    return [[float(z.real), float(z.imag)] for z in np.asarray(M).ravel()]


def _unpairs(entries, shape):
    arr = np.asarray(entries, dtype=float)
    if arr.shape != (int(np.prod(shape)), 2):
        raise ParseError(f"expected {int(np.prod(shape))} [re, im] pairs, got shape {arr.shape}")
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(shape)


def map_to_dict(m) -> dict:
    """GroupMap or CosetMap as the documented JSON object.

    ``values[v][f]`` holds the N^2 row-major ``[re, im]`` entries of the
    factor-``f`` matrix at vertex ``v`` (group maps), or a list of N such
    matrices, one per projector (coset maps).
    """
    coset = isinstance(m, CosetMap)
    vals = []
    for v in range(m.complex.n_vertices):
        per = []
        for arr in m.values:
            per.append([_pairs(P) for P in arr[v]] if coset else _pairs(arr[v]))
        vals.append(per)
    return {"mesh": m.complex_ref, "kind": "coset" if coset else "group",
            "group": m.group.to_dict(), "values": vals}


def map_from_dict(data, mesh: SimplicialComplex3, *, check=True):
    try:
        factors = [int(n) for n in data["group"]["factors"]]
        values = data["values"]
    except (KeyError, TypeError):
        raise ParseError("map file needs 'group': {'factors': [...]} and 'values'") from None
    if data.get("mesh") is not None and data["mesh"] != mesh.id:
        raise MeshMismatch(f"map was written for mesh {data['mesh']}, not {mesh.id}")
    if len(values) != mesh.n_vertices:
        raise MeshMismatch(f"{len(values)} vertex values for a mesh with {mesh.n_vertices} vertices")
    kind = data.get("kind")
    if kind is None:
        # coset values nest one level deeper
        first = values[0][0] if values else []
        kind = "coset" if first and isinstance(first[0][0], list) else "group"
    group = GroupSpec(tuple(factors))
    arrays = []
    for f, n in enumerate(factors):
        if kind == "coset":
            arr = np.array([_unpairs([x for P in vv[f] for x in P], (n, n, n)) for vv in values])
        else:
            arr = np.array([_unpairs(vv[f], (n, n)) for vv in values])
        arrays.append(arr.reshape((mesh.n_vertices,) + ((n, n, n) if kind == "coset" else (n, n))))
    cls = CosetMap if kind == "coset" else GroupMap
    return cls(mesh, arrays, group, check=check)


def load_map(path, mesh: SimplicialComplex3):
    return map_from_dict(read_json(path), mesh)


# ------------------------------------------------------------------ csv

def _flatten(prefix, obj, out):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append((prefix, ""))
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append((prefix, obj))


def report_to_csv(report) -> str:
    """Flatten a report into ``key,value`` rows (nested keys dotted)."""
    rows = []
    if isinstance(report, list) and report and isinstance(report[0], dict) and "level" in report[0]:
        keys = list(report[0])
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(keys)
        for r in report:
            w.writerow([_plain(r[k]) for k in keys])
        return buf.getvalue()
    _flatten("", _plain(report), rows)
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for k, v in rows:
        w.writerow([k, repr(v) if isinstance(v, float) else v])
    return buf.getvalue()
