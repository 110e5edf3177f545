"""Text formats: vertex tables, TetGen-style node/ele bundles, legacy VTK, run manifests.

Coordinates are written as plain decimals with at most three fraction
digits (``-0.152``, ``0.21``, ``1``) and read back exactly into milliunits.
Index-based files are 0-based.
"""
from __future__ import annotations

import hashlib
import json
import os
import re
import tempfile
from decimal import Decimal
from pathlib import Path

import numpy as np

from .errors import ParseError
from .mesh import TetMesh

_DECIMAL = re.compile(r"^[+-]?(\d+(\.\d{0,3})?|\.\d{1,3})$")


def parse_coordinate(token: str) -> int:
    """Decimal string with <= 3 fraction digits to integer milliunits."""
    if not _DECIMAL.match(token):
        raise ValueError(f"not a decimal with at most 3 fraction digits: {token!r}")
    return int(Decimal(token) * 1000)


def format_coordinate(v: int) -> str:
    v = int(v)
    sign = "-" if v < 0 else ""
    whole, frac = divmod(abs(v), 1000)
    if frac == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}." + f"{frac:03d}".rstrip("0")


def _data_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_vertex_table(text: str, path=None) -> list[tuple[int, int, int]]:
    points = []
    for lineno, line in _data_lines(text):
        fields = line.split()
        if len(fields) != 3:
            raise ParseError(f"expected 3 coordinates, got {len(fields)}", lineno, path)
        try:
            points.append(tuple(parse_coordinate(f) for f in fields))
        except ValueError as exc:
            raise ParseError(str(exc), lineno, path) from None
    return points


def read_vertex_table(path) -> list[tuple[int, int, int]]:
    path = Path(path)
    return parse_vertex_table(path.read_text(), path)


def format_vertex_table(points, header: str | None = None) -> str:
    lines = [f"# {h}" for h in header.splitlines()] if header else []
    lines += [" ".join(format_coordinate(c) for c in p) for p in points]
    return "\n".join(lines) + "\n"


def atomic_write(path, text: str):
    """Write via a temp file in the same directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- node / ele ---------------------------------------------------------------


def bundle_paths(prefix) -> tuple[Path, Path]:
    """``foo``, ``foo.node`` or ``foo.ele`` all name the bundle ``foo.node`` + ``foo.ele``."""
    p = Path(prefix)
    if p.suffix in (".node", ".ele"):
        p = p.with_suffix("")
    return p.with_name(p.name + ".node"), p.with_name(p.name + ".ele")


def format_node(vertices) -> str:
    verts = np.asarray(vertices)
    lines = [f"{len(verts)} 3 0 0"]
    lines += [f"{i} " + " ".join(format_coordinate(c) for c in row) for i, row in enumerate(verts.tolist())]
    return "\n".join(lines) + "\n"


def format_ele(tets) -> str:
    tets = np.asarray(tets)
    lines = [f"{len(tets)} 4 0"]
    lines += [f"{i} " + " ".join(str(v) for v in row) for i, row in enumerate(tets.tolist())]
    return "\n".join(lines) + "\n"


def parse_node(text: str, path=None) -> np.ndarray:
    lines = list(_data_lines(text))
    if not lines:
        raise ParseError("empty node file", None, path)
    lineno, head = lines[0]
    try:
        n, dim = (int(x) for x in head.split()[:2])
    except ValueError:
        raise ParseError("bad node header", lineno, path) from None
    if dim != 3:
        raise ParseError(f"expected dimension 3, got {dim}", lineno, path)
    if len(lines) - 1 != n:
        raise ParseError(f"header announces {n} nodes, found {len(lines) - 1}", lineno, path)
    out = np.empty((n, 3), dtype=np.int64)
    for k, (lineno, line) in enumerate(lines[1:]):
        fields = line.split()
        if len(fields) < 4:
            raise ParseError("expected index and 3 coordinates", lineno, path)
        if int(fields[0]) != k:
            raise ParseError(f"node index {fields[0]} out of sequence (expected {k})", lineno, path)
        try:
            out[k] = [parse_coordinate(f) for f in fields[1:4]]
        except ValueError as exc:
            raise ParseError(str(exc), lineno, path) from None
    return out


def parse_ele(text: str, n_vertices: int | None = None, path=None) -> np.ndarray:
    lines = list(_data_lines(text))
    if not lines:
        raise ParseError("empty ele file", None, path)
    lineno, head = lines[0]
    try:
        n, per = (int(x) for x in head.split()[:2])
    except ValueError:
        raise ParseError("bad ele header", lineno, path) from None
    if per != 4:
        raise ParseError(f"expected 4 nodes per tet, got {per}", lineno, path)
    if len(lines) - 1 != n:
        raise ParseError(f"header announces {n} tets, found {len(lines) - 1}", lineno, path)
    out = np.empty((n, 4), dtype=np.int64)
    for k, (lineno, line) in enumerate(lines[1:]):
        fields = line.split()
        if len(fields) < 5 or int(fields[0]) != k:
            raise ParseError("malformed tet line", lineno, path)
        row = [int(f) for f in fields[1:5]]
        if n_vertices is not None and not all(0 <= v < n_vertices for v in row):
            raise ParseError(f"vertex index out of range in {row}", lineno, path)
        out[k] = row
    return out


def write_bundle(mesh: TetMesh, prefix) -> dict:
    """Write ``prefix.node`` / ``prefix.ele``; returns ``{path: sha256}``."""
    node, ele = bundle_paths(prefix)
    texts = {node: format_node(mesh.vertices), ele: format_ele(mesh.tets)}
    for path, text in texts.items():
        atomic_write(path, text)
    return {str(p): sha256_text(t) for p, t in texts.items()}


def read_bundle(prefix) -> TetMesh:
    node, ele = bundle_paths(prefix)
    verts = parse_node(node.read_text(), node)
    tets = parse_ele(ele.read_text(), len(verts), ele)
    return TetMesh(verts, tets, name=Path(node).stem)


def format_vtk(mesh: TetMesh, title: str = "acutecube tetrahedral mesh") -> str:
    """Legacy ASCII VTK unstructured grid (cell type 10), coordinates in cube units."""
    lines = ["# vtk DataFile Version 3.0", title, "ASCII", "DATASET UNSTRUCTURED_GRID"]
    lines.append(f"POINTS {mesh.n_vertices} double")
    lines += [" ".join(format_coordinate(c) for c in row) for row in mesh.vertices.tolist()]
    lines.append(f"CELLS {mesh.n_tets} {5 * mesh.n_tets}")
    lines += ["4 " + " ".join(str(v) for v in row) for row in mesh.tets.tolist()]
    lines.append(f"CELL_TYPES {mesh.n_tets}")
    lines += ["10"] * mesh.n_tets
    return "\n".join(lines) + "\n"


def write_vtk(mesh: TetMesh, path) -> dict:
    text = format_vtk(mesh)
    atomic_write(path, text)
    return {str(path): sha256_text(text)}


def format_identification(pairs) -> str:
    lines = ["# low_vertex high_vertex"] + [f"{a} {b}" for a, b in pairs]
    return "\n".join(lines) + "\n"


# -- manifests ----------------------------------------------------------------


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(path, command: str, arguments: dict, outputs: dict, dataset_checksum: str, version: str):
    doc = {
        "command": command,
        "arguments": arguments,
        "dataset_sha256": dataset_checksum,
        "tool_version": version,
        "outputs": dict(sorted(outputs.items())),
    }
    atomic_write(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return doc


def read_manifest(path) -> dict:
    return json.loads(Path(path).read_text())
