"""Canonical dataset and the meshes built from it.

The embedded table ``data/vertices277.txt`` lists all 277 vertices.  On load
the 26 points inside the generating region are taken as the seed and their
orbit is regenerated; any disagreement with the table is a hard error.
Set ``ACUTECUBE_DATASET`` to load a different table with the same checks.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from .delaunay import DegeneracyPolicy, triangulate
from .errors import DatasetIntegrityError, EndFaceMismatch, FaceMismatch
from .io import parse_vertex_table, sha256_text
from .mesh import CUBE, TetMesh
from .symmetry import generate_vertices, region_contains

DATASET_ENV = "ACUTECUBE_DATASET"
SEED_SIZE = 26
AXES = {"x": 0, "y": 1, "z": 2}
VARIANT_CENTER = ((-50, -50, 50), (-50, 50, -50), (50, -50, -50), (50, 50, 50))


@dataclass(frozen=True)
class CanonicalDataset:
    seed26: tuple
    full277: tuple
    checksum: str
    source: str = ""
    stage_sizes: tuple = field(default=())


def dataset_text() -> tuple[str, str]:
    override = os.environ.get(DATASET_ENV)
    if override:
        return Path(override).read_text(), str(override)
    ref = resources.files("acutecube").joinpath("data/vertices277.txt")
    return ref.read_text(), "acutecube/data/vertices277.txt"


def load_dataset(text: str | None = None, source: str = "<text>") -> CanonicalDataset:
    """Parse a vertex table and cross-check it against the orbit of its seed."""
    if text is None:
        text, source = dataset_text()
    full = parse_vertex_table(text, source)
    if len(set(full)) != len(full):
        raise DatasetIntegrityError(f"{source}: duplicate vertices in table")
    seed = [p for p in full if region_contains(p)]
    if len(seed) != SEED_SIZE:
        raise DatasetIntegrityError(f"{source}: {len(seed)} points in the generating region, expected {SEED_SIZE}")
    gen = generate_vertices(seed)
    if set(gen.points) != set(full):
        missing = sorted(set(full) - set(gen.points))[:5]
        extra = sorted(set(gen.points) - set(full))[:5]
        raise DatasetIntegrityError(
            f"{source}: generated orbit disagrees with table (not generated: {missing}, not listed: {extra})"
        )
    return CanonicalDataset(tuple(seed), tuple(full), sha256_text(text), source, tuple(gen.stage_sizes))


@lru_cache(maxsize=None)
def _default_dataset() -> CanonicalDataset:
    return load_dataset()


def canonical_dataset() -> CanonicalDataset:
    if os.environ.get(DATASET_ENV):
        return load_dataset()
    return _default_dataset()


@lru_cache(maxsize=4)
def _cube(points: tuple, policy: str) -> TetMesh:
    return triangulate(points, policy, name="cube")


def canonical_cube(policy: DegeneracyPolicy | str = DegeneracyPolicy.REJECT) -> TetMesh:
    """Delaunay mesh of the 277 table vertices."""
    return _cube(canonical_dataset().full277, DegeneracyPolicy(policy).value)


@lru_cache(maxsize=4)
def _variant(points: tuple, policy: str) -> TetMesh:
    pts = [p for p in points if p != (0, 0, 0)] + list(VARIANT_CENTER)
    return triangulate(pts, policy, name="variant")


def variant_1387(policy: DegeneracyPolicy | str = DegeneracyPolicy.REJECT) -> TetMesh:
    """Origin replaced by a small regular tetrahedron of four vertices, then re-triangulated."""
    return _variant(canonical_dataset().full277, DegeneracyPolicy(policy).value)


# -- reflections and tilings --------------------------------------------------


def reflect(mesh: TetMesh, axis: int, plane: int) -> TetMesh:
    """Mirror image through the plane ``coordinate[axis] == plane``, orientation restored."""
    v = mesh.vertices.copy()
    v[:, axis] = 2 * plane - v[:, axis]
    return TetMesh(v, mesh.tets[:, [0, 1, 3, 2]], name=mesh.name)


def merge(meshes) -> TetMesh:
    """Union of meshes with coincident vertices merged by exact coordinates."""
    index: dict = {}
    coords = []
    tets = []
    for m in meshes:
        local = np.empty(m.n_vertices, dtype=np.int64)
        for i, p in enumerate(map(tuple, m.vertices.tolist())):
            j = index.get(p)
            if j is None:
                j = index[p] = len(coords)
                coords.append(p)
            local[i] = j
        tets.append(local[m.tets])
    return TetMesh(np.array(coords, dtype=np.int64), np.vstack(tets))


def _face_triangles(mesh: TetMesh, axis: int, value: int) -> set:
    v = mesh.vertices
    out = set()
    for tri in mesh.boundary_triangles.tolist():
        if all(v[i, axis] == value for i in tri):
            out.add(frozenset(tuple(v[i].tolist()) for i in tri))
    return out


def reflect_prism(mesh: TetMesh, axis: str = "z", plane: int = CUBE) -> TetMesh:
    """Glue ``mesh`` to its mirror image through a face plane (default ``z = +1``).

    Raises FaceMismatch if ``mesh`` has no boundary triangles on the plane or
    the two copies do not triangulate the shared face identically.
    """
    ax = AXES[axis]
    mirror = reflect(mesh, ax, plane)
    own = _face_triangles(mesh, ax, plane)
    if not own:
        raise FaceMismatch(f"mesh has no boundary face on {axis} = {plane}")
    if own != _face_triangles(mirror, ax, plane):
        raise FaceMismatch(f"face {axis} = {plane} triangulated differently by the two copies")
    out = merge([mesh, mirror])
    return TetMesh(out.vertices, out.tets, name="prism")


def _cube_copy(mesh: TetMesh, idx) -> TetMesh:
    """Copy for grid cell ``idx``: reflected on every axis where the index is odd."""
    v = mesh.vertices.copy()
    flips = 0
    for ax, k in enumerate(idx):
        if k % 2:
            v[:, ax] = -v[:, ax]
            flips += 1
        v[:, ax] += 2 * CUBE * k
    tets = mesh.tets[:, [0, 1, 3, 2]] if flips % 2 else mesh.tets
    return TetMesh(v, tets)


@dataclass(frozen=True)
class TilingSpec:
    nx: int = 1
    ny: int = 1
    nz: int = 1
    periodic: tuple = ()

    def __post_init__(self):
        if min(self.nx, self.ny, self.nz) < 1:
            raise ValueError("tiling counts must be >= 1")
        bad = set(self.periodic) - set(AXES)
        if bad:
            raise ValueError(f"unknown periodic axes {sorted(bad)}")


def tile_box(spec: TilingSpec, cube: TetMesh | None = None):
    """``nx x ny x nz`` brick of cubes, neighbours mirrored across shared faces.

    Returns a TetMesh, or a PeriodicComplex when ``spec.periodic`` is set.
    """
    cube = canonical_cube() if cube is None else cube
    copies = [
        _cube_copy(cube, (i, j, k)) for i in range(spec.nx) for j in range(spec.ny) for k in range(spec.nz)
    ]
    out = merge(copies)
    out = TetMesh(out.vertices, out.tets, name=f"box{spec.nx}x{spec.ny}x{spec.nz}")
    if spec.periodic:
        return periodic_identify(out, axes=spec.periodic)
    return out


def expected_box_vertices(nx: int, ny: int, nz: int, cube: TetMesh | None = None) -> int:
    """Merged vertex count by inclusion-exclusion over shared faces, edges and corners."""
    cube = canonical_cube() if cube is None else cube
    v = cube.vertices
    inner = np.abs(v) < CUBE
    n_int = int(inner.all(axis=1).sum())
    # per-face interior points, per-edge interior points (cube symmetric by construction of the grid)
    on_face = [(int(((np.abs(v[:, a]) == CUBE) & inner[:, [b for b in range(3) if b != a]].all(axis=1)).sum()) // 2)
               for a in range(3)]
    on_edge = [(int((inner[:, a] & (np.abs(v[:, [b for b in range(3) if b != a]]) == CUBE).all(axis=1)).sum()) // 4)
               for a in range(3)]
    n = (nx, ny, nz)
    total = n_int * nx * ny * nz
    for a in range(3):
        b, c = (k for k in range(3) if k != a)
        total += on_face[a] * (n[a] + 1) * n[b] * n[c]
        total += on_edge[a] * n[a] * (n[b] + 1) * (n[c] + 1)
    total += (nx + 1) * (ny + 1) * (nz + 1)
    return total


# -- periodic quotient --------------------------------------------------------


@dataclass
class PeriodicComplex:
    """Mesh with its end faces identified by translation.

    ``mesh`` keeps the unquotiented geometry (all angles are measured there);
    ``vertex_class`` maps each vertex to its class, ``pairs`` lists the
    identified ``(low_vertex, high_vertex)`` pairs, and ``quotient`` is the
    purely combinatorial complex on the classes.
    """

    mesh: TetMesh
    vertex_class: np.ndarray
    pairs: list
    axes: tuple

    @property
    def n_classes(self) -> int:
        return int(self.vertex_class.max()) + 1

    @property
    def quotient(self) -> TetMesh:
        reps = np.zeros((self.n_classes, 3), dtype=np.int64)
        for v in range(self.mesh.n_vertices - 1, -1, -1):
            reps[self.vertex_class[v]] = self.mesh.vertices[v]
        return TetMesh(reps, self.vertex_class[self.mesh.tets], name=self.mesh.name + "-periodic")


def periodic_identify(mesh: TetMesh, axes=("z",)) -> PeriodicComplex:
    """Identify matching vertices on the two end faces along each axis.

    Raises EndFaceMismatch unless the high end face is an exact translate of
    the low one (vertices and triangles).
    """
    parent = list(range(mesh.n_vertices))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    index = {tuple(p): i for i, p in enumerate(mesh.vertices.tolist())}
    pairs = []
    for name in axes:
        ax = AXES[name]
        lo, hi = int(mesh.vertices[:, ax].min()), int(mesh.vertices[:, ax].max())
        shift = np.zeros(3, dtype=np.int64)
        shift[ax] = hi - lo
        low_tris = _face_triangles(mesh, ax, lo)
        high_tris = _face_triangles(mesh, ax, hi)
        moved = {frozenset(tuple((np.array(p) + shift).tolist()) for p in tri) for tri in low_tris}
        if not low_tris or moved != high_tris:
            raise EndFaceMismatch(f"end faces along {name} are not translates of each other")
        low_verts = sorted({p for tri in low_tris for p in tri})
        for p in low_verts:
            q = tuple((np.array(p) + shift).tolist())
            a, b = index[p], index[q]
            pairs.append((a, b))
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    roots = [find(i) for i in range(mesh.n_vertices)]
    relabel = {r: k for k, r in enumerate(sorted(set(roots)))}
    vclass = np.array([relabel[r] for r in roots], dtype=np.int64)
    return PeriodicComplex(mesh, vclass, pairs, tuple(axes))
