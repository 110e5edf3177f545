"""Tetrahedral mesh container and its derived combinatorics."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .exact_geom import TET_EDGES, TET_FACETS, orient3d

CUBE = 1000


@dataclass(frozen=True, eq=False)
class TetMesh:
    """Integer vertex array plus tetrahedra as rows of four vertex indices.

    Derived tables (edges, triangles, adjacency, boundary marks) are computed
    lazily and cached; treat both arrays as read-only.
    """

    vertices: np.ndarray
    tets: np.ndarray
    name: str = field(default="", compare=False)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.int64).reshape(-1, 3)
        t = np.asarray(self.tets, dtype=np.int64).reshape(-1, 4)
        v.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "tets", t)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_tets(self) -> int:
        return len(self.tets)

    def points(self) -> list[tuple[int, int, int]]:
        return [tuple(int(c) for c in row) for row in self.vertices]

    def tet_points(self, t: int):
        return [tuple(int(c) for c in self.vertices[i]) for i in self.tets[t]]

    def tet_coords(self) -> np.ndarray:
        """Float array of shape ``(T, 4, 3)``."""
        return self.vertices[self.tets].astype(np.float64)

    def same_as(self, other: "TetMesh") -> bool:
        """True when both meshes have the same vertex coordinates and tet vertex sets."""
        return self.point_set() == other.point_set() and self.tet_key_set() == other.tet_key_set()

    def point_set(self) -> set:
        return {tuple(int(c) for c in row) for row in self.vertices}

    def tet_key_set(self) -> set:
        pts = self.points()
        return {frozenset(pts[i] for i in row) for row in self.tets}

    # -- combinatorics -----------------------------------------------------

    @cached_property
    def _edge_table(self):
        pairs = np.sort(self.tets[:, list(TET_EDGES)].reshape(-1, 2), axis=1)
        edges, counts = np.unique(pairs, axis=0, return_counts=True)
        return edges, counts

    @property
    def edges(self) -> np.ndarray:
        """Unique undirected edges, shape ``(E, 2)``, lexicographically sorted."""
        return self._edge_table[0]

    @property
    def edge_tet_counts(self) -> np.ndarray:
        return self._edge_table[1]

    @cached_property
    def _tri_table(self):
        faces = np.sort(self.tets[:, list(TET_FACETS)].reshape(-1, 3), axis=1)
        tris, counts = np.unique(faces, axis=0, return_counts=True)
        return tris, counts

    @property
    def triangles(self) -> np.ndarray:
        return self._tri_table[0]

    @property
    def triangle_tet_counts(self) -> np.ndarray:
        return self._tri_table[1]

    @property
    def boundary_triangles(self) -> np.ndarray:
        tris, counts = self._tri_table
        return tris[counts == 1]

    @cached_property
    def boundary_vertex_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_vertices, dtype=bool)
        mask[self.boundary_triangles.ravel()] = True
        return mask

    @cached_property
    def boundary_edge_mask(self) -> np.ndarray:
        bt = self.boundary_triangles
        if len(bt) == 0:
            return np.zeros(len(self.edges), dtype=bool)
        bedges = np.unique(np.sort(bt[:, [0, 1, 1, 2, 0, 2]].reshape(-1, 2), axis=1), axis=0)
        keys = self.edges[:, 0] * self.n_vertices + self.edges[:, 1]
        bkeys = bedges[:, 0] * self.n_vertices + bedges[:, 1]
        return np.isin(keys, bkeys)

    @cached_property
    def neighbors(self) -> np.ndarray:
        """``neighbors[t, i]`` is the tet across the facet opposite local vertex i, or -1."""
        nb = -np.ones((self.n_tets, 4), dtype=np.int64)
        seen = {}
        for t, row in enumerate(self.tets.tolist()):
            for i, f in enumerate(TET_FACETS):
                key = tuple(sorted(row[k] for k in f))
                other = seen.pop(key, None)
                if other is None:
                    seen[key] = (t, i)
                else:
                    nb[t, i] = other[0]
                    nb[other[0], other[1]] = t
        return nb

    @cached_property
    def vertex_tets(self) -> list[list[int]]:
        out = [[] for _ in range(self.n_vertices)]
        for t, row in enumerate(self.tets.tolist()):
            for v in row:
                out[v].append(t)
        return out

    @cached_property
    def vertex_neighbors(self) -> list[set]:
        out = [set() for _ in range(self.n_vertices)]
        for a, b in self.edges.tolist():
            out[a].add(b)
            out[b].add(a)
        return out

    def euler_characteristic(self) -> int:
        return self.n_vertices - len(self.edges) + len(self.triangles) - self.n_tets

    def orientation_signs(self) -> list[int]:
        return [orient3d(*self.tet_points(t)) for t in range(self.n_tets)]

    def with_vertices(self, vertices, name=None) -> "TetMesh":
        return TetMesh(np.asarray(vertices), self.tets, name=self.name if name is None else name)


@dataclass(frozen=True)
class EdgeInfo:
    a: int
    b: int
    tet_count: int
    boundary: bool


def extract_edges(mesh: TetMesh) -> list[EdgeInfo]:
    """Undirected edges with incident-tet counts and boundary flags."""
    return [
        EdgeInfo(int(a), int(b), int(c), bool(m))
        for (a, b), c, m in zip(mesh.edges, mesh.edge_tet_counts, mesh.boundary_edge_mask)
    ]


def interior_edge_histogram(mesh: TetMesh) -> dict[int, int]:
    counts = mesh.edge_tet_counts[~mesh.boundary_edge_mask]
    return dict(sorted(Counter(counts.tolist()).items()))


FACE_KEYS = ("x-", "x+", "y-", "y+", "z-", "z+")


def face_key(tri_points, half: int = CUBE):
    """Name of the cube face (``"x-"``, ``"z+"``, ...) containing the triangle, or None."""
    for axis, name in enumerate("xyz"):
        for sign, tag in ((-1, "-"), (1, "+")):
            if all(p[axis] == sign * half for p in tri_points):
                return name + tag
    return None


def boundary_surface(mesh: TetMesh, half: int = CUBE) -> dict:
    """Boundary triangles grouped by supporting cube face.

    Returns a dict mapping ``"x-"`` .. ``"z+"`` to lists of vertex-index
    triples, plus ``None`` for triangles not on any face of ``[-half, half]^3``.
    """
    groups: dict = {}
    verts = mesh.vertices
    for tri in mesh.boundary_triangles.tolist():
        key = face_key([verts[i] for i in tri], half)
        groups.setdefault(key, []).append(tuple(tri))
    return groups


def vertex_degrees(mesh: TetMesh) -> dict:
    """Edge degree per vertex and degree histograms split interior / boundary."""
    deg = np.bincount(mesh.edges.ravel(), minlength=mesh.n_vertices)
    bmask = mesh.boundary_vertex_mask
    return {
        "degree": deg,
        "interior": dict(sorted(Counter(deg[~bmask].tolist()).items())),
        "boundary": dict(sorted(Counter(deg[bmask].tolist()).items())),
        "n_interior": int((~bmask).sum()),
        "n_boundary": int(bmask.sum()),
    }
