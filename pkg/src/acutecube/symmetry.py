"""The 24-element symmetry group of the reference regular tetrahedron.

The group is generated by four signed permutation matrices (two reflections,
a half-turn about z and a third-turn about the main diagonal).  Vertex orbits
grow from the 26 points of the closed generating region
``y >= -1, x >= y, x <= z, x <= -z``; tetrahedra are classified into orbits
by exact vertex-index permutations.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ClosureOverflow, NotSymmetric, SeedOutsideRegion
from .mesh import TetMesh

REFERENCE_TET = ((-1, -1, -1), (-1, 1, 1), (1, -1, 1), (1, 1, -1))

LOCUS_BY_SIZE = {24: "interior-of-region", 12: "plane", 6: "y-axis", 4: "main-diagonal"}


@dataclass(frozen=True)
class SymmetryOp:
    """Integer 3x3 orthogonal matrix acting on column vectors."""

    m: tuple

    def __post_init__(self):
        m = tuple(tuple(int(x) for x in row) for row in self.m)
        object.__setattr__(self, "m", m)

    @classmethod
    def identity(cls) -> "SymmetryOp":
        return cls(((1, 0, 0), (0, 1, 0), (0, 0, 1)))

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.m, dtype=np.int64)

    def __call__(self, p):
        m = self.m
        return (
            m[0][0] * p[0] + m[0][1] * p[1] + m[0][2] * p[2],
            m[1][0] * p[0] + m[1][1] * p[1] + m[1][2] * p[2],
            m[2][0] * p[0] + m[2][1] * p[1] + m[2][2] * p[2],
        )

    def __matmul__(self, other: "SymmetryOp") -> "SymmetryOp":
        return SymmetryOp((self.matrix @ other.matrix).tolist())

    def apply(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(points, dtype=np.int64) @ self.matrix.T

    def det(self) -> int:
        return int(round(np.linalg.det(self.matrix)))

    def is_valid(self) -> bool:
        """Orthogonal, and maps the reference tetrahedron onto itself."""
        m = self.matrix
        if not np.array_equal(m.T @ m, np.eye(3, dtype=np.int64)):
            return False
        return {self(p) for p in REFERENCE_TET} == set(REFERENCE_TET)

    def __repr__(self):
        return f"SymmetryOp({[list(r) for r in self.m]})"


@dataclass(frozen=True)
class SymmetryGroup:
    elements: tuple

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


def generators() -> tuple[SymmetryOp, SymmetryOp, SymmetryOp, SymmetryOp]:
    """The four generating matrices, in the order the vertex pipeline applies them."""
    a1 = SymmetryOp(((0, 0, -1), (0, 1, 0), (-1, 0, 0)))  # reflection through x = -z
    a2 = SymmetryOp(((0, 0, 1), (0, 1, 0), (1, 0, 0)))  # reflection through x = z
    a3 = SymmetryOp(((-1, 0, 0), (0, -1, 0), (0, 0, 1)))  # half-turn about z
    a4 = SymmetryOp(((0, 1, 0), (0, 0, 1), (1, 0, 0)))  # third-turn about the main diagonal
    return a1, a2, a3, a4


def close_group(gens: Iterable[SymmetryOp], limit: int = 48) -> SymmetryGroup:
    """Closure of ``gens`` under composition (identity always included).

    Raises ClosureOverflow past ``limit`` elements, which cannot happen for
    symmetries of the cube (at most 48).
    """
    gens = list(gens)
    ident = SymmetryOp.identity()
    seen = {ident.m: ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                k = h @ g
                if k.m not in seen:
                    seen[k.m] = k
                    nxt.append(k)
                    if len(seen) > limit:
                        raise ClosureOverflow(f"closure exceeds {limit} elements")
        frontier = nxt
    return SymmetryGroup(tuple(sorted(seen.values(), key=lambda g: g.m)))


def full_group() -> SymmetryGroup:
    return close_group(generators())


def region_contains(p, half: int = 1000) -> bool:
    """Closed generating region, coordinates in milliunits."""
    x, y, z = p
    return y >= -half and x >= y and x <= z and x <= -z


@dataclass
class GeneratedVertices:
    """Deduplicated vertex list in stage order, with per-stage provenance.

    ``stage_sizes[k]`` is the cumulative count after stage k (stage 0 is the
    seed); ``new_counts`` splits the last stage into its two rotations.
    """

    points: list
    stage_sizes: list
    new_counts: list
    stage_of: dict = field(repr=False)

    def upto(self, stage: int) -> list:
        return self.points[: self.stage_sizes[stage]]


def generate_vertices(seed: Sequence) -> GeneratedVertices:
    """Grow the full vertex set from the generating-region seed.

    Stages: A1 on the seed, A2 on that union, A3 on that union, then A4 and
    A4^2 on the result.  Duplicates are removed by exact equality; new points
    of each stage are appended in sorted order.

    Raises
    ------
    SeedOutsideRegion
        If a seed point is not in the closed generating region.
    """
    seed = [tuple(int(c) for c in p) for p in seed]
    outside = [p for p in seed if not region_contains(p)]
    if outside:
        raise SeedOutsideRegion(outside)
    a1, a2, a3, a4 = generators()
    a4sq = a4 @ a4

    points: list = []
    stage_of: dict = {}

    def add(new, stage):
        fresh = sorted({p for p in new if p not in stage_of})
        for p in fresh:
            stage_of[p] = stage
        points.extend(fresh)
        return len(fresh)

    new_counts = [add(seed, 0)]
    sizes = [len(points)]
    for stage, g in enumerate((a1, a2, a3), start=1):
        new_counts.append(add([g(p) for p in points], stage))
        sizes.append(len(points))
    base = list(points)
    new_counts.append(add([a4(p) for p in base], 4))
    new_counts.append(add([a4sq(p) for p in base], 4))
    sizes.append(len(points))
    return GeneratedVertices(points, sizes, new_counts, stage_of)


def vertex_permutation(group: SymmetryGroup, vertices: np.ndarray) -> np.ndarray:
    """``perm[g, i]`` is the index of ``group[g]`` applied to vertex i.

    Raises NotSymmetric on the first element that maps a vertex outside the set.
    """
    verts = np.asarray(vertices, dtype=np.int64)
    index = {tuple(p): i for i, p in enumerate(verts.tolist())}
    perm = np.empty((len(group), len(verts)), dtype=np.int64)
    for gi, g in enumerate(group):
        for i, q in enumerate(g.apply(verts).tolist()):
            j = index.get(tuple(q))
            if j is None:
                raise NotSymmetric(g, tuple(verts[i].tolist()))
            perm[gi, i] = j
    return perm


def vertex_orbits(group: SymmetryGroup, vertices: np.ndarray) -> list[list[int]]:
    perm = vertex_permutation(group, vertices)
    seen = np.zeros(len(vertices), dtype=bool)
    orbits = []
    for i in range(len(vertices)):
        if not seen[i]:
            orb = sorted(set(perm[:, i].tolist()))
            seen[orb] = True
            orbits.append(orb)
    return orbits


def transform_mesh(mesh: TetMesh, g: SymmetryOp) -> TetMesh:
    """Apply ``g`` to the coordinates; reflections get their tets reoriented."""
    tets = mesh.tets
    if g.det() < 0:
        tets = tets[:, [0, 1, 3, 2]]
    return TetMesh(g.apply(mesh.vertices), tets, name=mesh.name)


@dataclass
class OrbitClass:
    representative: int
    members: list
    locus: str

    @property
    def multiplicity(self) -> int:
        return len(self.members)


@dataclass
class OrbitClassification:
    classes: list

    def size_histogram(self) -> dict[int, int]:
        return dict(sorted(Counter(c.multiplicity for c in self.classes).items()))

    def total(self) -> int:
        return sum(c.multiplicity for c in self.classes)

    def __len__(self):
        return len(self.classes)


def classify_tets(mesh: TetMesh, group: SymmetryGroup | None = None) -> OrbitClassification:
    """Partition tets into orbits under ``group`` (default: the full 24-element group).

    Raises
    ------
    NotSymmetric
        If the group does not permute the vertex set, or maps a tet onto a
        vertex quadruple that is not a tet of the mesh.
    """
    group = full_group() if group is None else group
    perm = vertex_permutation(group, mesh.vertices)
    keys = [tuple(sorted(row)) for row in mesh.tets.tolist()]
    index = {k: t for t, k in enumerate(keys)}
    assigned = [-1] * len(keys)
    classes = []
    for t, key in enumerate(keys):
        if assigned[t] >= 0:
            continue
        members = set()
        for gi, g in enumerate(group):
            image = tuple(sorted(perm[gi, list(key)].tolist()))
            u = index.get(image)
            if u is None:
                raise NotSymmetric(g, tuple(mesh.vertices[key[0]].tolist()))
            members.add(u)
        members = sorted(members)
        for u in members:
            assigned[u] = len(classes)
        classes.append(OrbitClass(t, members, LOCUS_BY_SIZE.get(len(members), "other")))
    return OrbitClassification(classes)
