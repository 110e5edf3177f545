"""Exact incremental Delaunay tetrahedralization (Bowyer-Watson).

The hull is closed off with *ghost* tetrahedra ``(a, b, c, INF)`` sharing a
symbolic vertex at infinity instead of a finite super-simplex, so no
artificial vertex can ever intrude into a circumsphere.  A ghost is in
conflict with a point strictly beyond its hull facet, or coplanar with it and
strictly inside the facet's circumcircle.

Conflicts are strict (``insphere > 0``), which always yields a valid Delaunay
triangulation, even for cospherical input.  Points are inserted in
lexicographic coordinate order, so the tie-breaking among several valid
triangulations depends only on the point set.
"""
from __future__ import annotations

from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import AllCoplanar, Degeneracy, DuplicatePoint, TooFewPoints
from .exact_geom import _cross, _sub, incircle3d, insphere_det, orient3d_det
from .mesh import TetMesh

INF = -1

# Facet opposite local vertex i, ordered so that vertex i is on its positive side.
_FACET = ((2, 1, 3), (0, 2, 3), (1, 0, 3), (0, 1, 2))


class DegeneracyPolicy(str, Enum):
    REJECT = "reject"
    PERTURB = "perturb"


class _Triangulation:
    def __init__(self, pts: list):
        self.pts = pts
        self.tv: list = []  # vertex 4-tuples, None once deleted
        self.tn: list = []  # neighbor indices per slot
        self.last = 0

    def _new(self, verts) -> int:
        self.tv.append(tuple(verts))
        self.tn.append([-1, -1, -1, -1])
        return len(self.tv) - 1

    def conflict(self, t: int, p) -> bool:
        a, b, c, d = self.tv[t]
        P = self.pts
        if d == INF:
            o = orient3d_det(P[a], P[b], P[c], p)
            if o != 0:
                return o > 0
            return incircle3d(P[a], P[b], P[c], p) > 0
        return insphere_det(P[a], P[b], P[c], P[d], p) > 0

    def _link(self, created: Iterable[int]):
        open_facets = {}
        for t in created:
            verts = self.tv[t]
            for i in range(4):
                if self.tn[t][i] != -1:
                    continue
                key = tuple(sorted(verts[k] for k in range(4) if k != i))
                other = open_facets.pop(key, None)
                if other is None:
                    open_facets[key] = (t, i)
                else:
                    self.tn[t][i] = other[0]
                    self.tn[other[0]][other[1]] = t
        assert not open_facets, "unmatched facets while linking new tetrahedra"

    def start(self, a, b, c, d):
        t0 = self._new((a, b, c, d))
        ghosts = []
        verts = self.tv[t0]
        for i in range(4):
            f = [verts[k] for k in _FACET[i]]
            g = self._new((f[1], f[0], f[2], INF))
            self.tn[t0][i] = g
            self.tn[g][3] = t0
            ghosts.append(g)
        self._link(ghosts)
        self.last = t0

    def locate(self, p) -> int:
        """Visibility walk to a tet in conflict with ``p``."""
        P = self.pts
        t = self.last
        if self.tv[t] is None:
            t = next(k for k in range(len(self.tv) - 1, -1, -1) if self.tv[k] is not None)
        if self.tv[t][3] == INF:
            t = self.tn[t][3]
        limit = 4 * len(self.tv) + 64
        for _ in range(limit):
            verts = self.tv[t]
            if verts[3] == INF:
                return t
            for i in range(4):
                f = _FACET[i]
                if orient3d_det(P[verts[f[0]]], P[verts[f[1]]], P[verts[f[2]]], p) < 0:
                    t = self.tn[t][i]
                    break
            else:
                return t
        # Defensive fallback; the walk terminates on Delaunay triangulations.
        for k, verts in enumerate(self.tv):
            if verts is not None and self.conflict(k, p):
                return k
        raise RuntimeError("no tetrahedron in conflict with inserted point")

    def insert(self, v: int):
        p = self.pts[v]
        seed = self.locate(p)
        cavity = {seed}
        stack = [seed]
        boundary = []
        while stack:
            t = stack.pop()
            for i, n in enumerate(self.tn[t]):
                if n in cavity:
                    continue
                if self.conflict(n, p):
                    cavity.add(n)
                    stack.append(n)
                else:
                    boundary.append((t, i, n))
        created = []
        for t, i, n in boundary:
            verts = list(self.tv[t])
            verts[i] = v
            nt = self._new(verts)
            self.tn[nt][i] = n
            nslots = self.tn[n]
            nslots[nslots.index(t)] = nt
            created.append(nt)
        for t in cavity:
            self.tv[t] = None
            self.tn[t] = None
        self._link(created)
        self.last = created[-1]

    def finite_tets(self) -> list:
        return [(k, v) for k, v in enumerate(self.tv) if v is not None and v[3] != INF]

    def ties(self) -> list:
        """Cospherical tuples: pairs of adjacent finite tets sharing one sphere."""
        P = self.pts
        groups = []
        for t, verts in self.finite_tets():
            for n in self.tn[t]:
                if n < t:
                    continue
                nv = self.tv[n]
                if nv[3] == INF:
                    continue
                q = next(x for x in nv if x not in verts)
                if insphere_det(*(P[x] for x in verts), P[q]) == 0:
                    groups.append(tuple(sorted(set(verts) | {q})))
        return groups


def _canonical_tet(row) -> tuple:
    """Smallest index first, same orientation."""
    order = sorted(range(4), key=lambda k: row[k])
    perm_parity = 0
    seq = list(order)
    for i in range(4):
        while seq[i] != i:
            j = seq[i]
            seq[i], seq[j] = seq[j], seq[i]
            perm_parity ^= 1
    out = [row[k] for k in order]
    if perm_parity:
        out[2], out[3] = out[3], out[2]
    return tuple(out)


def triangulate(points: Sequence, policy: DegeneracyPolicy | str = DegeneracyPolicy.REJECT, name: str = "") -> TetMesh:
    """Delaunay tetrahedralization of integer points.

    Parameters
    ----------
    points : sequence of (x, y, z) integers
    policy : ``"reject"`` raises :class:`Degeneracy` when five or more points
        share an empty circumsphere (the triangulation is then not unique);
        ``"perturb"`` accepts the deterministic tie-break.

    Raises
    ------
    TooFewPoints, DuplicatePoint, AllCoplanar, Degeneracy
    """
    policy = DegeneracyPolicy(policy)
    pts = [tuple(int(c) for c in p) for p in points]
    n = len(pts)
    if n < 4:
        raise TooFewPoints(f"need at least 4 points, got {n}")
    order = sorted(range(n), key=lambda k: pts[k])
    for x, y in zip(order, order[1:]):
        if pts[x] == pts[y]:
            raise DuplicatePoint(pts[x], sorted((x, y)))
    spts = [pts[k] for k in order]

    i0, i1 = 0, 1
    base = _sub(spts[i1], spts[i0])
    i2 = next((k for k in range(2, n) if any(_cross(base, _sub(spts[k], spts[i0])))), None)
    if i2 is None:
        raise AllCoplanar("all points are collinear")
    i3 = next((k for k in range(i2 + 1, n) if orient3d_det(spts[i0], spts[i1], spts[i2], spts[k]) != 0), None)
    if i3 is None:
        raise AllCoplanar("all points are coplanar")
    if orient3d_det(spts[i0], spts[i1], spts[i2], spts[i3]) < 0:
        i0, i1 = i1, i0

    tri = _Triangulation(spts)
    tri.start(i0, i1, i2, i3)
    used = {i0, i1, i2, i3}
    for k in range(n):
        if k not in used:
            tri.insert(k)

    if policy is DegeneracyPolicy.REJECT:
        ties = tri.ties()
        if ties:
            raise Degeneracy([tuple(spts[x] for x in g) for g in ties])

    rows = sorted(_canonical_tet([order[x] for x in verts]) for _, verts in tri.finite_tets())
    mesh = TetMesh(np.array(pts, dtype=np.int64), np.array(rows, dtype=np.int64), name=name)
    used_vertices = np.unique(mesh.tets)
    if len(used_vertices) != n:
        raise RuntimeError("triangulation lost input points")
    return mesh


def empty_sphere_violations(mesh: TetMesh, strict: bool = True) -> list:
    """Brute-force check: ``(tet, vertex)`` pairs where the vertex lies inside the tet's sphere.

    With ``strict=False`` points exactly on a sphere are reported too.
    """
    pts = mesh.points()
    bad = []
    for t, row in enumerate(mesh.tets.tolist()):
        a, b, c, d = (pts[i] for i in row)
        rs = set(row)
        for v, p in enumerate(pts):
            if v in rs:
                continue
            s = insphere_det(a, b, c, d, p)
            if s > 0 or (not strict and s == 0):
                bad.append((t, v))
    return bad


def local_delaunay_violations(mesh: TetMesh) -> list:
    """Interior facets whose far vertex is strictly inside the near tet's circumsphere.

    For a triangulation of a convex region this local test is equivalent to the
    global empty-sphere property.
    """
    pts = mesh.points()
    tets = mesh.tets.tolist()
    bad = []
    for t, nbs in enumerate(mesh.neighbors.tolist()):
        row = tets[t]
        for n in nbs:
            if n < 0:
                continue
            q = next(x for x in tets[n] if x not in row)
            if insphere_det(*(pts[x] for x in row), pts[q]) > 0:
                bad.append((t, n))
    return bad


def facet_parity_ok() -> bool:
    """Self-check of the facet ordering table against the corner tet."""
    corner = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
    return all(orient3d_det(*(corner[k] for k in _FACET[i]), corner[i]) > 0 for i in range(4))
