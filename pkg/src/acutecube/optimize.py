"""Quality-margin smoothing on the milliunit grid.

The objective is a single scalar per mesh::

    margin = min over tets of min(90 - max dihedral, kappa * min h/R)

which is positive exactly when every tet is dihedral-acute and contains its
circumcenter.  ``smooth`` runs discrete local ascent: each vertex tries every
integer move in ``{-step, 0, step}`` along its free axes and takes the best
one that strictly raises the minimum over its incident tets.  Raising a
vertex's local minimum can never lower the global one, so the margin is
non-decreasing sweep over sweep.

Boundary vertices keep their stratum (corner, box edge, box face) and all
coordinates stay integers.  Vertices that share no tetrahedron are
independent, so each colour class of a greedy vertex colouring is evaluated
in one vectorised batch; classes are visited in a fixed order and vertices in
ascending index, which makes runs reproducible.
"""
from __future__ import annotations

import configparser
import itertools
from dataclasses import dataclass, fields
from enum import IntEnum

import numpy as np

from .delaunay import triangulate
from .errors import DegenerateTet, InvertedTet
from .exact_geom import batch_margin_terms, batch_volume_sign
from .mesh import TetMesh
from .symmetry import SymmetryGroup, full_group, vertex_permutation


class Stratum(IntEnum):
    CORNER = 0
    EDGE = 1
    FACE = 2
    INTERIOR = 3


@dataclass(frozen=True)
class VertexStratum:
    kind: Stratum
    free_axes: tuple  # axes along which the vertex may move
    support: tuple  # (axis, value) pairs pinning the vertex to its edge/face

    @property
    def dof(self) -> int:
        return len(self.free_axes)


def domain_bounds(mesh: TetMesh) -> tuple[np.ndarray, np.ndarray]:
    return mesh.vertices.min(axis=0), mesh.vertices.max(axis=0)


def vertex_strata(mesh: TetMesh, bounds=None) -> list[VertexStratum]:
    """Stratum of each vertex: how many coordinates sit on the domain box."""
    lo, hi = domain_bounds(mesh) if bounds is None else bounds
    out = []
    for p in mesh.vertices.tolist():
        pinned = tuple((a, p[a]) for a in range(3) if p[a] == lo[a] or p[a] == hi[a])
        free = tuple(a for a in range(3) if p[a] != lo[a] and p[a] != hi[a])
        out.append(VertexStratum(Stratum(len(free)), free, pinned))
    return out


@dataclass
class SmoothConfig:
    max_iters: int = 200
    step: int = 1
    kappa: float = 90.0
    symmetry: bool = False
    tol: float | None = 0.0
    redelaunay_every: int = 0

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.step < 1 or int(self.step) != self.step:
            raise ValueError("step must be a positive integer number of milliunits")
        self.step = int(self.step)

    @classmethod
    def from_file(cls, path) -> "SmoothConfig":
        """Read ``key = value`` lines (optionally under a ``[smooth]`` header)."""
        text = open(path).read()
        parser = configparser.ConfigParser()
        if not text.lstrip().startswith("["):
            text = "[smooth]\n" + text
        parser.read_string(text)
        section = parser["smooth"]
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, raw in section.items():
            if key not in known:
                raise ValueError(f"unknown smoothing config key {key!r}")
            kwargs[key] = _coerce(key, raw)
        return cls(**kwargs)


def _coerce(key, raw):
    if key in ("max_iters", "step", "redelaunay_every"):
        return int(raw)
    if key == "kappa":
        return float(raw)
    if key == "symmetry":
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if key == "tol":
        return None if raw.strip().lower() in ("none", "off", "") else float(raw)
    raise ValueError(key)


def tet_margins(P: np.ndarray, kappa: float = 90.0) -> np.ndarray:
    """Per-tet margin for a ``(k, 4, 3)`` float array; inverted/flat tets get ``-inf``."""
    with np.errstate(all="ignore"):
        dih, hr, vol = batch_margin_terms(P)
        out = np.minimum(90.0 - dih, kappa * hr)
    out[~(vol > 0)] = -np.inf
    return out


def quality_margin(mesh: TetMesh, kappa: float = 90.0) -> float:
    """Global margin in degrees; positive iff dihedral-acute and 3-well-centered.

    Raises DegenerateTet when a tet is flat or inverted.
    """
    P = mesh.tet_coords()
    m = tet_margins(P, kappa)
    bad = np.nonzero(~np.isfinite(m))[0]
    if len(bad):
        raise DegenerateTet("tetrahedron is degenerate or inverted", tet_index=int(bad[0]))
    return float(m.min())


def _inside(p, stratum: VertexStratum, lo, hi) -> bool:
    return all(lo[a] < p[a] < hi[a] for a in stratum.free_axes)


def perturb(mesh: TetMesh, sigma: int, seed: int) -> TetMesh:
    """Displace each vertex by a reproducible integer offset of length <= sigma, within its stratum.

    Raises
    ------
    InvertedTet
        If the result has flat or inverted tetrahedra.
    """
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0:
        return TetMesh(mesh.vertices.copy(), mesh.tets, name=mesh.name)
    rng = np.random.default_rng(seed)
    lo, hi = domain_bounds(mesh)
    strata = vertex_strata(mesh, (lo, hi))
    verts = mesh.vertices.copy()
    for v, st in enumerate(strata):
        if st.dof == 0:
            continue
        for _ in range(100):
            off = rng.integers(-sigma, sigma, size=st.dof, endpoint=True)
            if off @ off > sigma * sigma:
                continue
            q = verts[v].copy()
            q[list(st.free_axes)] += off
            if _inside(q, st, lo, hi):
                verts[v] = q
                break
    out = TetMesh(verts, mesh.tets, name=mesh.name)
    signs = batch_volume_sign(out.tet_coords())
    bad = np.nonzero(signs <= 0)[0]
    if len(bad):
        raise InvertedTet(bad.tolist())
    return out


def _stencil(dof: int, step: int) -> np.ndarray:
    """All moves in ``{-step, 0, step}^dof``; the zero move comes first."""
    moves = [m for m in itertools.product((0, -step, step), repeat=dof)]
    return np.array(moves, dtype=np.int64).reshape(-1, dof)


def greedy_coloring(mesh: TetMesh) -> list[list[int]]:
    color = [-1] * mesh.n_vertices
    nbrs = mesh.vertex_neighbors
    for v in range(mesh.n_vertices):
        used = {color[u] for u in nbrs[v]}
        c = 0
        while c in used:
            c += 1
        color[v] = c
    classes: list = [[] for _ in range(max(color) + 1)]
    for v, c in enumerate(color):
        classes[c].append(v)
    return classes


class _Smoother:
    def __init__(self, mesh: TetMesh, config: SmoothConfig, group: SymmetryGroup | None):
        self.config = config
        self.bounds = domain_bounds(mesh)
        self.strata = vertex_strata(mesh, self.bounds)
        self.verts = mesh.vertices.copy()
        self.group = group
        self.set_connectivity(mesh.tets)

    def set_connectivity(self, tets):
        self.tets = np.asarray(tets, dtype=np.int64)
        mesh = TetMesh(self.verts, self.tets)
        self.vertex_tets = [np.array(t, dtype=np.int64) for t in mesh.vertex_tets]
        if self.group is None:
            self.colors = greedy_coloring(mesh)
        else:
            self._setup_orbits()

    def mesh(self) -> TetMesh:
        return TetMesh(self.verts.copy(), self.tets)

    def margin(self) -> float:
        return float(tet_margins(self.verts[self.tets].astype(np.float64), self.config.kappa).min())

    def _candidates(self, v):
        st = self.strata[v]
        if st.dof == 0:
            return None
        sten = _stencil(st.dof, self.config.step)
        moves = np.zeros((len(sten), 3), dtype=np.int64)
        moves[:, list(st.free_axes)] = sten
        lo, hi = self.bounds
        new = self.verts[v] + moves
        inside = np.all((new[:, list(st.free_axes)] > lo[list(st.free_axes)])
                        & (new[:, list(st.free_axes)] < hi[list(st.free_axes)]), axis=1)
        return moves[inside]

    def sweep_free(self) -> int:
        kappa = self.config.kappa
        accepted = 0
        for cls in self.colors:
            blocks = []
            for v in cls:
                moves = self._candidates(v)
                if moves is None or len(moves) < 2:
                    continue
                tl = self.vertex_tets[v]
                P = self.verts[self.tets[tl]].astype(np.float64)  # (k, 4, 3)
                slot = self.tets[tl] == v  # (k, 4)
                Pc = P[None] + moves[:, None, None, :] * slot[None, :, :, None]
                blocks.append((v, moves, Pc.reshape(-1, 4, 3), len(tl)))
            if not blocks:
                continue
            allP = np.concatenate([b[2] for b in blocks])
            scores = tet_margins(allP, kappa)
            pos = 0
            for v, moves, Pc, k in blocks:
                local = scores[pos: pos + len(Pc)].reshape(len(moves), k).min(axis=1)
                pos += len(Pc)
                best = int(np.argmax(local))
                if local[best] > local[0] + 1e-12:
                    self.verts[v] += moves[best]
                    accepted += 1
        return accepted

    # -- symmetric mode --------------------------------------------------

    def _setup_orbits(self):
        perm = vertex_permutation(self.group, self.verts)
        mats = [g.matrix for g in self.group]
        self.orbits = []
        seen = set()
        for r in range(len(self.verts)):
            if r in seen:
                continue
            members = {}
            stab = []
            for gi, m in enumerate(mats):
                img = int(perm[gi, r])
                members.setdefault(img, m)
                if img == r:
                    stab.append(m)
            seen.update(members)
            idx = np.array(sorted(members), dtype=np.int64)
            tl = np.unique(np.concatenate([np.asarray(self.vertex_tets[i]) for i in idx]))
            self.orbits.append((r, idx, np.array([members[i] for i in idx]), stab, tl))

    def sweep_symmetric(self) -> int:
        kappa = self.config.kappa
        accepted = 0
        for r, idx, mats, stab, tl in self.orbits:
            moves = self._candidates(r)
            if moves is None:
                continue
            fixed = np.all([np.all(moves @ s.T == moves, axis=1) for s in stab], axis=0)
            moves = moves[fixed]
            if len(moves) < 2:
                continue
            disp = np.einsum("mij,cj->cmi", mats, moves)  # (c, members, 3)
            T = self.tets[tl]
            P = self.verts[T].astype(np.float64)
            where = np.searchsorted(idx, T)
            where = np.clip(where, 0, len(idx) - 1)
            hit = idx[where] == T  # (k, 4)
            D = np.zeros((len(moves),) + T.shape + (3,))
            D[:, hit] = disp[:, where[hit]]
            Pc = P[None] + D
            local = tet_margins(Pc.reshape(-1, 4, 3), kappa).reshape(len(moves), len(tl)).min(axis=1)
            best = int(np.argmax(local))
            if local[best] > local[0] + 1e-12:
                self.verts[idx] += disp[best].astype(np.int64)
                accepted += 1
        return accepted


def smooth(mesh: TetMesh, config: SmoothConfig | None = None, trace: list | None = None,
           group: SymmetryGroup | None = None) -> TetMesh:
    """Local-ascent smoothing of :func:`quality_margin`.

    Parameters
    ----------
    mesh : TetMesh
    config : SmoothConfig, optional
    trace : list, optional
        If given, receives the margin before the first sweep and after each sweep.
    group : SymmetryGroup, optional
        Group used when ``config.symmetry`` is on (default: the full 24-element group).

    Stops after ``config.max_iters`` sweeps, after a sweep that accepts no move,
    or after a sweep whose margin gain is ``<= config.tol`` (``tol=None``
    disables that test).
    """
    config = config or SmoothConfig()
    quality_margin(mesh, config.kappa)  # validity check
    if config.symmetry:
        group = full_group() if group is None else group
        vertex_permutation(group, mesh.vertices)
    else:
        group = None
    sm = _Smoother(mesh, config, group)
    current = sm.margin()
    if trace is not None:
        trace.append(current)
    for it in range(1, config.max_iters + 1):
        accepted = sm.sweep_symmetric() if group is not None else sm.sweep_free()
        new = sm.margin()
        if config.redelaunay_every and it % config.redelaunay_every == 0:
            redone = triangulate(sm.verts.tolist(), "perturb")
            alt = float(tet_margins(redone.tet_coords(), config.kappa).min())
            if alt >= new and not np.array_equal(redone.tets, sm.tets):
                sm.set_connectivity(redone.tets)
                new = alt
        gain = new - current
        current = new
        if trace is not None:
            trace.append(current)
        if accepted == 0 or (config.tol is not None and gain <= config.tol):
            break
    return TetMesh(sm.verts, sm.tets, name=mesh.name)
