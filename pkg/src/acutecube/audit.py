"""Geometric and combinatorial audit of a tetrahedral mesh.

Yes/no flags (acute, 3-well-centered, completely well-centered, Delaunay,
incidence minima) come from exact integer sign tests; extrema and histograms
are floating point.  The JSON layout produced by :meth:`AuditReport.to_dict`
is documented in the README and kept stable.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import asdict, dataclass, field

import numpy as np

from .delaunay import local_delaunay_violations
from .errors import DegenerateTet, EmptyMesh
from .exact_geom import (
    batch_dihedral_angles,
    batch_face_angles,
    batch_h_over_r,
    dihedral_signs,
    face_angle_signs,
    h_signs,
    orient3d,
)
from .mesh import CUBE, FACE_KEYS, TetMesh, boundary_surface, interior_edge_histogram, vertex_degrees

STRATUM_MINIMUM = {"cube-edge": 2, "cube-face": 3, "interior": 5}


@dataclass
class TetMetrics:
    dihedral: np.ndarray  # (T, 6) degrees
    face: np.ndarray  # (T, 12) degrees
    h_over_r: np.ndarray  # (T, 4), sign exact
    dihedral_sign: np.ndarray  # (T, 6) sign of cosine
    face_sign: np.ndarray  # (T, 12)
    h_sign: np.ndarray  # (T, 4)


def tet_metrics(mesh: TetMesh) -> TetMetrics:
    """Per-tet angle and h/R arrays with their exact signs.

    Raises DegenerateTet (with the tet index) on any tet that is not
    positively oriented.
    """
    if mesh.n_tets == 0:
        raise EmptyMesh("mesh has no tetrahedra")
    pts = mesh.points()
    dsign, fsign, hsign = [], [], []
    for t, row in enumerate(mesh.tets.tolist()):
        p = [pts[i] for i in row]
        if orient3d(*p) <= 0:
            raise DegenerateTet("tetrahedron is degenerate or inverted", tet_index=t)
        dsign.append(dihedral_signs(p))
        fsign.append(face_angle_signs(p))
        hsign.append(h_signs(p))
    P = mesh.tet_coords()
    hsign = np.array(hsign, dtype=np.int64)
    return TetMetrics(
        dihedral=batch_dihedral_angles(P),
        face=batch_face_angles(P),
        h_over_r=hsign * np.abs(batch_h_over_r(P)),
        dihedral_sign=np.array(dsign, dtype=np.int64),
        face_sign=np.array(fsign, dtype=np.int64),
        h_sign=hsign,
    )


def _domain_box(mesh: TetMesh):
    """Box used to stratify edges.

    The bounding box when every boundary triangle lies on one of its faces,
    else the reference cube if the mesh fits inside it, else None.
    """
    lo = mesh.vertices.min(axis=0)
    hi = mesh.vertices.max(axis=0)
    v = mesh.vertices
    for tri in mesh.boundary_triangles.tolist():
        q = v[tri]
        if not any((q[:, a] == lo[a]).all() or (q[:, a] == hi[a]).all() for a in range(3)):
            break
    else:
        return lo, hi
    if lo.min() >= -CUBE and hi.max() <= CUBE:
        return np.full(3, -CUBE), np.full(3, CUBE)
    return None


def edge_stratum(p, q, box) -> str:
    """Cube-edge if both ends share two extreme coordinates, cube-face if one, else interior."""
    lo, hi = box
    shared = 0
    for a in range(3):
        if (p[a] == lo[a] and q[a] == lo[a]) or (p[a] == hi[a] and q[a] == hi[a]):
            shared += 1
    return {0: "interior", 1: "cube-face"}.get(shared, "cube-edge")


@dataclass
class EdgeCheck:
    a: int
    b: int
    stratum: str
    required: int
    incidence: int

    @property
    def ok(self) -> bool:
        return self.incidence >= self.required


def check_combinatorial_constraints(mesh: TetMesh) -> list[EdgeCheck]:
    """Minimum incident-tet counts: 2 on box edges, 3 on box faces, 5 in the interior.

    When no stratifying box applies only interior edges are checked.
    """
    box = _domain_box(mesh)
    out = []
    verts = mesh.vertices
    for (a, b), count, on_boundary in zip(
        mesh.edges.tolist(), mesh.edge_tet_counts.tolist(), mesh.boundary_edge_mask.tolist()
    ):
        if box is None:
            if on_boundary:
                continue
            stratum = "interior"
        else:
            stratum = edge_stratum(verts[a], verts[b], box)
        out.append(EdgeCheck(a, b, stratum, STRATUM_MINIMUM[stratum], count))
    return out


@dataclass
class FaceSummary:
    triangles: int
    max_angle: float
    acute: bool


def _triangle_angles(P: np.ndarray) -> np.ndarray:
    out = np.empty((len(P), 3))
    for m in range(3):
        a, b, c = P[:, m], P[:, (m + 1) % 3], P[:, (m + 2) % 3]
        x, y = b - a, c - a
        cos = np.einsum("ij,ij->i", x, y) / (np.linalg.norm(x, axis=1) * np.linalg.norm(y, axis=1))
        out[:, m] = np.degrees(np.arccos(np.clip(cos, -1, 1)))
    return out


def _triangle_acute(tri_pts) -> bool:
    for m in range(3):
        a, b, c = tri_pts[m], tri_pts[(m + 1) % 3], tri_pts[(m + 2) % 3]
        if sum((int(b[k]) - int(a[k])) * (int(c[k]) - int(a[k])) for k in range(3)) <= 0:
            return False
    return True


def surface_audit(mesh: TetMesh) -> dict:
    """Triangle count, max angle and exact acute flag per cube face (``None`` = off-cube)."""
    groups = boundary_surface(mesh)
    out = {}
    for key in list(FACE_KEYS) + [None]:
        tris = groups.get(key)
        if not tris:
            continue
        P = mesh.vertices[np.array(tris)].astype(np.float64)
        out[key] = FaceSummary(
            triangles=len(tris),
            max_angle=float(_triangle_angles(P).max()),
            acute=all(_triangle_acute(mesh.vertices[list(t)].tolist()) for t in tris),
        )
    return out


@dataclass
class AuditReport:
    counts: dict
    euler: dict
    dihedral: dict
    face_angle: dict
    h_over_r: dict
    flags: dict
    interior_edge_incidence: dict
    interior_vertex_degree: dict
    boundary_vertex_degree: dict
    surface: dict
    constraints: dict
    failures: list = field(default_factory=list)

    @property
    def acute(self) -> bool:
        return self.flags["acute"]

    @property
    def completely_well_centered(self) -> bool:
        return self.flags["completely_well_centered"]

    @property
    def passed(self) -> bool:
        return self.acute and self.completely_well_centered

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("interior_edge_incidence", "interior_vertex_degree", "boundary_vertex_degree"):
            d[key] = {str(k): v for k, v in d[key].items()}
        d["passed"] = self.passed
        return d

    def statistics(self) -> dict:
        """Everything except the failure list, for invariance comparisons."""
        d = self.to_dict()
        d.pop("failures")
        return d


def _extrema(values: np.ndarray) -> dict:
    return {"min": float(values.min()), "max": float(values.max()), "count": int(values.size)}


def audit(mesh: TetMesh, max_failures: int = 50) -> AuditReport:
    """Full audit; see the README for the meaning of every field."""
    m = tet_metrics(mesh)
    T = mesh.n_tets
    bmask = mesh.boundary_vertex_mask
    degrees = vertex_degrees(mesh)
    failures: list = []

    acute_dihedral = bool((m.dihedral_sign > 0).all())
    acute_face = bool((m.face_sign > 0).all())
    three_wc = bool((m.h_sign > 0).all())
    for t in np.nonzero((m.dihedral_sign <= 0).any(axis=1))[0][:max_failures]:
        failures.append(f"tet {int(t)}: non-acute dihedral angle {m.dihedral[t].max():.4f}")
    for t in np.nonzero((m.face_sign <= 0).any(axis=1))[0][:max_failures]:
        failures.append(f"tet {int(t)}: non-acute face angle {m.face[t].max():.4f}")
    for t in np.nonzero((m.h_sign <= 0).any(axis=1))[0][:max_failures]:
        failures.append(f"tet {int(t)}: h/R violation, min {m.h_over_r[t].min():.6f}")

    delaunay = not local_delaunay_violations(mesh)
    if not delaunay:
        failures.append("mesh is not Delaunay (local empty-sphere test failed)")

    checks = check_combinatorial_constraints(mesh)
    bad_checks = [c for c in checks if not c.ok]
    by_stratum: dict = {}
    for c in checks:
        s = by_stratum.setdefault(c.stratum, {"required": c.required, "edges": 0, "failures": 0})
        s["edges"] += 1
        s["failures"] += not c.ok
    for c in bad_checks[:max_failures]:
        failures.append(f"edge ({c.a},{c.b}) [{c.stratum}]: {c.incidence} incident tets < {c.required}")

    surface = surface_audit(mesh)
    surf = {
        "faces": {k: asdict(v) for k, v in surface.items() if k is not None},
        "off_cube_triangles": surface[None].triangles if None in surface else 0,
        "max_angle": max((v.max_angle for v in surface.values()), default=float("nan")),
        "acute": all(v.acute for v in surface.values()),
    }

    V, E, F = mesh.n_vertices, len(mesh.edges), len(mesh.triangles)
    chi = V - E + F - T
    n_btri = len(mesh.boundary_triangles)
    counts = {
        "vertices": V,
        "edges": E,
        "triangles": F,
        "tets": T,
        "boundary_vertices": int(bmask.sum()),
        "interior_vertices": int((~bmask).sum()),
        "boundary_edges": int(mesh.boundary_edge_mask.sum()),
        "interior_edges": int((~mesh.boundary_edge_mask).sum()),
        "boundary_triangles": n_btri,
    }
    euler = {
        "value": chi,
        "expected": 1,
        "ok": chi == 1,
        "triangle_identity_ok": 2 * F == 4 * T + n_btri,
    }
    flags = {
        "acute": acute_dihedral and acute_face,
        "dihedral_acute": acute_dihedral,
        "face_acute": acute_face,
        "three_well_centered": three_wc,
        "completely_well_centered": three_wc and acute_face,
        "delaunay": delaunay,
        "constraints_ok": not bad_checks,
    }
    if not flags["acute"]:
        failures.insert(0, "not acute")
    if not flags["completely_well_centered"]:
        failures.insert(0, "not completely well-centered")
    hr = m.h_over_r
    return AuditReport(
        counts=counts,
        euler=euler,
        dihedral={**_extrema(m.dihedral), "all_acute": acute_dihedral},
        face_angle={**_extrema(m.face), "all_acute": acute_face},
        h_over_r={**_extrema(hr), "all_positive": three_wc, "all_below_one": bool((hr < 1).all())},
        flags=flags,
        interior_edge_incidence=interior_edge_histogram(mesh),
        interior_vertex_degree=degrees["interior"],
        boundary_vertex_degree=degrees["boundary"],
        surface=surf,
        constraints={"ok": not bad_checks, "by_stratum": by_stratum, "n_failures": len(bad_checks)},
        failures=failures,
    )


# -- histograms ---------------------------------------------------------------

METRIC_RANGES = {"dihedral": (0.0, 180.0), "face-angle": (0.0, 180.0), "h-over-R": (-1.0, 1.0)}
DEFAULT_BIN_WIDTH = {"dihedral": 1.0, "face-angle": 1.0, "h-over-R": 0.05}


@dataclass(frozen=True)
class HistogramSpec:
    metric: str
    bin_width: float | None = None
    range: tuple | None = None

    def __post_init__(self):
        if self.metric not in METRIC_RANGES:
            raise ValueError(f"unknown metric {self.metric!r}; choose from {sorted(METRIC_RANGES)}")
        if self.bin_width is not None and self.bin_width <= 0:
            raise ValueError("bin width must be positive")

    @property
    def width(self) -> float:
        return DEFAULT_BIN_WIDTH[self.metric] if self.bin_width is None else float(self.bin_width)

    @property
    def bounds(self) -> tuple:
        return METRIC_RANGES[self.metric] if self.range is None else tuple(self.range)


def metric_values(mesh: TetMesh, metric: str) -> np.ndarray:
    m = tet_metrics(mesh)
    return {"dihedral": m.dihedral, "face-angle": m.face, "h-over-R": m.h_over_r}[metric].ravel()


def histogram(mesh: TetMesh, spec: HistogramSpec) -> list[tuple[float, int]]:
    """``(bin_start, count)`` rows covering ``spec.bounds``; counts sum to the multiset size."""
    values = metric_values(mesh, spec.metric)
    lo, hi = spec.bounds
    w = spec.width
    nbins = max(1, math.ceil((hi - lo) / w - 1e-9))
    # Values within 1e-9 bins of an edge snap upward so that exact angles like 60 stay in [60, 61).
    idx = np.floor((values - lo) / w + 1e-9).astype(np.int64)
    idx = np.clip(idx, 0, nbins - 1)
    counts = np.bincount(idx, minlength=nbins)
    return [(round(lo + k * w, 10), int(c)) for k, c in enumerate(counts)]


def histogram_csv(rows) -> str:
    lines = ["bin_start,count"] + [f"{b:.10g},{c}" for b, c in rows]
    return "\n".join(lines) + "\n"


def incidence_by_stratum(mesh: TetMesh) -> dict:
    return {
        s: dict(sorted(Counter(c.incidence for c in group).items()))
        for s, group in _group_by(check_combinatorial_constraints(mesh), lambda c: c.stratum).items()
    }


def _group_by(items, key):
    out: dict = {}
    for it in items:
        out.setdefault(key(it), []).append(it)
    return out
