"""Exact predicates and real-valued metrics for points on the millesimal grid.

Coordinates are integers in milliunits (the cube corners sit at +-1000).
Every sign that decides a yes/no question -- orientation, insphere,
acuteness of an angle, which side of a facet the circumcenter lies on --
is computed with Python integers, so there are no tolerances anywhere.
Angle and h/R magnitudes are reported as doubles.

Orientation convention: ``orient3d(a, b, c, d)`` is the sign of
``det(b - a, c - a, d - a)``, positive for the right-handed corner
tetrahedron ``(0,0,0), (1,0,0), (0,1,0), (0,0,1)``.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence, Tuple

import numpy as np

from .errors import DegenerateTet, OrientationError

MilliPoint = Tuple[int, int, int]

SCALE = 1000

# Local vertex pairs of the six tet edges and, at the same position, the
# two vertices opposite each edge.
TET_EDGES = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
EDGE_OPPOSITE = ((2, 3), (1, 3), (1, 2), (0, 3), (0, 2), (0, 1))
# Facet i is the triangle opposite local vertex i.
TET_FACETS = ((1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2))


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _sub(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _ints(p) -> MilliPoint:
    return (int(p[0]), int(p[1]), int(p[2]))


def orient3d_det(a, b, c, d) -> int:
    """Exact value of ``det(b - a, c - a, d - a)`` (six times the signed volume)."""
    a, b, c, d = _ints(a), _ints(b), _ints(c), _ints(d)
    return _dot(_sub(b, a), _cross(_sub(c, a), _sub(d, a)))


def orient3d(a, b, c, d) -> int:
    """Return -1, 0 or +1, the orientation of the tetrahedron ``abcd``."""
    return _sign(orient3d_det(a, b, c, d))


def insphere_det(a, b, c, d, e) -> int:
    """Lifted determinant, positive iff ``e`` is inside the sphere of a positive ``abcd``.

    No orientation check; for a negatively oriented ``abcd`` the sign flips.
    """
    ex, ey, ez = int(e[0]), int(e[1]), int(e[2])
    aex, aey, aez = int(a[0]) - ex, int(a[1]) - ey, int(a[2]) - ez
    bex, bey, bez = int(b[0]) - ex, int(b[1]) - ey, int(b[2]) - ez
    cex, cey, cez = int(c[0]) - ex, int(c[1]) - ey, int(c[2]) - ez
    dex, dey, dez = int(d[0]) - ex, int(d[1]) - ey, int(d[2]) - ez

    ab = aex * bey - bex * aey
    bc = bex * cey - cex * bey
    cd = cex * dey - dex * cey
    da = dex * aey - aex * dey
    ac = aex * cey - cex * aey
    bd = bex * dey - dex * bey

    abc = aez * bc - bez * ac + cez * ab
    bcd = bez * cd - cez * bd + dez * bc
    cda = cez * da + dez * ac + aez * cd
    dab = dez * ab + aez * bd + bez * da

    alift = aex * aex + aey * aey + aez * aez
    blift = bex * bex + bey * bey + bez * bez
    clift = cex * cex + cey * cey + cez * cez
    dlift = dex * dex + dey * dey + dez * dez

    # Shewchuk's expansion uses the opposite orientation convention.
    return -((dlift * abc - clift * dab) + (blift * cda - alift * bcd))


def insphere(a, b, c, d, e) -> int:
    """Return +1 if ``e`` is strictly inside the circumsphere of ``abcd``, 0 if on it, -1 outside.

    Raises
    ------
    OrientationError
        If ``abcd`` is not positively oriented.
    """
    if orient3d(a, b, c, d) <= 0:
        raise OrientationError(f"insphere needs a positively oriented tet, got {a}, {b}, {c}, {d}")
    return _sign(insphere_det(a, b, c, d, e))


def incircle3d(a, b, c, p) -> int:
    """Sign of ``p`` against the circumcircle of triangle ``abc``; ``p`` must be coplanar with it.

    Uses the sphere through ``abc`` and a point lifted off the plane along
    the triangle normal; that sphere meets the plane in the circumcircle.
    """
    a, b, c = _ints(a), _ints(b), _ints(c)
    n = _cross(_sub(b, a), _sub(c, a))
    q = (a[0] + n[0], a[1] + n[1], a[2] + n[2])
    return _sign(insphere_det(a, b, c, q, p))


def circumcenter_int(a, b, c, d):
    """Circumcenter as ``a + N / D`` with integer vector ``N`` and integer ``D = 2 * orient3d_det``."""
    a, b, c, d = _ints(a), _ints(b), _ints(c), _ints(d)
    u, v, w = _sub(b, a), _sub(c, a), _sub(d, a)
    vw, wu, uv = _cross(v, w), _cross(w, u), _cross(u, v)
    den = 2 * _dot(u, vw)
    if den == 0:
        raise DegenerateTet()
    uu, vv, ww = _dot(u, u), _dot(v, v), _dot(w, w)
    num = tuple(uu * vw[k] + vv * wu[k] + ww * uv[k] for k in range(3))
    return num, den


def circumsphere(a, b, c, d):
    """Exact circumcenter (tuple of Fractions) and squared circumradius (Fraction), in milliunits."""
    num, den = circumcenter_int(a, b, c, d)
    center = tuple(Fraction(int(a[k])) + Fraction(num[k], den) for k in range(3))
    r2 = Fraction(_dot(num, num), den * den)
    return center, r2


def dihedral_signs(p: Sequence[MilliPoint]) -> list[int]:
    """Exact sign of the cosine of each dihedral angle (+1 acute, 0 right, -1 obtuse)."""
    out = []
    for (i, j), (k, l) in zip(TET_EDGES, EDGE_OPPOSITE):
        w = _sub(p[j], p[i])
        u = _sub(p[k], p[i])
        v = _sub(p[l], p[i])
        out.append(_sign(_dot(u, v) * _dot(w, w) - _dot(u, w) * _dot(v, w)))
    return out


def face_angle_signs(p: Sequence[MilliPoint]) -> list[int]:
    """Exact sign of the cosine of each of the 12 face angles, facet by facet."""
    out = []
    for f in TET_FACETS:
        for m in range(3):
            a, b, c = p[f[m]], p[f[(m + 1) % 3]], p[f[(m + 2) % 3]]
            out.append(_sign(_dot(_sub(b, a), _sub(c, a))))
    return out


def h_signs(p: Sequence[MilliPoint]) -> list[int]:
    """Exact side of the circumcenter w.r.t. each facet: +1 same side as the opposite vertex."""
    p = [_ints(q) for q in p]
    num, den = circumcenter_int(*p)
    a = p[0]
    out = []
    for i, f in enumerate(TET_FACETS):
        f0, f1, f2 = p[f[0]], p[f[1]], p[f[2]]
        n = _cross(_sub(f1, f0), _sub(f2, f0))
        shifted = tuple(den * (a[k] - f0[k]) + num[k] for k in range(3))
        center_side = _sign(_dot(n, shifted)) * _sign(den)
        vertex_side = _sign(_dot(n, _sub(p[i], f0)))
        out.append(center_side * vertex_side)
    return out


def _as_batch(points) -> np.ndarray:
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[None]
    return arr


def _check_nondegenerate(p):
    if orient3d(*p) == 0:
        raise DegenerateTet()


def batch_dihedral_angles(P: np.ndarray) -> np.ndarray:
    """Dihedral angles in degrees for a ``(k, 4, 3)`` array of tets, shape ``(k, 6)``."""
    out = np.empty(P.shape[:1] + (6,))
    for e, ((i, j), (k, l)) in enumerate(zip(TET_EDGES, EDGE_OPPOSITE)):
        w = P[:, j] - P[:, i]
        u = P[:, k] - P[:, i]
        v = P[:, l] - P[:, i]
        ww = np.einsum("ij,ij->i", w, w)
        up = u - (np.einsum("ij,ij->i", u, w) / ww)[:, None] * w
        vp = v - (np.einsum("ij,ij->i", v, w) / ww)[:, None] * w
        cos = np.einsum("ij,ij->i", up, vp) / (np.linalg.norm(up, axis=1) * np.linalg.norm(vp, axis=1))
        out[:, e] = np.degrees(np.arccos(np.clip(cos, -1.0, 1.0)))
    return out


def batch_face_angles(P: np.ndarray) -> np.ndarray:
    """Face angles in degrees, shape ``(k, 12)``, ordered facet by facet."""
    out = np.empty(P.shape[:1] + (12,))
    col = 0
    for f in TET_FACETS:
        for m in range(3):
            a, b, c = P[:, f[m]], P[:, f[(m + 1) % 3]], P[:, f[(m + 2) % 3]]
            x, y = b - a, c - a
            cos = np.einsum("ij,ij->i", x, y) / (np.linalg.norm(x, axis=1) * np.linalg.norm(y, axis=1))
            out[:, col] = np.degrees(np.arccos(np.clip(cos, -1.0, 1.0)))
            col += 1
    return out


def batch_h_over_r(P: np.ndarray) -> np.ndarray:
    """Signed h/R per facet (facet i opposite vertex i), shape ``(k, 4)``, floating point."""
    a = P[:, 0]
    u, v, w = P[:, 1] - a, P[:, 2] - a, P[:, 3] - a
    vw, wu, uv = np.cross(v, w), np.cross(w, u), np.cross(u, v)
    den = 2.0 * np.einsum("ij,ij->i", u, vw)
    rel = (
        np.einsum("ij,ij->i", u, u)[:, None] * vw
        + np.einsum("ij,ij->i", v, v)[:, None] * wu
        + np.einsum("ij,ij->i", w, w)[:, None] * uv
    ) / den[:, None]
    center = a + rel
    radius = np.linalg.norm(rel, axis=1)
    out = np.empty(P.shape[:1] + (4,))
    for i, f in enumerate(TET_FACETS):
        f0 = P[:, f[0]]
        n = np.cross(P[:, f[1]] - f0, P[:, f[2]] - f0)
        side = np.sign(np.einsum("ij,ij->i", n, P[:, i] - f0))
        h = side * np.einsum("ij,ij->i", n, center - f0) / np.linalg.norm(n, axis=1)
        out[:, i] = h / radius
    return out


def batch_volume_sign(P: np.ndarray) -> np.ndarray:
    """Orientation sign per tet; exact for integer coordinates below ~2**17 in magnitude."""
    a = P[:, 0]
    det = np.einsum("ij,ij->i", P[:, 1] - a, np.cross(P[:, 2] - a, P[:, 3] - a))
    return np.sign(det)


def dihedral_angles(p: Sequence[MilliPoint]) -> list[float]:
    """The six dihedral angles (degrees) of one tet, in ``TET_EDGES`` order."""
    _check_nondegenerate(p)
    return batch_dihedral_angles(_as_batch(p))[0].tolist()


def face_angles(p: Sequence[MilliPoint]) -> list[float]:
    """The twelve face angles (degrees) of one tet, three per facet in ``TET_FACETS`` order."""
    _check_nondegenerate(p)
    return batch_face_angles(_as_batch(p))[0].tolist()


def h_over_r(p: Sequence[MilliPoint]) -> list[float]:
    """h/R for each facet of one tet: magnitude from floats, sign from exact arithmetic."""
    _check_nondegenerate(p)
    mags = np.abs(batch_h_over_r(_as_batch(p))[0])
    return [float(s * m) for s, m in zip(h_signs(p), mags)]


# Facet opposite vertex i ordered so its normal points at vertex i in a positive tet.
_INWARD_FACET = ((2, 1, 3), (0, 2, 3), (1, 0, 3), (0, 1, 2))
_FACET_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def batch_margin_terms(P: np.ndarray):
    """Max dihedral angle (degrees), min h/R and orientation sign per tet, in one pass.

    Cheaper than the general routines: dihedral cosines come from pairs of
    inward facet normals. Results are only meaningful where the sign is +1.
    """
    x, y, z = P[..., 0], P[..., 1], P[..., 2]
    normals = []
    for f0, f1, f2 in _INWARD_FACET:
        ux, uy, uz = x[:, f1] - x[:, f0], y[:, f1] - y[:, f0], z[:, f1] - z[:, f0]
        vx, vy, vz = x[:, f2] - x[:, f0], y[:, f2] - y[:, f0], z[:, f2] - z[:, f0]
        nx, ny, nz = uy * vz - uz * vy, uz * vx - ux * vz, ux * vy - uy * vx
        with np.errstate(all="ignore"):
            inv = 1.0 / np.sqrt(nx * nx + ny * ny + nz * nz)
        normals.append((nx * inv, ny * inv, nz * inv, f0))
    min_cos = None
    for i, j in _FACET_PAIRS:
        a, b = normals[i], normals[j]
        c = -(a[0] * b[0] + a[1] * b[1] + a[2] * b[2])
        min_cos = c if min_cos is None else np.minimum(min_cos, c)
    max_dihedral = np.degrees(np.arccos(np.clip(min_cos, -1.0, 1.0)))

    ux, uy, uz = x[:, 1] - x[:, 0], y[:, 1] - y[:, 0], z[:, 1] - z[:, 0]
    vx, vy, vz = x[:, 2] - x[:, 0], y[:, 2] - y[:, 0], z[:, 2] - z[:, 0]
    wx, wy, wz = x[:, 3] - x[:, 0], y[:, 3] - y[:, 0], z[:, 3] - z[:, 0]
    vwx, vwy, vwz = vy * wz - vz * wy, vz * wx - vx * wz, vx * wy - vy * wx
    wux, wuy, wuz = wy * uz - wz * uy, wz * ux - wx * uz, wx * uy - wy * ux
    uvx, uvy, uvz = uy * vz - uz * vy, uz * vx - ux * vz, ux * vy - uy * vx
    det = ux * vwx + uy * vwy + uz * vwz
    uu, vv, ww = ux * ux + uy * uy + uz * uz, vx * vx + vy * vy + vz * vz, wx * wx + wy * wy + wz * wz
    with np.errstate(all="ignore"):
        scale = 0.5 / det
        rx = (uu * vwx + vv * wux + ww * uvx) * scale
        ry = (uu * vwy + vv * wuy + ww * uvy) * scale
        rz = (uu * vwz + vv * wuz + ww * uvz) * scale
        radius = np.sqrt(rx * rx + ry * ry + rz * rz)
        ox, oy, oz = x[:, 0] + rx, y[:, 0] + ry, z[:, 0] + rz
        min_h = None
        for nx, ny, nz, f0 in normals:
            h = nx * (ox - x[:, f0]) + ny * (oy - y[:, f0]) + nz * (oz - z[:, f0])
            min_h = h if min_h is None else np.minimum(min_h, h)
        min_hr = min_h / radius
    return max_dihedral, min_hr, np.sign(det)
