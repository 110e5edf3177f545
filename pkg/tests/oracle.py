"""Brute-force empty circumsphere enumeration, used as a Delaunay oracle.

Independent of the library predicates: the in-sphere test is done by comparing
squared distances to the integer-scaled circumcenter (Cramer's rule) in int64.
Safe for coordinates with absolute value <= 30.
"""
from itertools import combinations

import numpy as np

MAX_ABS = 30


def _cross(u, v):
    return np.stack(
        [u[..., 1] * v[..., 2] - u[..., 2] * v[..., 1],
         u[..., 2] * v[..., 0] - u[..., 0] * v[..., 2],
         u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]],
        axis=-1,
    )


def empty_sphere_tets(points):
    """Classify every non-flat 4-subset of ``points``.

    Returns
    -------
    strict : set of frozenset
        Subsets whose circumsphere has no other point inside or on it.
    closed : set of frozenset
        Subsets whose circumsphere has no other point strictly inside.
    degenerate : bool
        True when some closed-empty sphere carries a fifth point, i.e. the
        Delaunay triangulation is not unique.
    """
    P = np.asarray(points, dtype=np.int64)
    assert np.abs(P).max(initial=0) <= MAX_ABS
    quads = np.array(list(combinations(range(len(P)), 4)), dtype=np.int64)
    a, b, c, d = (P[quads[:, k]] for k in range(4))
    u, v, w = b - a, c - a, d - a
    det = np.einsum("ij,ij->i", u, _cross(v, w))
    keep = det != 0
    quads, a, u, v, w, det = quads[keep], a[keep], u[keep], v[keep], w[keep], det[keep]
    uu, vv, ww = (np.einsum("ij,ij->i", x, x)[:, None] for x in (u, v, w))
    N = uu * _cross(v, w) + vv * _cross(w, u) + ww * _cross(u, v)  # circumcenter = a + N / D
    D = 2 * det
    E = P[None, :, :] - a[:, None, :]  # (q, n, 3)
    off = D[:, None, None] * E - N[:, None, :]
    dist = np.einsum("qnk,qnk->qn", off, off)
    rad = np.einsum("qk,qk->q", N, N)[:, None]
    member = np.zeros_like(dist, dtype=bool)
    np.put_along_axis(member, quads, True, axis=1)
    inside = ((dist < rad) & ~member).any(axis=1)
    on = ((dist == rad) & ~member).any(axis=1)
    strict = {frozenset(q) for q in quads[~inside & ~on].tolist()}
    closed = {frozenset(q) for q in quads[~inside].tolist()}
    return strict, closed, bool((~inside & on).any())


def all_coplanar(points) -> bool:
    P = np.asarray(points, dtype=np.int64)
    Q = P[1:] - P[0]
    return np.linalg.matrix_rank(Q.astype(float)) < 3
