import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from acutecube.delaunay import (
    DegeneracyPolicy,
    empty_sphere_violations,
    facet_parity_ok,
    local_delaunay_violations,
    triangulate,
)
from acutecube.errors import AllCoplanar, Degeneracy, DuplicatePoint, TooFewPoints
from acutecube.exact_geom import orient3d
from conftest import CORNER
from oracle import all_coplanar, empty_sphere_tets


def _tet_sets(mesh):
    return {frozenset(r) for r in mesh.tets.tolist()}


def test_facet_table():
    assert facet_parity_ok()


def test_single_tet():
    mesh = triangulate(CORNER)
    assert mesh.n_tets == 1
    assert mesh.orientation_signs() == [1]


def test_input_errors():
    with pytest.raises(TooFewPoints):
        triangulate(CORNER[:3])
    with pytest.raises(DuplicatePoint):
        triangulate(CORNER + [CORNER[1]])
    with pytest.raises(AllCoplanar):
        triangulate([(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0), (2, 3, 0)])
    with pytest.raises(AllCoplanar):
        triangulate([(k, 2 * k, -k) for k in range(6)])


def test_cube_corners_are_degenerate():
    corners = [(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1)]
    with pytest.raises(Degeneracy) as info:
        triangulate(corners)
    assert info.value.groups
    mesh = triangulate(corners, DegeneracyPolicy.PERTURB)
    P = mesh.tet_coords()
    six_vol = np.linalg.det((P[:, 1:] - P[:, :1]).astype(float))
    assert six_vol.sum() == pytest.approx(6.0)
    assert not empty_sphere_violations(mesh)


def test_insertion_order_independent():
    rng = np.random.default_rng(5)
    pts = [tuple(p) for p in rng.integers(-30, 31, (20, 3)).tolist()]
    pts = sorted(set(pts))
    a = triangulate(pts)
    perm = rng.permutation(len(pts))
    b = triangulate([pts[k] for k in perm])
    assert {frozenset(perm[list(r)].tolist()) for r in b.tets.tolist()} == _tet_sets(a)


def test_canonical_is_delaunay(cube):
    assert cube.n_tets == 1370
    assert len(cube.edges) == 1688
    assert set(cube.orientation_signs()) == {1}
    assert not local_delaunay_violations(cube)


def test_canonical_brute_force_empty_spheres(cube):
    assert not empty_sphere_violations(cube, strict=False)


small = st.integers(-3, 3)
wide = st.integers(-30, 30)


def _check_against_oracle(pts):
    if len(pts) < 5 or all_coplanar(pts):
        return
    strict, closed, degenerate = empty_sphere_tets(pts)
    if degenerate:
        with pytest.raises(Degeneracy):
            triangulate(pts)
        mesh = triangulate(pts, "perturb")
        assert _tet_sets(mesh) <= closed
    else:
        assert _tet_sets(triangulate(pts)) == strict


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(wide, wide, wide), min_size=6, max_size=12, unique=True))
def test_matches_oracle_general(pts):
    _check_against_oracle(pts)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(small, small, small), min_size=6, max_size=12, unique=True))
def test_matches_oracle_lattice(pts):
    _check_against_oracle(pts)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(small, small, small), min_size=6, max_size=14, unique=True))
def test_perturb_is_a_triangulation(pts):
    if all_coplanar(pts):
        return
    mesh = triangulate(pts, "perturb")
    assert set(mesh.orientation_signs()) == {1}
    counts = mesh.triangle_tet_counts
    assert counts.max() <= 2
    # every boundary triangle is a hull facet
    P = mesh.vertices.tolist()
    for tri in mesh.boundary_triangles.tolist():
        sides = {orient3d(*(P[i] for i in tri), q) for q in P} - {0}
        assert len(sides) == 1
