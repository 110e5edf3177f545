import numpy as np
import pytest

from acutecube.audit import audit
from acutecube.delaunay import triangulate
from acutecube.errors import DegenerateTet, InvertedTet
from acutecube.optimize import (
    SmoothConfig,
    Stratum,
    greedy_coloring,
    perturb,
    quality_margin,
    smooth,
    vertex_strata,
)
from acutecube.symmetry import full_group, transform_mesh
from conftest import CORNER, REGULAR, tet_mesh


def small_box_mesh():
    corners = [(x, y, z) for x in (-1000, 1000) for y in (-1000, 1000) for z in (-1000, 1000)]
    inner = [(-310, 170, 40), (250, -280, 120), (60, 330, -260), (-120, -90, -350), (20, 40, 410)]
    return triangulate(corners + inner, "perturb")


def test_margin_examples(regular_mesh, corner_mesh, cube):
    assert quality_margin(regular_mesh) == pytest.approx(90 - 70.52877937)
    assert quality_margin(corner_mesh) == pytest.approx(-30.0)
    r = audit(cube)
    expected = min(90 - r.dihedral["max"], 90 * r.h_over_r["min"])
    assert quality_margin(cube) == pytest.approx(expected)
    assert quality_margin(cube) > 0


def test_margin_rejects_inverted():
    with pytest.raises(DegenerateTet):
        quality_margin(tet_mesh([REGULAR[0], REGULAR[1], REGULAR[3], REGULAR[2]]))


def test_strata(cube):
    kinds = [s.kind for s in vertex_strata(cube)]
    assert kinds.count(Stratum.CORNER) == 8
    assert kinds.count(Stratum.INTERIOR) == 233
    assert len(kinds) == 277


def test_perturb_zero_is_identity(cube):
    assert np.array_equal(perturb(cube, 0, 3).vertices, cube.vertices)


def test_perturb_reproducible_and_bounded(cube):
    a, b = perturb(cube, 5, 7), perturb(cube, 5, 7)
    assert np.array_equal(a.vertices, b.vertices)
    d = a.vertices - cube.vertices
    assert (np.einsum("ij,ij->i", d, d) <= 25).all()
    assert not np.array_equal(a.vertices, perturb(cube, 5, 8).vertices)


def test_perturb_preserves_strata(cube):
    before = vertex_strata(cube)
    after = vertex_strata(perturb(cube, 5, 2))
    assert [(s.kind, s.support) for s in before] == [(s.kind, s.support) for s in after]


def test_perturb_inverts():
    mesh = tet_mesh([(0, 0, 0), (1000, 0, 0), (0, 1000, 0), (300, 300, 1)])
    mesh = triangulate(mesh.points() + [(300, 300, -1000), (300, 300, 1000)], "perturb")
    with pytest.raises(InvertedTet):
        for seed in range(50):
            perturb(mesh, 400, seed)


def test_coloring_is_proper(cube):
    classes = greedy_coloring(cube)
    assert sorted(v for c in classes for v in c) == list(range(277))
    nbrs = cube.vertex_neighbors
    for c in classes:
        cs = set(c)
        assert all(not (nbrs[v] & cs) for v in c)


def test_smooth_monotone_and_keeps_strata():
    mesh = small_box_mesh()
    trace = []
    out = smooth(mesh, SmoothConfig(max_iters=60, step=5), trace=trace)
    assert all(b >= a for a, b in zip(trace, trace[1:]))
    assert trace[-1] == pytest.approx(quality_margin(out))
    assert trace[-1] > trace[0]
    assert [(s.kind, s.support) for s in vertex_strata(mesh)] == [(s.kind, s.support) for s in vertex_strata(out)]
    assert np.array_equal(out.tets, mesh.tets)


def test_smooth_fixed_point_unchanged():
    out = smooth(small_box_mesh(), SmoothConfig(max_iters=500, step=5, tol=None))
    trace = []
    again = smooth(out, SmoothConfig(max_iters=500, step=5, tol=None), trace=trace)
    assert np.array_equal(again.vertices, out.vertices)
    assert trace[0] == trace[-1]


def test_smooth_no_free_vertices(regular_mesh):
    out = smooth(regular_mesh)
    assert np.array_equal(out.vertices, regular_mesh.vertices)


def test_smooth_redelaunay_never_lowers_margin():
    mesh = small_box_mesh()
    trace = []
    out = smooth(mesh, SmoothConfig(max_iters=30, step=20, redelaunay_every=2), trace=trace)
    assert all(b >= a for a, b in zip(trace, trace[1:]))
    assert quality_margin(out) == pytest.approx(trace[-1])


def test_smooth_repairs_perturbed_canonical(cube):
    bad = perturb(cube, 5, 1)
    trace = []
    out = smooth(bad, SmoothConfig(max_iters=200), trace=trace)
    assert all(b >= a for a, b in zip(trace, trace[1:]))
    assert audit(out).passed


def test_symmetric_smooth_keeps_symmetry(cube):
    trace = []
    out = smooth(cube, SmoothConfig(max_iters=3, symmetry=True), trace=trace)
    assert trace[-1] >= trace[0]
    for g in full_group():
        moved = transform_mesh(out, g)
        assert moved.point_set() == out.point_set()
        assert moved.tet_key_set() == out.tet_key_set()


def test_config_file(tmp_path):
    p = tmp_path / "smooth.cfg"
    p.write_text("max_iters = 7\nstep = 2\nsymmetry = on\nkappa = 45\ntol = none\n")
    cfg = SmoothConfig.from_file(p)
    assert (cfg.max_iters, cfg.step, cfg.symmetry, cfg.kappa, cfg.tol) == (7, 2, True, 45.0, None)
    p.write_text("[smooth]\nsweeps = 3\n")
    with pytest.raises(ValueError):
        SmoothConfig.from_file(p)


def test_config_validation():
    with pytest.raises(ValueError):
        SmoothConfig(max_iters=0)
    with pytest.raises(ValueError):
        SmoothConfig(step=1.5)
