import math

import numpy as np
import pytest

from acutecube.audit import (
    HistogramSpec,
    audit,
    check_combinatorial_constraints,
    histogram,
    histogram_csv,
    incidence_by_stratum,
    metric_values,
    surface_audit,
    tet_metrics,
)
from acutecube.errors import DegenerateTet, EmptyMesh
from acutecube.mesh import TetMesh
from conftest import REGULAR, five_tet_cube, tet_mesh


def test_canonical_report(cube):
    r = audit(cube)
    assert r.passed and r.flags["delaunay"] and r.flags["constraints_ok"]
    assert r.counts["boundary_vertices"] == 44 and r.counts["interior_vertices"] == 233
    assert r.counts["boundary_edges"] == 126 and r.counts["boundary_triangles"] == 84
    assert r.euler == {"value": 1, "expected": 1, "ok": True, "triangle_identity_ok": True}
    assert r.dihedral["max"] == pytest.approx(84.65, abs=0.1)
    assert r.dihedral["min"] == pytest.approx(35.89, abs=0.1)
    assert r.dihedral["count"] == 8220 and r.face_angle["count"] == 16440
    assert 0 < r.h_over_r["min"] and r.h_over_r["max"] < 1 and r.h_over_r["count"] == 5480
    assert r.interior_edge_incidence == {5: 1506, 6: 56}
    assert r.interior_vertex_degree == {12: 200, 14: 10, 15: 18, 16: 4, 22: 1}
    assert r.failures == []


def test_report_json_keys(cube):
    d = audit(cube).to_dict()
    assert d["passed"] is True
    assert d["interior_edge_incidence"] == {"5": 1506, "6": 56}


def test_canonical_surface(cube):
    s = surface_audit(cube)
    assert None not in s
    assert all(v.triangles == 14 and v.acute and v.max_angle < 90 for v in s.values())


def test_canonical_constraints(cube):
    checks = check_combinatorial_constraints(cube)
    assert all(c.ok for c in checks)
    by = incidence_by_stratum(cube)
    assert by["interior"] == {5: 1506, 6: 56}
    assert min(by["cube-face"]) >= 3 and min(by["cube-edge"]) >= 2


def test_regular_tet(regular_mesh):
    r = audit(regular_mesh)
    assert r.acute and r.completely_well_centered
    m = tet_metrics(regular_mesh)
    np.testing.assert_allclose(m.h_over_r, 1 / 3)
    np.testing.assert_allclose(m.dihedral, math.degrees(math.acos(1 / 3)))


def test_corner_tet_fails(corner_mesh):
    r = audit(corner_mesh)
    assert not r.acute and not r.completely_well_centered and not r.passed
    assert any("h/R violation" in f for f in r.failures)


def test_five_tet_cube():
    mesh = five_tet_cube()
    assert mesh.n_tets == 5
    r = audit(mesh)
    assert not r.passed and not r.flags["acute"]
    bad = [c for c in check_combinatorial_constraints(mesh) if not c.ok]
    assert {c.stratum for c in bad} == {"cube-edge"}
    assert len(bad) == 12 and all(c.incidence == 1 for c in bad)


def test_inverted_tet():
    mesh = TetMesh(np.array(REGULAR), np.array([[0, 1, 3, 2]]))
    with pytest.raises(DegenerateTet) as info:
        audit(mesh)
    assert info.value.tet_index == 0


def test_empty_mesh():
    empty = TetMesh(np.zeros((0, 3), dtype=np.int64), np.zeros((0, 4), dtype=np.int64))
    with pytest.raises(EmptyMesh):
        histogram(empty, HistogramSpec("dihedral"))


def test_histogram_sums(cube):
    rows = histogram(cube, HistogramSpec("dihedral", 1.0))
    assert sum(c for _, c in rows) == 8220 and len(rows) == 180
    rows = histogram(cube, HistogramSpec("h-over-R", 0.05))
    assert sum(c for _, c in rows) == 5480
    assert all(c == 0 for b, c in rows if b < 0 or b >= 1)


def test_regular_face_angle_bin(regular_mesh):
    rows = histogram(regular_mesh, HistogramSpec("face-angle", 1.0))
    assert [(b, c) for b, c in rows if c] == [(60.0, 12)]


def test_histogram_csv(regular_mesh):
    text = histogram_csv(histogram(regular_mesh, HistogramSpec("h-over-R")))
    lines = text.splitlines()
    assert lines[0] == "bin_start,count"
    assert "0.3,4" in lines


def test_histogram_spec_validation():
    with pytest.raises(ValueError):
        HistogramSpec("volume")
    with pytest.raises(ValueError):
        HistogramSpec("dihedral", 0)


def test_metric_values_shape(cube):
    assert metric_values(cube, "face-angle").shape == (16440,)


def test_single_tet_constraints(regular_mesh, corner_mesh):
    # a lone tet is stratified against the reference cube and fails every minimum
    checks = check_combinatorial_constraints(regular_mesh)
    assert {c.stratum for c in checks} == {"cube-face"}
    assert len(checks) == 6 and not any(c.ok for c in checks)
    checks = check_combinatorial_constraints(corner_mesh)
    assert len(checks) == 6 and not any(c.ok for c in checks)


def test_unboxed_mesh_checks_interior_only():
    mesh = tet_mesh([(0, 0, 0), (5000, 0, 0), (0, 5000, 0), (0, 0, 5000)])
    assert check_combinatorial_constraints(mesh) == []
