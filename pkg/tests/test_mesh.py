from acutecube.mesh import boundary_surface, extract_edges, interior_edge_histogram, vertex_degrees


def test_single_tet_topology(corner_mesh):
    edges = extract_edges(corner_mesh)
    assert len(edges) == 6
    assert all(e.boundary and e.tet_count == 1 for e in edges)
    groups = boundary_surface(corner_mesh)
    assert sum(len(g) for g in groups.values()) == 4
    deg = vertex_degrees(corner_mesh)
    assert deg["degree"].tolist() == [3, 3, 3, 3]
    assert corner_mesh.euler_characteristic() == 1


def test_canonical_counts(cube):
    assert (cube.n_vertices, len(cube.edges), len(cube.triangles), cube.n_tets) == (277, 1688, 2782, 1370)
    assert cube.euler_characteristic() == 1
    assert int(cube.boundary_edge_mask.sum()) == 126
    assert interior_edge_histogram(cube) == {5: 1506, 6: 56}


def test_canonical_boundary(cube):
    groups = boundary_surface(cube)
    assert None not in groups
    assert sorted(len(g) for g in groups.values()) == [14] * 6
    deg = vertex_degrees(cube)
    assert deg["n_boundary"] == 44 and deg["n_interior"] == 233
    assert deg["interior"] == {12: 200, 14: 10, 15: 18, 16: 4, 22: 1}
    centre = cube.points().index((0, 0, 0))
    assert deg["degree"][centre] == 22


def test_neighbors_symmetric(cube):
    nb = cube.neighbors
    for t, row in enumerate(nb.tolist()):
        for n in row:
            if n >= 0:
                assert t in nb[n]
    assert int((nb < 0).sum()) == 84
