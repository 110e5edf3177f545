import numpy as np
import pytest

from acutecube.constructions import canonical_cube
from acutecube.mesh import TetMesh

CORNER = [(0, 0, 0), (1000, 0, 0), (0, 1000, 0), (0, 0, 1000)]
REGULAR = [(-1000, -1000, -1000), (-1000, 1000, 1000), (1000, -1000, 1000), (1000, 1000, -1000)]


def tet_mesh(points):
    return TetMesh(np.array(points, dtype=np.int64), np.array([[0, 1, 2, 3]]))


def five_tet_cube():
    """Unit cube split into the regular tet on alternate corners plus four corner tets."""
    corners = [(x, y, z) for x in (-1000, 1000) for y in (-1000, 1000) for z in (-1000, 1000)]
    index = {p: i for i, p in enumerate(corners)}
    tets = [[index[p] for p in REGULAR]]
    for c in corners:
        if c in REGULAR:
            continue
        nbrs = [q for q in REGULAR if sum(a != b for a, b in zip(c, q)) == 1]
        tets.append([index[c]] + [index[q] for q in nbrs])
    verts = np.array(corners, dtype=np.int64)
    rows = []
    for t in tets:
        a, b, c, d = verts[t]
        if np.linalg.det(np.array([b - a, c - a, d - a], dtype=float)) < 0:
            t = [t[0], t[1], t[3], t[2]]
        rows.append(t)
    return TetMesh(verts, np.array(rows))


@pytest.fixture(scope="session")
def cube():
    return canonical_cube()


@pytest.fixture
def corner_mesh():
    return tet_mesh(CORNER)


@pytest.fixture
def regular_mesh():
    return tet_mesh(REGULAR)


# -- acceptance summary -------------------------------------------------------

_criteria: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    entry = _criteria.setdefault(number, [title, True])
    if call.excinfo is not None and call.when in ("setup", "call"):
        entry[1] = False


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}")
