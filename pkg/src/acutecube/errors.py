"""Exception hierarchy shared by all acutecube modules."""


class AcuteCubeError(Exception):
    """Base class for every error raised by acutecube."""


class DegenerateTet(AcuteCubeError):
    def __init__(self, message="degenerate tetrahedron (zero volume)", tet_index=None):
        if tet_index is not None:
            message = f"{message} at tet {tet_index}"
        super().__init__(message)
        self.tet_index = tet_index


class OrientationError(AcuteCubeError):
    """A predicate that requires a positively oriented tetrahedron got another one."""


class TooFewPoints(AcuteCubeError):
    pass


class AllCoplanar(AcuteCubeError):
    pass


class DuplicatePoint(AcuteCubeError):
    def __init__(self, point, indices):
        super().__init__(f"duplicate point {point} at indices {indices}")
        self.point = point
        self.indices = indices


class Degeneracy(AcuteCubeError):
    """Five or more input points are cospherical on an empty sphere.

    ``groups`` holds one tuple of coordinates per detected tie.
    """

    def __init__(self, groups):
        self.groups = [tuple(g) for g in groups]
        head = "; ".join(str(list(g)) for g in self.groups[:3])
        more = f" (+{len(self.groups) - 3} more)" if len(self.groups) > 3 else ""
        super().__init__(f"{len(self.groups)} cospherical tuple(s): {head}{more}")


class ClosureOverflow(AcuteCubeError):
    pass


class SeedOutsideRegion(AcuteCubeError):
    def __init__(self, points):
        self.points = list(points)
        super().__init__(f"seed points outside the generating region: {self.points}")


class NotSymmetric(AcuteCubeError):
    def __init__(self, element, vertex):
        self.element = element
        self.vertex = vertex
        super().__init__(f"group element {element} maps vertex {vertex} outside the vertex set")


class FaceMismatch(AcuteCubeError):
    pass


class EndFaceMismatch(AcuteCubeError):
    pass


class InvertedTet(AcuteCubeError):
    def __init__(self, tet_indices):
        self.tet_indices = list(tet_indices)
        super().__init__(f"{len(self.tet_indices)} tetrahedra inverted, first: {self.tet_indices[:5]}")


class EmptyMesh(AcuteCubeError):
    pass


class DatasetIntegrityError(AcuteCubeError):
    pass


class ParseError(AcuteCubeError):
    def __init__(self, message, line=None, path=None):
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + message)
        self.line = line
        self.path = path
