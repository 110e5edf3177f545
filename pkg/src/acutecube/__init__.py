"""Exact reconstruction and audit of a dihedral-acute triangulation of the cube."""
__version__ = "0.1.0"
