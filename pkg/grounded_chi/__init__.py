"""Grounded families on a discrete half-plane grid: generation, decomposition, coloring and verification."""

__version__ = "0.1.0"

from .family_model import GroundedFamily, GroundedSet, Scene, load, make_family, save  # noqa: E402
from .graph_core import build_graph, chi_exact, compute_bounds, omega_exact  # noqa: E402
from .grid_topology import CellSet, Frame  # noqa: E402

__all__ = [
    "CellSet",
    "Frame",
    "GroundedFamily",
    "GroundedSet",
    "Scene",
    "build_graph",
    "chi_exact",
    "compute_bounds",
    "load",
    "make_family",
    "omega_exact",
    "save",
]
