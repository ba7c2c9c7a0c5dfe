"""Brute-force reconfiguration graphs used as ground truth."""
from .enumeration import TooLarge, enumerate_trees
from .graph import ReconfigGraph, bfs_distance, build_graph, eccentricity_report, shortest_path
from .symmetry import SymmetryGroup

__all__ = [
    "ReconfigGraph", "SymmetryGroup", "TooLarge", "bfs_distance", "build_graph",
    "eccentricity_report", "enumerate_trees", "shortest_path",
]
