"""Flip reconfiguration of non-crossing spanning trees."""
from .convex_opt import convex_reconfigure, flip_bound, minimal_edges
from .geometry import Edge, Point, PointSet, edge, segments_cross
from .instances import InstanceSpec, double_broom, double_broom_witness, regular_polygon
from .trees import Flip, FlipSequence, Tree, apply_flip, diff, validate_sequence
from .two_phase import phase2, reconfigure_to_monotone_path, two_phase_reconfigure

__all__ = [
    "Edge", "Flip", "FlipSequence", "InstanceSpec", "Point", "PointSet", "Tree",
    "apply_flip", "convex_reconfigure", "diff", "double_broom", "double_broom_witness",
    "edge", "flip_bound", "minimal_edges", "phase2", "reconfigure_to_monotone_path",
    "regular_polygon", "segments_cross", "two_phase_reconfigure", "validate_sequence",
]
