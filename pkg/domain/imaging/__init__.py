# domain/imaging/__init__.py

from domain.imaging.canny import canny_edges, sobel_kernels, to_luma
from domain.imaging.distance import NO_EDGE_DISTANCE, chamfer_units, distance_transform
from domain.imaging.edge_dist import build_edge_dist_field, ramp

__all__ = [
    "canny_edges",
    "sobel_kernels",
    "to_luma",
    "NO_EDGE_DISTANCE",
    "chamfer_units",
    "distance_transform",
    "build_edge_dist_field",
    "ramp",
]
