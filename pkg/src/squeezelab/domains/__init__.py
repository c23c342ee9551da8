"""Domain model, curves, and grid rasterization."""
from .model import (UNIT_CIRCLE, CircularArcSlit, JordanDomain, MoebiusDiskAutomorphism, RingDomain,
                    SlitDiskDomain, ThreefoldExample, apply_moebius, build_symmetric_slit_disk,
                    build_threefold_example, pseudo_hyperbolic, ring_from_json)
from .raster import (EXCLUDED, FIELD, PLATE0, PLATE1, Chart, GridCondenser, cartesian_chart,
                     check_connected_field, field_components, log_polar_chart, rasterize,
                     rasterize_pieces, rasterize_pointed, upsample_labels)
from .shapes import (ArcCurve, Circle, PointCurve, Polygon, Polyline, RegionPiece, Segment, SlitPiece,
                     StarCurve, curve_from_json, pieces_for)

__all__ = [
    "UNIT_CIRCLE", "CircularArcSlit", "JordanDomain", "MoebiusDiskAutomorphism", "RingDomain",
    "SlitDiskDomain", "ThreefoldExample", "apply_moebius", "build_symmetric_slit_disk",
    "build_threefold_example", "pseudo_hyperbolic", "ring_from_json",
    "EXCLUDED", "FIELD", "PLATE0", "PLATE1", "Chart", "GridCondenser", "cartesian_chart",
    "check_connected_field", "field_components", "log_polar_chart", "rasterize", "rasterize_pieces",
    "rasterize_pointed", "upsample_labels",
    "ArcCurve", "Circle", "PointCurve", "Polygon", "Polyline", "RegionPiece", "Segment", "SlitPiece",
    "StarCurve", "curve_from_json", "pieces_for",
]
