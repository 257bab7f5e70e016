from .curves import (ExitCurve, cnd_curve, cnd_inverse, cnd_transfer, mi_from_llrs, vnd_curve,
                     vnd_transfer)
from .detector import SEARCH_GRID, DetectorFamily, detector_characteristic
from .jfunc import j_function, j_inverse, j_quadrature
from .threshold import (RankedCandidate, ThresholdError, optimize_degrees, threshold_search,
                        tunnel_gap, tunnel_open)

__all__ = [
    "ExitCurve", "cnd_curve", "cnd_inverse", "cnd_transfer", "mi_from_llrs", "vnd_curve",
    "vnd_transfer", "SEARCH_GRID", "DetectorFamily", "detector_characteristic", "j_function",
    "j_inverse", "j_quadrature", "RankedCandidate", "ThresholdError", "optimize_degrees",
    "threshold_search", "tunnel_gap", "tunnel_open",
]
