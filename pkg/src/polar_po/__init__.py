"""Partial orders of synthetic channels in punctured and shortened polar codes."""

__version__ = "0.1.0"

from .ratematch import NONE, RateMatchSpec  # noqa: E402
from .path_algebra import ConvMapping, build_convolution_mapping, convolves  # noqa: E402
from .polynomial import BernsteinPoly  # noqa: E402
from .bec_engine import path_bhattacharyya, path_polynomial, polarize_vector  # noqa: E402
from .po_core import PoStatus, PoVerdict, dominates, enumerate_pairs  # noqa: E402

__all__ = [
    "NONE",
    "RateMatchSpec",
    "ConvMapping",
    "build_convolution_mapping",
    "convolves",
    "BernsteinPoly",
    "path_bhattacharyya",
    "path_polynomial",
    "polarize_vector",
    "PoStatus",
    "PoVerdict",
    "dominates",
    "enumerate_pairs",
]
