"""Exact construction and curvature verification of ambitoric Kahler metrics."""

from .binary_forms import BinaryForm, QuadraticForm, discriminant, inner_product, poisson_bracket, transvectant
from .builder import AmbitoricModel, AmbitoricSpec, build, build_calabi, build_pd, quartic
from .classifier import (
    bach_flat_check,
    calabi_classify,
    classify,
    csc_em_check,
    einstein_conformal,
    extremal_check,
    kahler_check,
)
from .errors import (
    AmbitoricError,
    DegenerateInputError,
    InconsistencyError,
    MalformedInputError,
    PoleError,
    PreconditionError,
    ResourceError,
)
from .exact_algebra import R, RationalFunction, Ring, parse_rational, ring
from .tensors import Chart, ChartTensor, Metric, bach, curvature, weyl, weyl_split

__version__ = "0.1.0"

__all__ = [
    "AmbitoricError",
    "AmbitoricModel",
    "AmbitoricSpec",
    "BinaryForm",
    "Chart",
    "ChartTensor",
    "DegenerateInputError",
    "InconsistencyError",
    "MalformedInputError",
    "Metric",
    "PoleError",
    "PreconditionError",
    "QuadraticForm",
    "R",
    "RationalFunction",
    "ResourceError",
    "Ring",
    "bach",
    "bach_flat_check",
    "build",
    "build_calabi",
    "build_pd",
    "calabi_classify",
    "classify",
    "csc_em_check",
    "curvature",
    "discriminant",
    "einstein_conformal",
    "extremal_check",
    "inner_product",
    "kahler_check",
    "parse_rational",
    "poisson_bracket",
    "quartic",
    "ring",
    "transvectant",
    "weyl",
    "weyl_split",
]
