"""Simulation of point-transformed Gaussian processes and fields with power-law
covariance, and increment-based estimation of their fractal index."""

__version__ = "0.1.0"

from .covariance import CovarianceModel, GridSpec, fractal_dimension, gamma, mu_u  # noqa: E402
from .estimators import estimate, gls_weights, ols_weights  # noqa: E402
from .fieldgen import build_embedding, sample_field, transform_field  # noqa: E402
from .increments import Increment, dilate, parse_increment  # noqa: E402
from .transforms import PointTransform, parse_transform  # noqa: E402

__all__ = [
    "CovarianceModel",
    "GridSpec",
    "Increment",
    "PointTransform",
    "build_embedding",
    "dilate",
    "estimate",
    "fractal_dimension",
    "gamma",
    "gls_weights",
    "mu_u",
    "ols_weights",
    "parse_increment",
    "parse_transform",
    "sample_field",
    "transform_field",
]
