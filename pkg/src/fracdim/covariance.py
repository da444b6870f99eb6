"""Powered-exponential covariance model and the quantities derived from it."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AlphaOutOfRange, ConfigError, DegenerateIncrement
from .increments import Increment, _normalize

DEFAULT_C = {1: 1.0, 2: 10.0}
ASPECT_LIMIT = 4.0


@dataclass(frozen=True)
class CovarianceModel:
    """Isotropic covariance ``gamma(t) = exp(-c * ||t|| ** alpha)`` on R^d."""

    alpha: float
    c: float = 1.0
    dim: int = 1

    def __post_init__(self):
        if not (0.0 < self.alpha <= 2.0):
            raise AlphaOutOfRange(f"alpha must lie in (0, 2], got {self.alpha!r}")
        if not (self.c > 0.0 and math.isfinite(self.c)):
            raise ConfigError(f"scale c must be positive, got {self.c!r}")
        if self.dim not in (1, 2):
            raise ConfigError(f"dimension must be 1 or 2, got {self.dim!r}")

    @classmethod
    def default(cls, alpha: float, dim: int = 1, c: float | None = None) -> "CovarianceModel":
        """Model with c = 1 for d = 1 and c = 10 for d = 2 unless given."""
        return cls(float(alpha), DEFAULT_C.get(dim, 1.0) if c is None else float(c), int(dim))

    def at_distance(self, r):
        """Covariance as a function of Euclidean distance (scalar or array)."""
        return np.exp(-self.c * np.power(r, self.alpha))

    def deficit(self, r):
        """``gamma(0) - gamma(r)``, accurate for small ``r``."""
        return -np.expm1(-self.c * np.power(r, self.alpha))

    def with_alpha(self, alpha: float) -> "CovarianceModel":
        return CovarianceModel(float(alpha), self.c, self.dim)


@dataclass(frozen=True)
class GridSpec:
    """Regular grid ``i / n0`` for ``-margin <= i < n0 + margin`` along each axis."""

    n0: tuple
    margin: int = 0

    def __post_init__(self):
        n0 = tuple(int(x) for x in (self.n0 if isinstance(self.n0, (tuple, list)) else (self.n0,)))
        object.__setattr__(self, "n0", n0)
        if len(n0) not in (1, 2) or any(x < 1 for x in n0):
            raise ConfigError(f"n0 must be one or two positive integers, got {n0!r}")
        if self.margin < 0:
            raise ConfigError("margin must be nonnegative")
        if len(n0) == 2 and not (1.0 / ASPECT_LIMIT <= n0[0] / n0[1] <= ASPECT_LIMIT):
            raise ConfigError(f"aspect ratio {n0[0]}/{n0[1]} outside [1/4, 4]")

    @property
    def dim(self) -> int:
        return len(self.n0)

    @property
    def n(self) -> int:
        return int(np.prod(self.n0))

    @property
    def shape(self) -> tuple:
        return tuple(x + 2 * self.margin for x in self.n0)

    @property
    def spacing(self) -> tuple:
        return tuple(1.0 / x for x in self.n0)


def gamma(model: CovarianceModel, t) -> float:
    """Evaluate the covariance at lag vector ``t`` (length d)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.shape[-1] != model.dim:
        raise ConfigError(f"lag has {t.shape[-1]} components, model dimension is {model.dim}")
    return float(model.at_distance(np.sqrt(np.sum(t * t))))


def theoretical_variogram(model: CovarianceModel, h) -> float:
    """``nu(h) = E{X(t+h) - X(t)}^2 = 2 (gamma(0) - gamma(h))``."""
    return 2.0 * (1.0 - gamma(model, h))


def fractal_dimension(alpha: float, d: int) -> float:
    """Graph dimension ``D = d + 1 - alpha / 2``."""
    if not (0.0 < alpha <= 2.0):
        raise AlphaOutOfRange(f"alpha must lie in (0, 2], got {alpha!r}")
    return d + 1.0 - alpha / 2.0


def _offsets_values(inc, u: int):
    if isinstance(inc, Increment):
        coeffs = inc.coeffs
    else:
        coeffs = _normalize(inc)
    if not coeffs:
        return np.zeros((0, 1), dtype=np.int64), np.zeros(0)
    offsets = np.array(list(coeffs.keys()), dtype=np.int64) * int(u)
    values = np.array(list(coeffs.values()), dtype=float)
    return offsets, values


def increment_variance(model: CovarianceModel, inc, u: int, grid: GridSpec) -> float:
    """``E{sum_j a_j^u X((i + j) / n0)}^2`` without the ``n^(alpha/d)`` normalization."""
    offsets, values = _offsets_values(inc, u)
    if values.size == 0:
        return 0.0
    lag = (offsets[:, None, :] - offsets[None, :, :]) / np.asarray(grid.n0, dtype=float)
    dist = np.sqrt(np.sum(lag * lag, axis=-1))
    if abs(values.sum()) <= 1e-12 * np.abs(values).sum():
        # zero-sum coefficients: sum a_j a_k gamma = -sum a_j a_k (gamma(0) - gamma)
        return float(-(values @ model.deficit(dist) @ values))
    return float(values @ model.at_distance(dist) @ values)


def mu_u(model: CovarianceModel, inc, u: int, grid: GridSpec) -> float:
    """Normalized increment variance ``n^(alpha/d) E{sum_j a_j^u X((i + j)/n0)}^2``.

    Raises
    ------
    DegenerateIncrement
        The variance is not strictly positive.
    """
    if u < 1:
        raise ConfigError("u must be >= 1")
    offsets, values = _offsets_values(inc, u)
    scale = float(np.sum(values * values))
    value = grid.n ** (model.alpha / model.dim) * increment_variance(model, inc, u, grid)
    if scale == 0.0 or value <= 1e-12 * scale:
        raise DegenerateIncrement(f"increment variance {value!r} is not positive")
    return value


def alpha_centering(model: CovarianceModel, weights, inc, grid: GridSpec) -> float:
    """``alpha_n = sum_u L_u log mu_u`` for the weights' range ``u = 1..m``."""
    L = np.asarray(getattr(weights, "L", weights), dtype=float)
    logs = np.array([math.log(mu_u(model, inc, u, grid)) for u in range(1, L.size + 1)])
    return float(L @ logs)


def as_grid(n0: Sequence[int] | int, margin: int = 0) -> GridSpec:
    return GridSpec(tuple(n0) if isinstance(n0, (tuple, list)) else (int(n0),), int(margin))


__all__ = [
    "CovarianceModel",
    "GridSpec",
    "gamma",
    "theoretical_variogram",
    "fractal_dimension",
    "increment_variance",
    "mu_u",
    "alpha_centering",
    "as_grid",
]
