"""Increment-based variograms and log-log regression estimators of alpha.

For dilations ``u = 1..m`` of an increment ``a`` the mean squared increment

    Zbar_u = n^-1 sum_{i in I_n} (sum_j a_j^u g_{i+j})^2

behaves like ``const * u^alpha`` for small lags, and ``alpha_hat = sum_u L_u
log Zbar_u`` for any weights with ``sum L_u = 0`` and ``sum L_u log u = 1``.

Large accumulations go through :func:`pairwise_sum`, which hands a
contiguous 1-D buffer to ``numpy.add.reduce``; numpy reduces such buffers
by pairwise (blocked tree) summation, so results are reproducible for a
fixed iteration order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .covariance import CovarianceModel, GridSpec, increment_variance
from .errors import (
    ConfigError,
    InsufficientMargin,
    MTooSmall,
    SingularWeightMatrix,
    ZeroVariogram,
)
from .fieldgen import FieldSample
from .increments import Increment, dilate, increment_field

PILOT_RANGE = (0.05, 1.95)
CONSTRAINT_TOL = 1e-10


def pairwise_sum(x) -> float:
    return float(np.add.reduce(np.ascontiguousarray(x, dtype=float).ravel()))


@dataclass(frozen=True)
class RegressionWeights:
    L: np.ndarray = field(compare=False)
    scheme: str = "ols"
    pilot_alpha: float | None = None

    @property
    def m(self) -> int:
        return int(self.L.size)

    def residuals(self) -> tuple:
        """``(sum L_u, sum L_u log u - 1)``; both vanish for valid weights."""
        logu = np.log(np.arange(1, self.m + 1))
        return float(self.L.sum()), float(self.L @ logu - 1.0)


@dataclass(frozen=True)
class VariogramSummary:
    zbar: np.ndarray = field(compare=False)
    n: int
    increment: Increment

    @property
    def m(self) -> int:
        return int(self.zbar.size)


@dataclass(frozen=True)
class EstimateResult:
    alpha_hat: float
    dimension_hat: float
    clamped: bool
    weights: RegressionWeights
    variogram: VariogramSummary
    residuals: np.ndarray = field(compare=False)
    dim: int = 1

    def to_dict(self) -> dict:
        out = {
            "alpha_hat": self.alpha_hat,
            "dimension_hat": self.dimension_hat,
            "m": self.weights.m,
            "scheme": self.weights.scheme,
            "increment": self.variogram.increment.to_literal(),
            "n": self.variogram.n,
            "zbar": [float(z) for z in self.variogram.zbar],
            "weights": [float(w) for w in self.weights.L],
            "residuals": [float(r) for r in self.residuals],
            "clamped": self.clamped,
        }
        if self.weights.pilot_alpha is not None:
            out["pilot_alpha"] = self.weights.pilot_alpha
        return out


def variogram_from_array(values, grid: GridSpec, inc: Increment, m: int) -> VariogramSummary:
    """Mean squared dilated increments over the interior of a stored grid."""
    if m < 2:
        raise MTooSmall(f"m must be >= 2, got {m}")
    if inc.dim != grid.dim:
        raise ConfigError(f"increment dimension {inc.dim} does not match grid dimension {grid.dim}")
    need = m * inc.radius
    if grid.margin < need:
        raise InsufficientMargin(f"margin {grid.margin} < m * J = {need}")
    values = np.asarray(values, dtype=float)
    zbar = np.empty(m)
    for u in range(1, m + 1):
        incr = increment_field(dilate(inc, u), values, grid.n0, grid.margin)
        zbar[u - 1] = pairwise_sum(incr * incr) / grid.n
    if not np.all(zbar > 0.0):
        bad = [int(u) + 1 for u in np.flatnonzero(~(zbar > 0.0))]
        raise ZeroVariogram(f"empirical variogram is zero at u = {bad}; data constant along the increment")
    zbar.setflags(write=False)
    return VariogramSummary(zbar, grid.n, inc)


def empirical_variogram(data: FieldSample, inc: Increment, m: int) -> VariogramSummary:
    return variogram_from_array(data.values, data.grid, inc, m)


def ols_weights(m: int) -> RegressionWeights:
    """Ordinary least squares slope weights for regressing on ``log u``."""
    if m < 2:
        raise MTooSmall(f"m must be >= 2, got {m}")
    logu = np.log(np.arange(1, m + 1))
    centred = logu - logu.mean()
    L = centred / np.sum(centred * centred)
    L.setflags(write=False)
    return RegressionWeights(L, "ols")


def constrained_weights(W: np.ndarray) -> np.ndarray:
    """Minimize ``L' W L`` subject to ``sum L = 0`` and ``sum L log u = 1``."""
    W = np.asarray(W, dtype=float)
    m = W.shape[0]
    A = np.vstack([np.ones(m), np.log(np.arange(1, m + 1))])
    try:
        cond = np.linalg.cond(W)
        if not np.isfinite(cond) or cond > 1e14:
            raise np.linalg.LinAlgError(f"condition number {cond:.3g}")
        WinvAt = np.linalg.solve(W, A.T)
        lam = np.linalg.solve(A @ WinvAt, np.array([0.0, 1.0]))
    except np.linalg.LinAlgError as exc:
        raise SingularWeightMatrix(f"GLS covariance matrix is not invertible: {exc}") from exc
    return WinvAt @ lam


def log_variogram_covariance(m: int, model: CovarianceModel, inc: Increment, grid: GridSpec) -> np.ndarray:
    """Delta-method covariance of ``log Zbar_u`` under the Gaussian model.

    ``cov(Zbar_u, Zbar_v) = 2 n^-2 sum_k N(k) c_uv(k)^2`` where ``N(k)`` counts
    interior index pairs at lag ``k`` and ``c_uv(k)`` is the covariance of the
    ``u``- and ``v``-dilated increments at lag ``k``.
    """
    n0 = np.asarray(grid.n0)
    d = grid.dim
    dils = [dilate(inc, u) for u in range(1, m + 1)]
    reach = 2 * m * inc.radius
    # gamma(0) - gamma at every lag reachable as k + j - j'
    ext = [np.arange(-(n - 1) - reach, n + reach) for n in n0]
    mesh = np.meshgrid(*[e / n for e, n in zip(ext, n0)], indexing="ij")
    deficit = model.deficit(np.sqrt(sum(x * x for x in mesh)))
    counts = np.ones([2 * n - 1 for n in n0])
    for l, n in enumerate(n0):
        k = np.arange(-(n - 1), n)
        shape = [1] * d
        shape[l] = k.size
        counts = counts * (n - np.abs(k)).reshape(shape)
    counts = counts.ravel()

    cov = np.empty((m, m))
    for u in range(m):
        for v in range(u, m):
            shifts = {}
            for ju, au in zip(dils[u].offsets, dils[u].values):
                for jv, av in zip(dils[v].offsets, dils[v].values):
                    s = tuple(int(x) for x in ju - jv)
                    shifts[s] = shifts.get(s, 0.0) + au * av
            c = np.zeros([2 * n - 1 for n in n0])
            for s, w in sorted(shifts.items()):
                if w == 0.0:
                    continue
                sl = tuple(slice(reach + sl_, reach + sl_ + 2 * n - 1) for sl_, n in zip(s, n0))
                c -= w * deficit[sl]
            cov[u, v] = cov[v, u] = 2.0 * pairwise_sum(counts * (c * c).ravel()) / float(grid.n) ** 2
    mean = np.array([increment_variance(model, inc, u, grid) for u in range(1, m + 1)])
    return cov / np.outer(mean, mean)


def gls_weights(m: int, model: CovarianceModel, inc: Increment, grid: GridSpec) -> RegressionWeights:
    """Generalized least squares weights under a Gaussian plug-in covariance."""
    if m < 2:
        raise MTooSmall(f"m must be >= 2, got {m}")
    if m == 2:
        # two constraints on two unknowns: W plays no role
        L = ols_weights(2).L.copy()
    else:
        W = log_variogram_covariance(m, model, inc, grid)
        L = constrained_weights(W)
    L.setflags(write=False)
    return RegressionWeights(L, "gls", float(model.alpha))


def _dimension(alpha_hat: float, d: int):
    a = min(max(alpha_hat, 0.0), 2.0)
    return d + 1.0 - a / 2.0, not (0.0 < alpha_hat <= 2.0)


def estimate_from_variogram(vario: VariogramSummary, weights: RegressionWeights, dim: int) -> EstimateResult:
    if weights.m != vario.m:
        raise ConfigError(f"weights have length {weights.m}, variogram has {vario.m} lags")
    logz = np.log(vario.zbar)
    alpha_hat = float(weights.L @ logz)
    logu = np.log(np.arange(1, vario.m + 1))
    intercept = float(np.mean(logz - alpha_hat * logu))
    resid = logz - (intercept + alpha_hat * logu)
    dim_hat, clamped = _dimension(alpha_hat, dim)
    return EstimateResult(alpha_hat, dim_hat, clamped, weights, vario, resid, dim)


def estimate_alpha(data: FieldSample, inc: Increment, weights: RegressionWeights) -> EstimateResult:
    """``alpha_hat = sum_u L_u log Zbar_u`` with diagnostics."""
    vario = empirical_variogram(data, inc, weights.m)
    return estimate_from_variogram(vario, weights, data.grid.dim)


def pilot_model(alpha_hat: float, c: float, dim: int) -> CovarianceModel:
    lo, hi = PILOT_RANGE
    return CovarianceModel(min(max(alpha_hat, lo), hi), c, dim)


def estimate(values, grid: GridSpec, inc: Increment, m: int, scheme: str = "ols", c: float | None = None) -> EstimateResult:
    """Full estimator on a stored grid; GLS uses a first-pass OLS pilot.

    The pilot OLS estimate, clamped to [0.05, 1.95], parameterizes the Gaussian
    plug-in covariance with scale ``c`` (default 1 for d = 1, 10 for d = 2).
    """
    vario = variogram_from_array(values, grid, inc, m)
    ols = estimate_from_variogram(vario, ols_weights(m), grid.dim)
    if scheme == "ols":
        return ols
    if scheme != "gls":
        raise ConfigError(f"unknown weight scheme {scheme!r}")
    if c is None:
        c = CovarianceModel.default(1.0, grid.dim).c
    pilot = pilot_model(ols.alpha_hat, c, grid.dim)
    return estimate_from_variogram(vario, gls_weights(m, pilot, inc, grid), grid.dim)


def estimate_sample(data: FieldSample, inc: Increment, m: int, scheme: str = "ols") -> EstimateResult:
    return estimate(data.values, data.grid, inc, m, scheme, c=data.model.c)


__all__ = [
    "RegressionWeights",
    "VariogramSummary",
    "EstimateResult",
    "pairwise_sum",
    "empirical_variogram",
    "variogram_from_array",
    "ols_weights",
    "gls_weights",
    "constrained_weights",
    "log_variogram_covariance",
    "estimate_alpha",
    "estimate_from_variogram",
    "estimate",
    "estimate_sample",
]
