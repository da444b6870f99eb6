"""Replication harness for summary tables, plus normality diagnostics.

Every replication ``r`` draws its field from the seed
``derive_seed(master_seed, r)``, a pure function of the pair, so results do
not depend on the order or the process in which replications run.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import special

from . import asymptotics
from .covariance import CovarianceModel, GridSpec
from .errors import ConfigError, FracDimError, ReplicationError, TooFewReplications
from .estimators import estimate
from .fieldgen import build_embedding, sample_field
from .increments import Increment, first_difference, second_difference
from .transforms import IDENTITY, PointTransform, apply, std_normal_cdf, std_normal_quantile

log = logging.getLogger(__name__)


def derive_seed(master_seed: int, index: int) -> int:
    """64-bit seed for replication ``index``."""
    ss = np.random.SeedSequence([int(master_seed) & (2**64 - 1), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class EstimatorSpec:
    increment: Increment
    scheme: str = "ols"
    label: str = ""

    @property
    def name(self) -> str:
        return self.label or f"{self.scheme.upper()}{self.increment.order}"


OLS0 = EstimatorSpec(first_difference(), "ols", "OLS0")
OLS1 = EstimatorSpec(second_difference(), "ols", "OLS1")
GLS1 = EstimatorSpec(second_difference(), "gls", "GLS1")
TABLE1_ESTIMATORS = (OLS0, OLS1, GLS1)


@dataclass(frozen=True)
class ExperimentSpec:
    model: CovarianceModel
    n0: tuple
    increment: Increment
    m: int = 4
    scheme: str = "ols"
    transform: PointTransform = IDENTITY
    replications: int = 100
    seed: int = 0
    margin: int | None = None

    def __post_init__(self):
        n0 = self.n0 if isinstance(self.n0, (tuple, list)) else (self.n0,)
        object.__setattr__(self, "n0", tuple(int(x) for x in n0))
        if self.replications < 2:
            raise TooFewReplications("need at least 2 replications")
        if self.margin is not None and self.margin < self.m * self.increment.radius:
            raise ConfigError(f"margin {self.margin} < m * J = {self.m * self.increment.radius}")
        if len(self.n0) != self.model.dim or self.increment.dim != self.model.dim:
            raise ConfigError("model, grid and increment dimensions disagree")

    @property
    def grid(self) -> GridSpec:
        margin = self.m * self.increment.radius if self.margin is None else self.margin
        return GridSpec(self.n0, margin)

    def to_dict(self) -> dict:
        return {
            "alpha": self.model.alpha,
            "c": self.model.c,
            "dim": self.model.dim,
            "n0": list(self.n0),
            "margin": self.grid.margin,
            "increment": self.increment.to_literal(),
            "m": self.m,
            "scheme": self.scheme,
            "transform": self.transform.tag,
            "replications": self.replications,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class SummaryStats:
    bias: float
    sd: float
    mse: float
    mean_alpha: float
    R: int

    def to_dict(self) -> dict:
        return {"bias": self.bias, "sd": self.sd, "mse": self.mse, "mean_alpha": self.mean_alpha, "R": self.R}


def _replicate(emb, grid, seed, transforms, estimators):
    """alpha_hat for each (transform, estimator) on one simulated field."""
    values = sample_field(emb, seed)[0].values
    out = []
    for g in transforms:
        gv = values if g.kind == "identity" else np.asarray(apply(g, values))
        for est in estimators:
            out.append(estimate(gv, grid, est.increment, est.m, est.scheme, c=emb.model.c).alpha_hat)
    return out


@dataclass(frozen=True)
class _Batch:
    model: CovarianceModel
    grid: GridSpec
    transforms: tuple
    estimators: tuple  # of _Est
    seed: int


@dataclass(frozen=True)
class _Est:
    increment: Increment
    scheme: str
    m: int


def _run_indices(batch: _Batch, indices, emb=None) -> np.ndarray:
    if emb is None:
        emb = build_embedding(batch.model, batch.grid)
    rows = []
    for r in indices:
        try:
            rows.append(_replicate(emb, batch.grid, derive_seed(batch.seed, r), batch.transforms, batch.estimators))
        except FracDimError as exc:
            raise ReplicationError(r, exc) from exc
    return np.array(rows, dtype=float).reshape(len(indices), -1)


def _run_batch(batch: _Batch, R: int, jobs: int = 1) -> np.ndarray:
    """Array of shape (R, len(transforms) * len(estimators))."""
    emb = build_embedding(batch.model, batch.grid)
    if jobs <= 1 or R < 2 * jobs:
        return _run_indices(batch, range(R), emb)
    chunks = [list(range(R))[k::jobs] for k in range(jobs)]
    out = np.empty((R, len(batch.transforms) * len(batch.estimators)))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for idx, res in zip(chunks, pool.map(_run_indices, [batch] * jobs, chunks)):
            out[idx] = res
    return out


def run_experiment(spec: ExperimentSpec, jobs: int = 1) -> np.ndarray:
    """alpha_hat for replications ``0 .. R-1`` of ``spec``."""
    batch = _Batch(spec.model, spec.grid, (spec.transform,), (_Est(spec.increment, spec.scheme, spec.m),), spec.seed)
    return _run_batch(batch, spec.replications, jobs)[:, 0]


def run_pipeline(spec: ExperimentSpec, seed: int) -> float:
    """One replication by hand: simulate, transform, estimate."""
    emb = build_embedding(spec.model, spec.grid)
    return _replicate(emb, spec.grid, seed, (spec.transform,), (_Est(spec.increment, spec.scheme, spec.m),))[0]


def summarize(alphas, alpha_true: float) -> SummaryStats:
    """Bias, sample SD (divisor R - 1) and MSE about ``alpha_true``."""
    a = np.asarray(alphas, dtype=float)
    R = a.size
    if R < 2:
        raise TooFewReplications(f"need at least 2 replications, got {R}")
    mean = float(np.mean(a))
    err = a - alpha_true
    return SummaryStats(
        bias=mean - alpha_true,
        sd=float(np.std(a, ddof=1)),
        mse=float(np.mean(err * err)),
        mean_alpha=mean,
        R=R,
    )


# Bias/SD/MSE grids


@dataclass
class TableRow:
    alpha: float
    process: str
    estimator: str
    stats: SummaryStats
    m: int = 4

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "process": self.process, "estimator": self.estimator, "m": self.m, **self.stats.to_dict()}


def bias_table(
    alphas,
    transforms,
    estimators=TABLE1_ESTIMATORS,
    n0=(1000,),
    m: int = 4,
    replications: int = 100,
    seed: int = 0,
    c: float | None = None,
    jobs: int = 1,
) -> list:
    """Bias/SD/MSE for every (alpha, process, estimator) combination.

    All processes and estimators at one alpha share the same simulated
    Gaussian fields; the margin is the largest any estimator needs.
    """
    n0 = tuple(n0) if isinstance(n0, (tuple, list)) else (int(n0),)
    margin = max(m * e.increment.radius for e in estimators)
    rows = []
    for alpha in alphas:
        model = CovarianceModel.default(alpha, len(n0), c)
        ests = tuple(_Est(e.increment, e.scheme, m) for e in estimators)
        batch = _Batch(model, GridSpec(n0, margin), tuple(transforms), ests, seed)
        res = _run_batch(batch, replications, jobs)
        col = 0
        for g in transforms:
            for e in estimators:
                rows.append(TableRow(float(alpha), g.label, e.name, summarize(res[:, col], alpha), m))
                col += 1
    return rows


def mse_vs_m(
    alphas,
    transform: PointTransform,
    m_values=(2, 4, 6, 8, 10),
    estimators=TABLE1_ESTIMATORS,
    n0=(2000,),
    replications: int = 100,
    seed: int = 0,
    c: float | None = None,
    jobs: int = 1,
) -> list:
    """MSE of each estimator as the number of regression points varies."""
    n0 = tuple(n0) if isinstance(n0, (tuple, list)) else (int(n0),)
    margin = max(m_values) * max(e.increment.radius for e in estimators)
    rows = []
    for alpha in alphas:
        model = CovarianceModel.default(alpha, len(n0), c)
        ests = tuple(_Est(e.increment, e.scheme, m) for m in m_values for e in estimators)
        batch = _Batch(model, GridSpec(n0, margin), (transform,), ests, seed)
        res = _run_batch(batch, replications, jobs)
        col = 0
        for m in m_values:
            for e in estimators:
                rows.append(TableRow(float(alpha), transform.label, e.name, summarize(res[:, col], alpha), m))
                col += 1
    return rows


# Variance ratios


@dataclass
class RatioRow:
    size: tuple
    n: int
    variance: float
    empirical_ratio: float
    predicted_ratio: float | None
    rate: str | None


def variance_ratio_report(spec: ExperimentSpec, sizes, jobs: int = 1) -> list:
    """Empirical ``var(n_k) / var(n_1)`` with asymptotic annotations.

    ``sizes`` are per-axis point counts; for d = 2 each entry is the side of a
    square grid (or an explicit pair).  Ratios are annotated with the
    predicted value when the rate class is defined for the spec's alpha.
    """
    sizes = [tuple(s) if isinstance(s, (tuple, list)) else (int(s),) * spec.model.dim for s in sizes]
    if len(sizes) < 2:
        raise ConfigError("need at least two sample sizes")
    try:
        rate = asymptotics.variance_class(
            spec.model.alpha, spec.increment.order, spec.model.dim, spec.transform.is_affine
        )
    except FracDimError as exc:
        log.info("no asymptotic annotation: %s", exc)
        rate = None
    variances = []
    for size in sizes:
        alphas = run_experiment(replace(spec, n0=size), jobs)
        variances.append(float(np.var(alphas, ddof=1)))
    n1 = int(np.prod(sizes[0]))
    rows = []
    for size, var in zip(sizes, variances):
        n = int(np.prod(size))
        pred = asymptotics.predicted_ratio(rate, n1, n) if rate is not None else None
        rows.append(RatioRow(size, n, var, var / variances[0], pred, str(rate) if rate else None))
    return rows


# Normality diagnostics


def ks_distance(z) -> float:
    """``sup_x |F_emp(x) - Phi(x)|`` for the sample ``z``."""
    z = np.sort(np.asarray(z, dtype=float))
    R = z.size
    cdf = np.asarray(std_normal_cdf(z), dtype=float).reshape(-1)
    i = np.arange(1, R + 1)
    return float(max(np.max(i / R - cdf), np.max(cdf - (i - 1) / R)))


def ks_normality(alphas):
    """Kolmogorov-Smirnov distance to N(0, 1) after standardizing, and p-value.

    The sample is standardized by its own mean and SD, then the p-value is
    read from the asymptotic Kolmogorov distribution at ``sqrt(R) D``.  With
    estimated parameters that p-value is anti-conservative.
    """
    a = np.asarray(alphas, dtype=float)
    if a.size < 5:
        raise TooFewReplications(f"KS test needs at least 5 values, got {a.size}")
    sd = float(np.std(a, ddof=1))
    if sd == 0.0:
        raise ConfigError("sample has zero spread")
    D = ks_distance((a - a.mean()) / sd)
    return D, float(special.kolmogorov(math.sqrt(a.size) * D))


@dataclass(frozen=True)
class QQPoints:
    theoretical: np.ndarray = field(compare=False)
    ordered: np.ndarray = field(compare=False)
    slope: float = 0.0
    intercept: float = 0.0


def qq_points(alphas) -> QQPoints:
    """Normal Q-Q pairs ``(Phi^-1((r - 0.5) / R), a_(r))`` and the quartile line."""
    a = np.sort(np.asarray(alphas, dtype=float))
    R = a.size
    if R < 2:
        raise TooFewReplications(f"Q-Q plot needs at least 2 values, got {R}")
    theo = np.asarray(std_normal_quantile((np.arange(1, R + 1) - 0.5) / R), dtype=float).reshape(-1)
    q1, q3 = np.quantile(a, [0.25, 0.75])
    z1, z3 = std_normal_quantile(0.25), std_normal_quantile(0.75)
    slope = float((q3 - q1) / (z3 - z1))
    return QQPoints(theo, a, slope, float(q1 - slope * z1))
