"""Exact simulation of stationary Gaussian processes and fields on regular grids.

The covariance on an ``N[1] x ... x N[d]`` grid is embedded in a periodic
(block-)circulant covariance on a torus of size ``M``, which the DFT
diagonalizes.  If every eigenvalue is nonnegative the construction yields
samples whose covariance on the grid is exactly ``gamma``.

Random numbers come from numpy's ``PCG64`` bit generator seeded with a
64-bit integer; Gaussian variates are numpy's ``Generator.standard_normal``
(ziggurat).  Identical seeds give identical fields within one installation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .covariance import CovarianceModel, GridSpec
from .errors import ConfigError, NotNonNegativeDefinite
from .transforms import IDENTITY, PointTransform, apply

log = logging.getLogger(__name__)

EIGEN_TOL = 1e-10
MAX_DOUBLINGS = 4
MIN_TORUS = 4


def _next_pow2(x: int) -> int:
    return 1 << max(int(x) - 1, 0).bit_length()


@dataclass(frozen=True)
class Embedding:
    model: CovarianceModel
    grid: GridSpec
    torus_size: tuple
    eigenvalues: np.ndarray = field(repr=False, compare=False)
    clamp_count: int = 0
    min_eigenvalue: float = 0.0
    doublings: int = 0

    @property
    def dim(self) -> int:
        return self.grid.dim

    @property
    def exact(self) -> bool:
        return self.clamp_count == 0


def wrapped_covariance(model: CovarianceModel, grid: GridSpec, torus_size) -> np.ndarray:
    """First row/base block of the circulant matrix: ``gamma(h * min(k, M - k))``."""
    axes = []
    for M, h in zip(torus_size, grid.spacing):
        k = np.arange(M)
        axes.append(np.minimum(k, M - k) * h)
    mesh = np.meshgrid(*axes, indexing="ij")
    dist = np.sqrt(sum(x * x for x in mesh))
    return model.at_distance(dist)


def build_embedding(model: CovarianceModel, grid: GridSpec) -> Embedding:
    """Compute the circulant embedding eigenvalues for ``model`` on ``grid``.

    The torus side starts at the smallest power of two >= ``2 (N - 1)``, at
    least 4; the smallest side is doubled (at most four times) while an
    eigenvalue is below ``-1e-10`` times the largest one.  Remaining negatives are clamped to zero
    and counted.
    """
    if model.dim != grid.dim:
        raise ConfigError(f"model dimension {model.dim} does not match grid dimension {grid.dim}")
    N = grid.shape
    if any(x < 2 for x in N):
        raise ConfigError("each axis needs at least two grid points")
    # floor of 4 keeps a two-point axis from folding onto a 2-cycle
    size = [max(MIN_TORUS, _next_pow2(2 * (x - 1))) for x in N]
    for attempt in range(MAX_DOUBLINGS + 1):
        cov = wrapped_covariance(model, grid, size)
        spectrum = np.fft.fftn(cov)
        lam = spectrum.real
        top = float(lam.max())
        resid = float(np.abs(spectrum.imag).max())
        if resid > EIGEN_TOL * top:
            log.warning("eigenvalue imaginary residue %.3g exceeds tolerance", resid / top)
        low = float(lam.min())
        if low >= -EIGEN_TOL * top:
            negative = lam < 0.0
            count = int(np.count_nonzero(negative))
            if count:
                lam = np.where(negative, 0.0, lam)
                log.info("clamped %d tiny negative eigenvalues (min %.3g)", count, low)
            lam.setflags(write=False)
            return Embedding(model, grid, tuple(size), lam, count, low, attempt)
        if attempt == MAX_DOUBLINGS:
            break
        size[int(np.argmin(size))] *= 2
    raise NotNonNegativeDefinite(
        f"circulant embedding not nonnegative definite after {MAX_DOUBLINGS} doublings "
        f"(torus {tuple(size)}, most negative eigenvalue {low:.6g})",
        min_eigenvalue=low,
    )


def implied_covariance(emb: Embedding) -> np.ndarray:
    """Torus covariance produced by the sampler, ``IDFT(eigenvalues)``."""
    return np.fft.ifftn(emb.eigenvalues).real


@dataclass(frozen=True)
class FieldSample:
    """Grid values for indices ``-margin .. n0 + margin - 1`` along each axis."""

    values: np.ndarray = field(repr=False, compare=False)
    grid: GridSpec
    model: CovarianceModel
    seed: int
    part: str = "re"
    transforms: tuple = ()

    @property
    def transform(self) -> PointTransform:
        """Most recently applied transform (identity when untransformed)."""
        return self.transforms[-1] if self.transforms else IDENTITY

    @property
    def interior(self) -> np.ndarray:
        m = self.grid.margin
        return self.values[tuple(slice(m, m + n) for n in self.grid.n0)]


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


def sample_field(emb: Embedding, seed: int):
    """Draw two independent exact samples on the grid from one complex draw."""
    rng = make_rng(seed)
    shape = emb.torus_size
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    scale = np.sqrt(emb.eigenvalues / float(np.prod(shape)))
    w = np.fft.fftn(scale * z)
    window = tuple(slice(0, n) for n in emb.grid.shape)
    re = np.ascontiguousarray(w.real[window])
    im = np.ascontiguousarray(w.imag[window])
    return (
        FieldSample(re, emb.grid, emb.model, int(seed), "re"),
        FieldSample(im, emb.grid, emb.model, int(seed), "im"),
    )


def simulate(model: CovarianceModel, grid: GridSpec, seed: int) -> FieldSample:
    """Convenience wrapper returning the first sample of one draw."""
    return sample_field(build_embedding(model, grid), seed)[0]


def transform_field(sample: FieldSample, g: PointTransform) -> FieldSample:
    """Apply ``g`` to every grid value."""
    values = np.asarray(apply(g, sample.values), dtype=float)
    chain = sample.transforms if g.kind == "identity" else sample.transforms + (g,)
    return replace(sample, values=values, transforms=chain)
