"""Asymptotic variance rates of alpha_hat and the variance ratios they predict.

Rates are expressed in terms of the total sample size ``n``:

* Gaussian (affine ``g``): ``n^-1`` when ``4 + 4p - 2 alpha > d``, ``n^-1 log n``
  on the boundary, and ``n^((2 alpha - 4) / d)`` beyond it.
* Non-affine ``g`` adds a ``n^(-2 alpha / d)`` term that dominates when
  ``2 alpha < d``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BoundaryAlpha, ConfigError

_EPS = 1e-12


@dataclass(frozen=True)
class RateClass:
    """``var ~ n^exponent``, times ``log n`` when ``log_factor`` is set."""

    exponent: float
    log_factor: bool = False

    @property
    def kind(self) -> str:
        if self.log_factor:
            return "InvNLogN"
        return "InvN" if self.exponent == -1.0 else "Pow"

    def __str__(self) -> str:
        if self.log_factor:
            return f"n^{self.exponent:g} log n"
        return f"n^{self.exponent:g}"


INV_N = RateClass(-1.0)
INV_N_LOG_N = RateClass(-1.0, True)


def variance_class(alpha: float, p: int, d: int, affine_g: bool) -> RateClass:
    """Rate class of ``var(alpha_hat)`` for increment order ``p``.

    Raises
    ------
    BoundaryAlpha
        ``alpha`` sits where the non-affine term and the ``n^-1`` term swap
        dominance (``2 alpha = d``); both contribute there and no single power
        describes the variance.
    """
    if not (0.0 < alpha < 2.0):
        raise ConfigError(f"alpha must lie in (0, 2), got {alpha!r}")
    if d not in (1, 2) or p < 0:
        raise ConfigError("need d in {1, 2} and p >= 0")
    gap = 4 + 4 * p - 2 * alpha - d
    if abs(gap) < _EPS:
        gauss = INV_N_LOG_N
    elif gap > 0:
        gauss = INV_N
    else:
        gauss = RateClass((2 * alpha - 4) / d)
    if affine_g:
        return gauss
    if abs(2 * alpha - d) < _EPS:
        raise BoundaryAlpha(f"alpha = {alpha} is the boundary 2 alpha = d for non-affine g")
    if 2 * alpha < d:
        return RateClass(-2 * alpha / d)
    return gauss


def predicted_ratio(rate: RateClass, n1: float, n2: float) -> float:
    """``var(n2) / var(n1)`` implied by ``rate`` (sizes are total sample sizes)."""
    if n1 <= 0 or n2 <= 0:
        raise ConfigError("sample sizes must be positive")
    ratio = (n2 / n1) ** rate.exponent
    if rate.log_factor:
        ratio *= math.log(n2) / math.log(n1)
    return ratio


def predicted_ratio_sides(rate: RateClass, side1: int, side2: int, d: int = 2) -> float:
    """Ratio for square grids given by their side lengths (``n = side^d``)."""
    return predicted_ratio(rate, float(side1) ** d, float(side2) ** d)
