"""Pointwise transformations applied to a Gaussian field, and the normal CDF.

``std_normal_cdf`` evaluates the lower tail through ``erfc`` on the negative
half-line and reflects, so ``Phi(-x) = 1 - Phi(x)`` holds by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import ConfigError

_SQRT_HALF = math.sqrt(0.5)


def std_normal_cdf(x):
    """Standard normal distribution function (scalar or array)."""
    x = np.asarray(x, dtype=float)
    lower = 0.5 * special.erfc(np.abs(x) * _SQRT_HALF)
    out = np.where(x < 0, lower, 1.0 - lower)
    return float(out) if out.ndim == 0 else out


def std_normal_quantile(q):
    """Inverse of :func:`std_normal_cdf` (``q`` in (0, 1))."""
    q = np.asarray(q, dtype=float)
    out = special.ndtri(q)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PointTransform:
    """Tagged transform ``g``; ``kind`` is one of :data:`KINDS`.

    ``a``/``b`` parameterize ``affine`` and ``tau`` parameterizes ``lognormal``.
    """

    kind: str = "identity"
    a: float = 1.0
    b: float = 0.0
    tau: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown transform {self.kind!r}")
        if self.kind == "affine" and self.a == 0.0:
            raise ConfigError("affine transform needs a nonzero slope")
        if self.kind == "lognormal" and not self.tau > 0.0:
            raise ConfigError("lognormal transform needs tau > 0")

    @property
    def is_affine(self) -> bool:
        return self.kind in ("identity", "affine")

    @property
    def tag(self) -> str:
        if self.kind == "affine":
            return f"affine:{_num(self.a)},{_num(self.b)}"
        if self.kind == "lognormal":
            return f"lognormal:{_num(self.tau)}"
        return {"exponential": "exp1", "chisquared": "chisq1"}.get(self.kind, self.kind)

    @property
    def label(self) -> str:
        """Short human-readable process name used in reports."""
        return {
            "identity": "Gaussian",
            "uniform": "Uniform",
            "exponential": "Exp(1)",
            "chisquared": "Chi2(1)",
        }.get(self.kind) or (f"Log-N({_num(self.tau)})" if self.kind == "lognormal" else self.tag)

    def __call__(self, x):
        return apply(self, x)


KINDS = ("identity", "affine", "uniform", "exponential", "chisquared", "lognormal")

IDENTITY = PointTransform("identity")
UNIFORM = PointTransform("uniform")
EXPONENTIAL = PointTransform("exponential")
CHI_SQUARED = PointTransform("chisquared")


def lognormal(tau: float) -> PointTransform:
    return PointTransform("lognormal", tau=float(tau))


def affine(a: float, b: float) -> PointTransform:
    return PointTransform("affine", a=float(a), b=float(b))


def apply(g: PointTransform, x):
    """Evaluate ``g`` pointwise."""
    x = np.asarray(x, dtype=float)
    kind = g.kind
    if kind == "identity":
        out = x.copy()
    elif kind == "affine":
        out = g.a * x + g.b
    elif kind == "uniform":
        out = np.asarray(std_normal_cdf(x))
    elif kind == "exponential":
        # -log(1 - Phi(x)) = -log(Phi(-x)); log_ndtr stays finite far into the tail
        out = -special.log_ndtr(-x)
    elif kind == "chisquared":
        out = x * x
    else:
        out = np.exp(g.tau * x)
    return float(out) if out.ndim == 0 else out


def _num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def parse_transform(text: str) -> PointTransform:
    """Parse ``identity``, ``affine:a,b``, ``uniform``, ``exp1``, ``chisq1`` or ``lognormal:tau``."""
    text = text.strip()
    name, _, args = text.partition(":")
    name = name.strip().lower()
    try:
        if name in ("identity", "gaussian"):
            return IDENTITY
        if name == "uniform":
            return UNIFORM
        if name in ("exp1", "exponential"):
            return EXPONENTIAL
        if name in ("chisq1", "chisquared"):
            return CHI_SQUARED
        if name == "lognormal":
            return lognormal(float(args) if args else 1.0)
        if name == "affine":
            a, b = (float(v) for v in args.split(","))
            return affine(a, b)
    except ValueError as exc:
        raise ConfigError(f"bad transform arguments in {text!r}") from exc
    raise ConfigError(f"unknown transform {text!r}")
