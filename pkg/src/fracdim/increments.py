"""Finite-difference increments of order p, their dilations, and grid application.

An increment is a finite array of coefficients ``a_j`` indexed by integer
multi-indices ``j`` in one or two dimensions.  It has order ``p`` when every
moment ``sum_j j**r a_j`` with ``|r| <= p`` vanishes and some moment with
``|r| = p + 1`` does not.  Dilating by an integer ``u`` moves the coefficient
at ``j`` to ``j * u``.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    AllZero,
    ConfigError,
    NonVanishingZerothMoment,
    OrderExceedsCap,
    OutOfBounds,
)

MOMENT_TOL = 1e-12
DEFAULT_ORDER_CAP = 8

Offset = tuple  # tuple[int, ...] of length d


def _as_offset(key) -> tuple:
    if isinstance(key, (int, np.integer)):
        return (int(key),)
    return tuple(int(k) for k in key)


def _normalize(coeffs: Mapping) -> dict:
    out = {}
    dim = None
    for key, value in coeffs.items():
        off = _as_offset(key)
        if dim is None:
            dim = len(off)
        elif len(off) != dim:
            raise ConfigError(f"mixed offset dimensions: {off!r} vs dimension {dim}")
        if dim not in (1, 2):
            raise ConfigError(f"increments are supported for d = 1 or 2, got d = {dim}")
        v = float(value)
        if not math.isfinite(v):
            raise ConfigError(f"coefficient at {off} is not finite")
        out[off] = out.get(off, 0.0) + v
    return out


def multi_indices(order: int, dim: int):
    """Yield every nonnegative multi-index r of length ``dim`` with ``|r| == order``."""
    if dim == 1:
        yield (order,)
        return
    for first in range(order, -1, -1):
        for rest in multi_indices(order - first, dim - 1):
            yield (first,) + rest


def moment(coeffs: Mapping, r: Sequence[int]) -> float:
    """Return ``sum_j j**r a_j`` with ``j**r = prod_l j[l]**r[l]`` and ``0**0 = 1``."""
    total = 0.0
    for off, a in coeffs.items():
        term = a
        for jl, rl in zip(off, r):
            term *= jl**rl
        total += term
    return total


def increment_order(coeffs: Mapping, cap: int = DEFAULT_ORDER_CAP) -> int:
    """Smallest p such that all moments with ``|r| <= p`` vanish.

    Raises
    ------
    AllZero
        Every coefficient is zero.
    NonVanishingZerothMoment
        ``sum_j a_j != 0``, so the array is not an increment of any order.
    OrderExceedsCap
        Moments vanish for every ``|r| <= cap + 1``.
    """
    coeffs = _normalize(coeffs)
    if not coeffs or all(a == 0.0 for a in coeffs.values()):
        raise AllZero("increment has no nonzero coefficient")
    if cap < 0:
        raise ConfigError("order cap must be nonnegative")
    dim = len(next(iter(coeffs)))
    for q in range(cap + 2):
        if any(abs(moment(coeffs, r)) > MOMENT_TOL for r in multi_indices(q, dim)):
            if q == 0:
                raise NonVanishingZerothMoment(
                    f"coefficients sum to {moment(coeffs, (0,) * dim)!r}, not zero"
                )
            return q - 1
    raise OrderExceedsCap(f"all moments up to order {cap + 1} vanish")


@dataclass(frozen=True)
class Increment:
    """Validated coefficient array with its order and support radius."""

    offsets: tuple
    values: tuple
    order: int
    name: str = "custom"

    @classmethod
    def from_mapping(cls, coeffs: Mapping, name: str = "custom", cap: int = DEFAULT_ORDER_CAP):
        norm = _normalize(coeffs)
        order = increment_order(norm, cap)
        items = sorted((k, v) for k, v in norm.items() if v != 0.0)
        return cls(tuple(k for k, _ in items), tuple(v for _, v in items), order, name)

    @property
    def dim(self) -> int:
        return len(self.offsets[0])

    @property
    def coeffs(self) -> dict:
        return dict(zip(self.offsets, self.values))

    @property
    def support_radius(self) -> tuple:
        """Multi-index J with -J <= j <= J for every stored offset."""
        return tuple(max(abs(off[l]) for off in self.offsets) for l in range(self.dim))

    @property
    def radius(self) -> int:
        return max(self.support_radius)

    def to_literal(self) -> str:
        return format_increment(self)


@dataclass(frozen=True)
class DilatedIncrement:
    base: Increment
    u: int
    offsets: np.ndarray = field(repr=False, compare=False)
    values: np.ndarray = field(repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def coeffs(self) -> dict:
        return {tuple(int(x) for x in off): float(v) for off, v in zip(self.offsets, self.values)}

    @property
    def support_radius(self) -> tuple:
        return tuple(self.u * J for J in self.base.support_radius)


def dilate(inc: Increment, u: int) -> DilatedIncrement:
    """Place the coefficient ``a_j`` at offset ``j * u``."""
    if int(u) != u or u < 1:
        raise ConfigError(f"dilation factor must be a positive integer, got {u!r}")
    u = int(u)
    offsets = np.array(inc.offsets, dtype=np.int64) * u
    values = np.array(inc.values, dtype=float)
    offsets.setflags(write=False)
    values.setflags(write=False)
    return DilatedIncrement(inc, u, offsets, values)


def apply_increment(dil: DilatedIncrement, data: np.ndarray, i, origin=0) -> float:
    """Return ``sum_j a_j^u data[i + j]``.

    ``origin`` is added to every index before lookup, so a grid stored with a
    margin of width ``w`` is addressed with ``origin=w``.
    """
    data = np.asarray(data, dtype=float)
    i = np.asarray(_as_offset(i), dtype=np.int64)
    origin = np.broadcast_to(np.asarray(origin, dtype=np.int64), i.shape)
    if data.ndim != dil.dim or i.shape[0] != dil.dim:
        raise ConfigError("data, index and increment dimensions disagree")
    total = 0.0
    for off, a in zip(dil.offsets, dil.values):
        idx = i + off + origin
        if np.any(idx < 0) or np.any(idx >= data.shape):
            raise OutOfBounds(f"index {tuple(int(x) for x in idx)} outside grid of shape {data.shape}")
        total += a * data[tuple(idx)]
    return float(total)


def increment_field(dil: DilatedIncrement, data: np.ndarray, n0: Sequence[int], margin: int) -> np.ndarray:
    """Apply a dilated increment at every interior index ``0 <= i < n0``.

    ``data`` holds grid indices ``-margin .. n0 + margin - 1`` along each axis.
    """
    data = np.asarray(data, dtype=float)
    n0 = tuple(int(x) for x in n0)
    expected = tuple(n + 2 * margin for n in n0)
    if data.shape != expected:
        raise ConfigError(f"data shape {data.shape} does not match grid {expected}")
    for l, J in enumerate(dil.support_radius):
        if J > margin:
            raise OutOfBounds(f"increment reaches {J} points along axis {l}, margin is {margin}")
    out = np.zeros(n0)
    for off, a in zip(dil.offsets, dil.values):
        sl = tuple(slice(margin + o, margin + o + n) for o, n in zip(off, n0))
        out += a * data[sl]
    return out


# Named increments

def first_difference() -> Increment:
    """Order-0 increment ``a_0 = -1, a_1 = 1``."""
    return Increment.from_mapping({0: -1.0, 1: 1.0}, name="diff0")


def second_difference() -> Increment:
    """Order-1 increment ``a_-1 = 1, a_0 = -2, a_1 = 1``."""
    return Increment.from_mapping({-1: 1.0, 0: -2.0, 1: 1.0}, name="diff1")


def square_increment() -> Increment:
    """Order-1 two-dimensional increment on the corners of the unit square."""
    return Increment.from_mapping(
        {(0, 0): 1.0, (1, 1): 1.0, (1, 0): -1.0, (0, 1): -1.0}, name="square"
    )


PRESETS = {
    "diff0": first_difference,
    "diff1": second_difference,
    "square": square_increment,
}

_PAIR = re.compile(r"^\s*(-?\d+(?:\s*,\s*-?\d+)*)\s*:\s*([-+0-9.eE]+)\s*$")


def parse_increment(text: str) -> Increment:
    """Parse a preset name or an ``offset:coefficient`` literal.

    1D literals separate pairs with commas (``-1:1,0:-2,1:1``); 2D literals
    separate pairs with semicolons (``0,0:1;1,1:1;1,0:-1;0,1:-1``).
    """
    text = text.strip()
    if text in PRESETS:
        return PRESETS[text]()
    if ";" in text:
        chunks = [c for c in text.split(";") if c.strip()]
    else:
        chunks = [c for c in text.split(",") if c.strip()]
        if any(":" not in c for c in chunks):
            chunks = [text]
    coeffs = {}
    for chunk in chunks:
        match = _PAIR.match(chunk)
        if match is None:
            raise ConfigError(f"cannot parse increment entry {chunk!r}")
        off = tuple(int(x) for x in match.group(1).split(","))
        try:
            value = float(match.group(2))
        except ValueError as exc:
            raise ConfigError(f"bad coefficient in {chunk!r}") from exc
        if off in coeffs:
            raise ConfigError(f"offset {off} given twice")
        coeffs[off] = value
    return Increment.from_mapping(coeffs)


def _fmt_num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def format_increment(inc: Increment) -> str:
    if inc.name in PRESETS:
        return inc.name
    pairs = [",".join(str(o) for o in off) + ":" + _fmt_num(v) for off, v in zip(inc.offsets, inc.values)]
    return (";" if inc.dim > 1 else ",").join(pairs)


def required_margin(inc: Increment, m: int) -> int:
    return int(m) * inc.radius


def all_multi_indices_upto(order: int, dim: int):
    return itertools.chain.from_iterable(multi_indices(q, dim) for q in range(order + 1))
