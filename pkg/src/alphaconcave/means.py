"""Power means of order alpha <= 0 on the extended half-line [0, +inf].

Values are plain floats (or float arrays); ``+inf`` is the distinguished
infinite value.  Negative numbers and NaN are rejected at the boundary by
:func:`as_ext`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Alpha",
    "as_ext",
    "mean_alpha",
    "mean_alpha_symmetric",
    "alpha_power",
    "alpha_root",
]


def as_ext(x):
    """Validate ``x`` as a value (or array of values) in [0, +inf].

    Returns a float for scalar input and a float64 array otherwise.
    """
    arr = np.asarray(x, dtype=float)
    if np.isnan(arr).any():
        raise ValueError("extended non-negative values cannot be NaN")
    if (arr < 0).any():
        raise ValueError("extended non-negative values cannot be negative")
    if arr.ndim == 0:
        return float(arr)
    return arr


@dataclass(frozen=True)
class Alpha:
    """Order of a power mean, restricted to ``[-inf, 0]``.

    ``Alpha(0.0)`` is the geometric regime, ``Alpha(-inf)`` the minimum,
    anything strictly negative and finite the power regime.
    """

    value: float

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v) or v > 0:
            raise ValueError(f"alpha must lie in [-inf, 0], got {self.value!r}")
        # normalise -0.0 so that equality and hashing behave
        object.__setattr__(self, "value", 0.0 if v == 0 else v)

    @classmethod
    def zero(cls) -> "Alpha":
        return cls(0.0)

    @classmethod
    def minus_infinity(cls) -> "Alpha":
        return cls(-math.inf)

    @classmethod
    def finite(cls, a: float) -> "Alpha":
        if not (-math.inf < a < 0):
            raise ValueError(f"finite regime needs -inf < alpha < 0, got {a!r}")
        return cls(a)

    @classmethod
    def parse(cls, text: str) -> "Alpha":
        t = text.strip().lower()
        if t in {"-inf", "-infinity", "minus-infinity", "min"}:
            return cls.minus_infinity()
        if t in {"0", "zero", "log"}:
            return cls.zero()
        if "/" in t:
            num, den = t.split("/")
            return cls(float(num) / float(den))
        return cls(float(t))

    @property
    def regime(self) -> str:
        if self.value == 0:
            return "zero"
        if self.value == -math.inf:
            return "minus_infinity"
        return "finite"

    @property
    def is_zero(self) -> bool:
        return self.regime == "zero"

    @property
    def is_finite(self) -> bool:
        return self.regime == "finite"

    @property
    def is_minus_infinity(self) -> bool:
        return self.regime == "minus_infinity"

    def __str__(self) -> str:
        if self.is_minus_infinity:
            return "-inf"
        return repr(self.value)


def _as_alpha(alpha) -> Alpha:
    return alpha if isinstance(alpha, Alpha) else Alpha(alpha)


def mean_alpha(a, b, t, alpha):
    """Weighted mean of order ``alpha`` of ``a`` and ``b`` (weight ``t`` on ``a``).

    Works elementwise on arrays.  Conventions:

    * alpha = 0: ``a**t * b**(1-t)``; a zero argument wins over an infinite one.
    * alpha finite: zero if either argument is zero; an infinite argument
      contributes nothing to the power sum, so ``M(inf, c; 1/2) = c * 2**(-1/alpha)``.
    * alpha = -inf: ``min(a, b)``.
    """
    alpha = _as_alpha(alpha)
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"weight t must lie in [0, 1], got {t}")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scalar = a.ndim == 0 and b.ndim == 0
    a, b = np.broadcast_arrays(a, b)

    if alpha.is_minus_infinity:
        out = np.minimum(a, b)
    elif alpha.is_zero:
        out = _geometric(a, b, t)
    else:
        out = _power(a, b, t, alpha.value)
    return float(out) if scalar else out


def mean_alpha_symmetric(a, b, alpha):
    """Equal-weight mean ``mean_alpha(a, b, 1/2, alpha)``."""
    return mean_alpha(a, b, 0.5, alpha)


def _geometric(a, b, t):
    with np.errstate(divide="ignore", invalid="ignore"):
        la = np.log(a)
        lb = np.log(b)
        # 0**0 == 1: a zero-weight argument drops out entirely
        wa = np.where(t == 0.0, 0.0, t * la)
        wb = np.where(t == 1.0, 0.0, (1.0 - t) * lb)
        out = np.exp(wa + wb)
    zero = ((a == 0) & (t > 0)) | ((b == 0) & (t < 1))
    return np.where(zero, 0.0, out)


def _power(a, b, t, alpha):
    # log-space evaluation keeps |alpha| ~ 1e6 from overflowing
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        la = alpha * np.log(a)
        lb = alpha * np.log(b)
        lt = math.log(t) if t > 0 else -math.inf
        l1t = math.log1p(-t) if t < 1 else -math.inf
        s = np.logaddexp(la + lt, lb + l1t)
        out = np.exp(s / alpha)
    return np.where((a == 0) | (b == 0), 0.0, out)


def alpha_power(x, alpha):
    """Order-reversing coordinate change ``x -> x**alpha`` used for alpha < 0.

    ``0 -> +inf`` and ``+inf -> 0``.  For alpha = 0 this is ``-log x``.
    """
    alpha = _as_alpha(alpha)
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        if alpha.is_zero:
            return -np.log(x)
        if alpha.is_finite:
            return np.power(x, alpha.value)
    raise ValueError("no power transform for alpha = -inf")


def alpha_root(u, alpha):
    """Inverse of :func:`alpha_power`."""
    alpha = _as_alpha(alpha)
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        if alpha.is_zero:
            return np.exp(-u)
        if alpha.is_finite:
            return np.power(u, 1.0 / alpha.value)
    raise ValueError("no power transform for alpha = -inf")
