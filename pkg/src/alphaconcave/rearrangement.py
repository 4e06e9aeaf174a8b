"""One-sided decreasing rearrangement of 1-D grid functions.

``f*(z) = sup_x min(f(x), f(x - z))`` for ``z >= 0`` and ``0`` for ``z < 0``.
For an alpha-concave ``f`` this is again alpha-concave, has the same
distribution function, is decreasing on ``[0, inf)`` and dominates ``f`` in
the sense of difference functions.  :func:`check_rearrangement` tests each
of these claims on the grid.
"""

from __future__ import annotations

import math
from typing import Dict, NamedTuple, Optional, Sequence

import numpy as np

from . import _kernels
from .grids import BoxDomain, GridFunction, midpoint_defect
from .integration import default_levels, integrate
from .means import Alpha, mean_alpha_symmetric
from .transforms import difference_function

__all__ = [
    "star_rearrangement",
    "star_margin",
    "PropertyResult",
    "RearrangementReport",
    "check_rearrangement",
    "superlevel_identity_gap",
    "ratio_chain",
    "RatioChain",
]


def star_margin(count: int) -> int:
    return math.ceil((count - 1) / 2)


def star_rearrangement(f: GridFunction) -> GridFunction:
    """``f*`` on ``[-m h, (N - 1 + m) h]`` with ``m = ceil((N - 1) / 2)``.

    Shifts ``z = k h`` are whole nodes, so no snapping is needed; ``f*(0)``
    is the node maximum of ``f`` by construction.
    """
    if f.ndim != 1:
        raise ValueError("rearrangement is one-dimensional")
    n = f.domain.counts[0]
    h = f.domain.spacing[0]
    m = star_margin(n)
    vals = np.zeros(n + 2 * m)
    vals[m : m + n] = _kernels.star_values(np.ascontiguousarray(f.values))
    dom = BoxDomain((-m * h,), ((n - 1 + m) * h,), (n + 2 * m,))
    return GridFunction(dom, vals)


class PropertyResult(NamedTuple):
    ok: bool
    gap: float
    tol: float


class RearrangementReport(NamedTuple):
    """The six claims, keyed ``i`` .. ``vi``."""

    properties: Dict[str, PropertyResult]

    @property
    def ok(self) -> bool:
        return all(p.ok for p in self.properties.values())


def _measure(values: np.ndarray, s: float, h: float) -> float:
    # node-count measure of a superlevel set
    return int(np.count_nonzero(values > s)) * h


def _check_levels(f: GridFunction, levels) -> np.ndarray:
    if levels is None:
        return default_levels(f, count=32, floor=1e-3)
    return np.asarray(levels, dtype=float)


def superlevel_identity_gap(f: GridFunction, fs: GridFunction, levels=None) -> int:
    """Largest node-count mismatch between ``{f* > s}`` and ``(F_s - F_s) n [0, inf)``."""
    n = f.domain.counts[0]
    m = star_margin(n)
    worst = 0
    for s in _check_levels(f, levels):
        ind = (f.values > s).astype(float)
        # (F - F) n [0, inf) as shifts k >= 0 with some i, i - k both in F
        diff = np.correlate(ind, ind, mode="full")[n - 1 :] > 0.5
        star = fs.values[m : m + n] > s
        worst = max(worst, int(np.count_nonzero(diff != star)))
        worst = max(worst, int(np.count_nonzero(fs.values[m + n :] > s)))
    return worst


def _reference_mean(fs: GridFunction, out: BoxDomain, alpha: Alpha) -> np.ndarray:
    """``M_alpha(f*(0), f*(2|z|); 1/2)`` on the nodes of ``out``."""
    h = fs.domain.spacing[0]
    size = fs.domain.counts[0]
    zero = int(round(-fs.domain.lower[0] / h))
    idx = zero + 2 * np.abs(np.rint(out.axis(0) / h).astype(np.int64))
    partner = np.where(idx < size, fs.values[np.minimum(idx, size - 1)], 0.0)
    return mean_alpha_symmetric(fs.values[zero], partner, alpha)


def _local_variation(values: np.ndarray) -> np.ndarray:
    """Per node, the largest jump to a neighbour (finite values only)."""
    v = np.where(np.isfinite(values), values, np.nan)
    d = np.abs(np.diff(v))
    left = np.concatenate([[0.0], d])
    right = np.concatenate([d, [0.0]])
    w = np.fmax(left, right)
    return np.where(np.isnan(w), 0.0, w)


def _local_check(excess: np.ndarray, slack: np.ndarray) -> PropertyResult:
    """Pass when ``excess <= slack`` nodewise; report the tightest node."""
    k = int(np.argmax(excess - slack))
    return PropertyResult(bool(np.all(excess <= slack)), float(max(excess[k], 0.0)), float(slack[k]))


def check_rearrangement(
    f: GridFunction,
    alpha,
    levels: Optional[Sequence[float]] = None,
    rel_tol: float = 1e-9,
) -> RearrangementReport:
    """Evaluate the six rearrangement claims for an alpha-concave 1-D ``f``.

    i
        ``f*`` passes the midpoint alpha-concavity test up to the local
        one-cell variation of ``f*``.
    ii
        ``{f* > s}`` and ``{f > s}`` have equal node-count measure (gap <= h)
        at every test level.
    iii
        equal integrals, within ``h`` times the largest finite value.
    iv
        ``f*`` is non-increasing on ``[0, inf)``.
    v
        ``Delta f*(z) = M(f*(0), f*(2|z|); 1/2)`` on every node.
    vi
        ``Delta f* >= Delta f`` on common nodes, up to the local one-cell
        variation of ``Delta f``.

    ``rel_tol`` scales with the largest finite value and covers rounding.
    """
    alpha = alpha if isinstance(alpha, Alpha) else Alpha(alpha)
    fs = star_rearrangement(f)
    h = f.domain.spacing[0]
    scale = max(f.finite_max, 1e-300)
    eps = rel_tol * scale
    props = {}

    # odd shifts pair nodes half a cell off the continuous optimum, so the
    # grid f* carries steps of one cell's variation
    defect = midpoint_defect(fs, alpha)
    slack_i = _local_variation(fs.values) + eps
    props["i"] = _local_check(defect, slack_i)

    gap = 0.0
    for s in _check_levels(f, levels):
        gap = max(gap, abs(_measure(fs.values, s, h) - _measure(f.values, s, h)))
    props["ii"] = PropertyResult(gap <= h * (1 + 1e-9), gap, h)

    d_int = abs(integrate(fs).value - integrate(f).value)
    props["iii"] = PropertyResult(d_int <= h * scale, d_int, h * scale)

    m = star_margin(f.domain.counts[0])
    tail = fs.values[m:]
    with np.errstate(invalid="ignore"):
        rise = np.diff(tail)
    rise = rise[np.isfinite(rise)]
    worst = float(rise.max()) if rise.size else 0.0
    mono = bool(np.all(tail[1:] <= tail[:-1] + eps))
    props["iv"] = PropertyResult(mono, max(worst, 0.0), eps)

    dfs = difference_function(fs, alpha, "direct")
    ref = _reference_mean(fs, dfs.domain, alpha)
    both_inf = np.isinf(dfs.values) & np.isinf(ref)
    with np.errstate(invalid="ignore"):
        err = np.where(both_inf, 0.0, np.abs(dfs.values - ref))
    err_v = float(np.nanmax(err)) if err.size else 0.0
    tol_v = eps * (1 + 2 ** (-1 / alpha.value) if alpha.is_finite else 2)
    props["v"] = PropertyResult(bool(err_v <= tol_v), err_v, tol_v)

    df = difference_function(f, alpha, "direct")
    k = df.domain.counts[0]
    c = (dfs.domain.counts[0] - k) // 2
    common = dfs.values[c : c + k]
    slack = _local_variation(df.values) + eps
    with np.errstate(invalid="ignore"):
        short = np.where(np.isinf(common), 0.0, df.values - common)
    short = np.where(np.isnan(short), 0.0, short)
    props["vi"] = _local_check(short, slack)

    return RearrangementReport(props)


class RatioChain(NamedTuple):
    """``ratio_f <= ratio_star == 2 * half_line_ratio``."""

    ratio_f: float
    ratio_star: float
    half_line_ratio: float

    def holds(self, tol: float) -> bool:
        return (
            self.ratio_f <= self.ratio_star * (1 + tol)
            and abs(self.ratio_star - 2 * self.half_line_ratio) <= tol * self.ratio_star
        )


def ratio_chain(f: GridFunction, alpha) -> RatioChain:
    """The three quantities in the rearrangement bound for ``f``.

    ``half_line_ratio`` is ``int_0^inf M(f*(0), f*(2x); 1/2) dx / int_0^inf f*``.
    """
    alpha = alpha if isinstance(alpha, Alpha) else Alpha(alpha)
    fs = star_rearrangement(f)
    r_f = integrate(difference_function(f, alpha, "direct")).value / integrate(f).value
    r_s = integrate(difference_function(fs, alpha, "direct")).value / integrate(fs).value
    h = f.domain.spacing[0]
    zero = star_margin(f.domain.counts[0])
    half = fs.values[zero:]
    j = np.arange((half.size + 1) // 2)
    g = mean_alpha_symmetric(half[0], half[2 * j], alpha)
    xdom = BoxDomain((0.0,), (max(j[-1], 1) * h,), (max(j.size, 2),))
    if j.size < 2:
        g = np.concatenate([g, [0.0]])
    num = integrate(GridFunction(xdom, g)).value
    den = integrate(GridFunction(BoxDomain((0.0,), ((half.size - 1) * h,), (half.size,)), half)).value
    return RatioChain(r_f, r_s, num / den)
