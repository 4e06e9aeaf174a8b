"""Discrete conjugation, infimal convolution and difference functions.

Three independent ways of computing the difference function of order alpha
are provided by :func:`difference_function`:

``direct``
    brute-force supremum of the alpha-mean over node pairs;
``conjugate``
    (alpha = 0 or finite) infimal convolution in the convex coordinate
    ``u = -log f`` or ``u = f**alpha``, done with two Legendre transforms;
``levelset``
    (alpha = -inf) superlevel sets of the output are Minkowski averages of
    superlevel sets of the input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.signal import fftconvolve

from . import _kernels
from .bodies import Polytope, difference_body
from .grids import BoxDomain, GridFunction, is_alpha_concave, reflect
from .means import Alpha, alpha_power, alpha_root, mean_alpha_symmetric

__all__ = [
    "ConjugateGrid",
    "legendre",
    "slope_domain",
    "slope_axes",
    "legendre_involution_gap",
    "inf_convolution_brute",
    "difference_domain",
    "delta_v",
    "difference_function",
    "check_alpha_concavity_of_delta",
    "ROUTES",
]

ROUTES = ("direct", "conjugate", "levelset")


@dataclass(frozen=True, eq=False)
class ConjugateGrid:
    """Values ``v*(p) = max_x <p, x> - v(x)`` on a grid of slopes."""

    domain: BoxDomain
    values: np.ndarray


def _conjugate_axis(values: np.ndarray, x: np.ndarray, p: np.ndarray, axis: int) -> np.ndarray:
    moved = np.moveaxis(values, axis, -1)
    lead = moved.shape[:-1]
    lines = np.ascontiguousarray(moved.reshape(-1, moved.shape[-1]))
    out = _kernels.conjugate_lines(x, lines, p)
    return np.moveaxis(out.reshape(lead + (p.size,)), -1, axis)


def _legendre_axes(v: np.ndarray, xaxes, paxes) -> np.ndarray:
    # max over a product set is an iterated max; signs flip between passes
    g = v
    for axis in reversed(range(v.ndim)):
        g = _conjugate_axis(g, xaxes[axis], paxes[axis], axis)
        if axis:
            g = -g
    return g


def legendre(v, domain: BoxDomain, dual: BoxDomain) -> ConjugateGrid:
    """Discrete Legendre-Fenchel transform of node values ``v``.

    ``+inf`` nodes are skipped.  The transform is taken one axis at a time,
    each 1-D pass being the linear-time lower-hull sweep.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != domain.shape:
        raise ValueError("values do not match the domain")
    if dual.ndim != domain.ndim:
        raise ValueError("dual domain has the wrong dimension")
    _check_conjugable(v)
    return ConjugateGrid(dual, _legendre_axes(v, domain.axes, dual.axes))


def _check_conjugable(v: np.ndarray):
    if not np.isfinite(v).any():
        raise ValueError("conjugate of a function that is +inf everywhere")
    if np.isneginf(v).any():
        raise ValueError("conjugate is +inf everywhere when v takes the value -inf")


# cap on the total number of dual nodes used by the conjugate route
DUAL_BUDGET = 2**24


def default_dual_count(domain: BoxDomain) -> int:
    """Slope nodes per axis: four per input node, within :data:`DUAL_BUDGET`."""
    per_axis = int(DUAL_BUDGET ** (1.0 / domain.ndim))
    return min(4 * max(domain.counts), per_axis)


def slope_axes(quotients, bounds, count: int):
    """Symmetric slope axes from per-axis quotient samples.

    A quarter of each axis is a uniform grid over ``[-bound, bound]``, the
    rest quantiles of the (symmetrised) quotients, so nodes are dense where
    slopes actually occur.  With ``count=None`` every quotient is kept, which
    in 1-D makes the conjugate route exact up to the convex envelope.
    """
    axes = []
    for q, s in zip(quotients, bounds):
        m = max(8, len(q)) if count is None else int(count)
        if m < 2:
            raise ValueError("need at least 2 slope nodes per axis")
        parts = [np.linspace(-s, s, max(2, m // 4))]
        q = np.asarray(q, dtype=float)
        q = q[np.abs(q) <= s]
        if q.size:
            q = np.concatenate([q, -q])
            parts.append(q if count is None else np.quantile(q, np.linspace(0.0, 1.0, max(2, m - m // 4))))
        axes.append(np.unique(np.concatenate(parts)))
    return axes


def _axis_quotients(v: np.ndarray, spacing, mask: Optional[np.ndarray] = None):
    """Finite difference quotients along each axis (both nodes in ``mask``)."""
    out = []
    for a, h in enumerate(spacing):
        with np.errstate(invalid="ignore"):
            d = np.diff(v, axis=a) / h
        ok = np.isfinite(d)
        if mask is not None:
            lo = [slice(None)] * v.ndim
            hi = [slice(None)] * v.ndim
            lo[a] = slice(None, -1)
            hi[a] = slice(1, None)
            ok &= mask[tuple(lo)] & mask[tuple(hi)]
        out.append(d[ok])
    return out


def slope_domain(v, domain: BoxDomain, counts=None) -> BoxDomain:
    """Symmetric box of slopes covering every finite difference quotient of ``v``."""
    v = np.asarray(v, dtype=float)
    counts = domain.counts if counts is None else tuple(np.broadcast_to(counts, (domain.ndim,)))
    bounds = []
    for a, h in enumerate(domain.spacing):
        with np.errstate(invalid="ignore"):
            d = np.diff(v, axis=a)
        d = d[np.isfinite(d)]
        s = float(np.abs(d).max()) / h if d.size else 0.0
        bounds.append(s if s > 0 else 1.0)
    return BoxDomain(tuple(-s for s in bounds), tuple(bounds), counts)


def legendre_involution_gap(v, domain: BoxDomain, dual: Optional[BoxDomain] = None) -> float:
    """``max |v** - v|`` over interior nodes where ``v`` is finite."""
    v = np.asarray(v, dtype=float)
    dual = slope_domain(v, domain) if dual is None else dual
    vs = legendre(v, domain, dual)
    vss = _legendre_axes(vs.values, dual.axes, domain.axes)
    inner = tuple(slice(1, -1) for _ in range(domain.ndim))
    fin = np.isfinite(v[inner])
    if not fin.any():
        return 0.0
    return float(np.abs(vss[inner] - v[inner])[fin].max())


def _check_out(out: BoxDomain, ndim: int):
    if out.ndim != ndim:
        raise ValueError("output domain has the wrong dimension")


def inf_convolution_brute(v0, d0: BoxDomain, v1, d1: BoxDomain, out: BoxDomain) -> np.ndarray:
    """Reference infimal convolution ``w(z) = min (v0(x) + v1(y)) / 2``.

    The minimum runs over node pairs with ``|x + y - 2 z| <= h / 2`` per axis
    (``h`` the output spacing).  Nodes with no candidate pair get ``+inf``.
    Cost is the product of the two node counts.
    """
    if not (d0.ndim == d1.ndim):
        raise ValueError("inputs have different dimensions")
    _check_out(out, d0.ndim)
    v0 = np.asarray(v0, dtype=float).ravel()
    v1 = np.asarray(v1, dtype=float).ravel()
    X0 = d0.mesh().reshape(-1, d0.ndim)
    X1 = d1.mesh().reshape(-1, d1.ndim)
    k0 = v0 < np.inf
    k1 = v1 < np.inf
    res = np.full(out.size, np.inf)
    _kernels.pair_min_scan(
        np.ascontiguousarray(X0[k0]), v0[k0], np.ascontiguousarray(X1[k1]), v1[k1],
        np.array(out.lower), np.array(out.spacing), np.array(out.counts, dtype=np.int64), res,
    )
    return res.reshape(out.shape)


def difference_domain(domain: BoxDomain) -> BoxDomain:
    """Centred box realising ``(P + (-P)) / 2`` on the input spacing.

    Output nodes sit at integer multiples of the input spacing, so for every
    input node ``x`` and output node ``z`` the point ``x - 2 z`` is again on
    the input lattice.
    """
    counts, half = [], []
    for h, n in zip(domain.spacing, domain.counts):
        k = math.ceil((n - 1) / 2)
        counts.append(2 * k + 1)
        half.append(k * h)
    return BoxDomain(tuple(-w for w in half), tuple(half), tuple(counts))


def _is_aligned(domain: BoxDomain, out: BoxDomain) -> bool:
    return out == difference_domain(domain)


def delta_v(v, domain: BoxDomain, out: Optional[BoxDomain] = None) -> np.ndarray:
    """``min { (v(x) + v(-y)) / 2 : (x + y) / 2 = z }`` by brute force."""
    out = difference_domain(domain) if out is None else out
    v = np.asarray(v, dtype=float)
    ref = reflect(GridFunction.from_neglog(domain, v)) if np.isfinite(v).any() else None
    if ref is None:
        raise ValueError("v is +inf everywhere")
    return inf_convolution_brute(v, domain, ref.neglog, ref.domain, out)


# -- difference function routes -------------------------------------------------


def _partner_tables(domain: BoxDomain, out: BoxDomain):
    """Per axis: index of the input node within half a cell of ``x_i - 2 z_k`` (or -1)."""
    tables = []
    for a in range(domain.ndim):
        x = domain.axis(a)
        z = out.axis(a)
        h = domain.spacing[a]
        target = x[None, :] - 2.0 * z[:, None]
        j = np.rint((target - domain.lower[a]) / h)
        ok = (j >= 0) & (j < domain.counts[a]) & (np.abs(target - (domain.lower[a] + j * h)) <= 0.5 * h * (1 + 1e-9))
        tables.append(np.where(ok, j, -1).astype(np.int64))
    return tables


def _direct_snapped(f: GridFunction, alpha: Alpha, out: BoxDomain) -> np.ndarray:
    # general output lattice: partners found by snapping x - 2z to a node
    tables = _partner_tables(f.domain, out)
    n = f.ndim
    strides = np.array([int(np.prod(f.domain.shape[a + 1 :])) for a in range(n)])
    flat = f.values.ravel()
    res = np.zeros(out.shape)
    for k in np.ndindex(*out.shape):
        parts = []
        valid = None
        for a in range(n):
            shape = [1] * n
            shape[a] = -1
            row = tables[a][k[a]].reshape(shape)
            parts.append(row)
            valid = row >= 0 if valid is None else valid & (row >= 0)
        valid = np.broadcast_to(valid, f.domain.shape)
        if not valid.any():
            continue
        partner = sum(np.where(p >= 0, p, 0) * s for p, s in zip(parts, strides))
        other = np.where(valid, flat[np.broadcast_to(partner, f.domain.shape)], 0.0)
        res[k] = np.max(mean_alpha_symmetric(f.values, other, alpha))
    return res


_REGIME = {"zero": 0, "finite": 1, "minus_infinity": 2}


def _direct(f: GridFunction, alpha: Alpha, out: BoxDomain) -> np.ndarray:
    if not _is_aligned(f.domain, out):
        return _direct_snapped(f, alpha, out)
    vals = f.values.reshape(f.domain.shape + (1,) * (3 - f.ndim))
    half = np.array([(c - 1) // 2 for c in out.counts] + [0] * (3 - f.ndim), dtype=np.int64)
    a = alpha.value if alpha.is_finite else 0.0
    res = _kernels.difference_sup(np.ascontiguousarray(vals), _REGIME[alpha.regime], a, half)
    return res.reshape(out.shape)


def _support_body(mask: np.ndarray, domain: BoxDomain) -> Optional[Polytope]:
    """Hull of the nodes where ``mask`` holds, from the extreme node of each grid line."""
    axes = domain.axes
    if domain.ndim == 1:
        idx = np.flatnonzero(mask)
        pts = axes[0][[idx[0], idx[-1]]][:, None]
    else:
        hit = mask.any(axis=-1)
        first = np.argmax(mask, axis=-1)
        last = mask.shape[-1] - 1 - np.argmax(mask[..., ::-1], axis=-1)
        lead = np.argwhere(hit)
        pts = []
        for col in (first, last):
            sel = col[hit]
            coords = [axes[a][lead[:, a]] for a in range(domain.ndim - 1)] + [axes[-1][sel]]
            pts.append(np.column_stack(coords))
        pts = np.vstack(pts)
    body = Polytope(pts)
    return body if body.is_full else None


def _pair_mask_fft(mask: np.ndarray) -> np.ndarray:
    """Output nodes z (on the difference lattice) with ``mask[x]`` and ``mask[x - 2z]``."""
    corr = fftconvolve(mask.astype(float), np.flip(mask.astype(float)), mode="full")
    out = corr > 0.5
    sl = []
    pad = []
    for n in mask.shape:
        k = math.ceil((n - 1) / 2)
        start = n - 1 - 2 * k  # -1 when n is even
        pad.append((1, 1))
        sl.append(slice(start + 1, start + 1 + 4 * k + 1, 2))
    return np.pad(out, pad)[tuple(sl)]


def _difference_support(finite: np.ndarray, domain: BoxDomain, out: BoxDomain) -> np.ndarray:
    body = _support_body(finite, domain)
    if body is None:
        return _pair_mask_fft(finite)
    half = Polytope(0.5 * difference_body(body).vertices)
    h = min(domain.spacing)
    return half.contains(out.mesh(), tol=1e-9 * max(1.0, 1.0 / h))


def _inf_conv_via_conjugates(u, ref, dom, rdom, out, paxes):
    us = _legendre_axes(u, dom.axes, paxes)
    rs = _legendre_axes(ref, rdom.axes, paxes)
    return _legendre_axes(0.5 * (us + rs), paxes, out.axes)


def _conjugate(f: GridFunction, alpha: Alpha, out: BoxDomain, dual_count=None) -> np.ndarray:
    u = alpha_power(f.values, alpha)
    if np.isneginf(u).any():
        raise ValueError("conjugate route cannot handle infinite values at alpha = 0")
    if not np.isfinite(u).any():
        raise ValueError("no finite transformed values")
    ref = np.flip(u, axis=tuple(range(f.ndim)))
    rdom = f.domain.reflected()
    support = _difference_support(np.isfinite(u), f.domain, out)
    if dual_count is None and f.ndim > 1:
        dual_count = default_dual_count(f.domain)
    qu = _axis_quotients(u, f.domain.spacing)
    bounds = [float(np.abs(q).max()) if q.size and np.abs(q).max() > 0 else 1.0 for q in qu]
    # Slopes of the result can exceed those of u where the minimiser sits on
    # the support boundary; a capped slope range shows up as saturated
    # quotients in the output, so widen until it does not.
    for _ in range(16):
        du = _inf_conv_via_conjugates(u, ref, f.domain, rdom, out, slope_axes(qu, bounds, dual_count))
        qw = _axis_quotients(du, out.spacing, support)
        peak = [float(np.abs(q).max()) if q.size else 0.0 for q in qw]
        if all(p < 0.95 * b for p, b in zip(peak, bounds)):
            break
        bounds = [2 * b if p >= 0.95 * b else b for p, b in zip(peak, bounds)]
    # second pass with slope nodes placed at the quotients of the first result
    merged = [np.concatenate([a, b]) for a, b in zip(qu, qw)]
    du = _inf_conv_via_conjugates(u, ref, f.domain, rdom, out, slope_axes(merged, bounds, dual_count))
    du = np.where(support, du, np.inf)
    return alpha_root(du, alpha)


def default_levels(top: float, count: int = 64, floor: float = 1e-6) -> np.ndarray:
    """Geometric levels from ``top`` down to ``top * floor`` (``count`` of them)."""
    return top * np.geomspace(1.0, floor, count)


def _levelset(f: GridFunction, levels=None) -> np.ndarray:
    vals = f.values
    if levels is None:
        levels = default_levels(f.finite_max) if f.finite_max > 0 else np.array([])
        if np.isinf(vals).any():
            levels = np.concatenate([[np.inf], levels])
    levels = np.asarray(levels, dtype=float)
    res = np.zeros(difference_domain(f.domain).shape)
    prev_set = None
    prev_mask = None
    # superlevel sets only shrink as s rises, so consecutive levels often share one
    for s in np.sort(levels):
        cur = vals >= s
        if not cur.any():
            continue
        if prev_set is not None and np.array_equal(cur, prev_set):
            mask = prev_mask
        else:
            mask = _pair_mask_fft(cur)
        res = np.where(mask, np.maximum(res, s), res)
        prev_set, prev_mask = cur, mask
    return res


def difference_function(
    f: GridFunction,
    alpha,
    route: str = "direct",
    out: Optional[BoxDomain] = None,
    *,
    levels: Optional[Sequence[float]] = None,
    dual_count: Optional[int] = None,
) -> GridFunction:
    """Difference function of order ``alpha`` on ``difference_domain(f.domain)``.

    ``out`` may override the output lattice for the ``direct`` route only;
    the other two routes need the aligned lattice.  ``levels`` (levelset)
    and ``dual_count`` (conjugate) tune the respective discretisations.
    """
    alpha = alpha if isinstance(alpha, Alpha) else Alpha(alpha)
    if route not in ROUTES:
        raise ValueError(f"unknown route {route!r}; expected one of {ROUTES}")
    if route == "levelset" and not alpha.is_minus_infinity:
        raise ValueError("levelset route is only defined for alpha = -inf")
    if route == "conjugate" and alpha.is_minus_infinity:
        raise ValueError("conjugate route needs alpha = 0 or finite alpha")
    aligned = difference_domain(f.domain)
    if out is None:
        out = aligned
    _check_out(out, f.ndim)
    if route != "direct" and out != aligned:
        raise ValueError(f"{route} route only evaluates on the aligned difference lattice")

    if route == "direct":
        vals = _direct(f, alpha, out)
    elif route == "conjugate":
        vals = _conjugate(f, alpha, out, dual_count)
    else:
        vals = _levelset(f, levels)
    return GridFunction(out, vals)


def check_alpha_concavity_of_delta(
    f: GridFunction, alpha, route: str = "direct", tol: float = 1e-9, max_radius: Optional[int] = None
) -> bool:
    """Is the (grid) difference function of order ``alpha`` again alpha-concave?"""
    d = difference_function(f, alpha, route)
    return is_alpha_concave(d, alpha, tol, max_radius).ok
