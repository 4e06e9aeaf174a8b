"""Tensor-grid functions on boxes in R^n (n <= 3) and closed-form families.

A :class:`GridFunction` stores node values ``f`` in [0, +inf] together with
``v = -log f`` computed once at construction.  Everything downstream reads
these two arrays; neither is ever mutated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .bodies import Polytope
from .means import Alpha, mean_alpha_symmetric

__all__ = [
    "BoxDomain",
    "GridFunction",
    "OrthantExp",
    "AbsExp",
    "Gaussian",
    "SimplexIndicator",
    "PolytopeIndicator",
    "OneDExtremalA",
    "OneDExtremalB",
    "SupportExp",
    "AffineImage",
    "sample",
    "reflect",
    "sup_value",
    "is_alpha_concave",
    "ConcavityCheck",
    "midpoint_defect",
    "tail_estimate",
]

# closed supports are tested with this slack so that nodes computed in
# floating point still land on boundaries they sit on exactly
SUPPORT_TOL = 1e-9


@dataclass(frozen=True)
class BoxDomain:
    """Axis-aligned box with a uniform node lattice on each axis."""

    lower: Tuple[float, ...]
    upper: Tuple[float, ...]
    counts: Tuple[int, ...]

    def __post_init__(self):
        lo = tuple(float(x) for x in np.atleast_1d(self.lower))
        hi = tuple(float(x) for x in np.atleast_1d(self.upper))
        cn = tuple(int(c) for c in np.atleast_1d(self.counts))
        if not (len(lo) == len(hi) == len(cn)):
            raise ValueError("lower, upper and counts must have the same length")
        if not 1 <= len(lo) <= 3:
            raise ValueError(f"dimension must be 1, 2 or 3, got {len(lo)}")
        for a, b, c in zip(lo, hi, cn):
            if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
                raise ValueError(f"bad axis bounds [{a}, {b}]")
            if c < 2:
                raise ValueError(f"need at least 2 nodes per axis, got {c}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        object.__setattr__(self, "counts", cn)

    @classmethod
    def cube(cls, lower: float, upper: float, count: int, ndim: int) -> "BoxDomain":
        return cls((lower,) * ndim, (upper,) * ndim, (count,) * ndim)

    @classmethod
    def centered(cls, half_width, count, ndim: int = 1) -> "BoxDomain":
        hw = np.broadcast_to(np.asarray(half_width, dtype=float), (ndim,))
        cn = np.broadcast_to(np.asarray(count, dtype=int), (ndim,))
        return cls(tuple(-hw), tuple(hw), tuple(cn))

    @property
    def ndim(self) -> int:
        return len(self.counts)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.counts

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    @property
    def spacing(self) -> Tuple[float, ...]:
        return tuple((b - a) / (c - 1) for a, b, c in zip(self.lower, self.upper, self.counts))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def volume(self) -> float:
        return float(np.prod([b - a for a, b in zip(self.lower, self.upper)]))

    def axis(self, i: int) -> np.ndarray:
        return np.linspace(self.lower[i], self.upper[i], self.counts[i])

    @property
    def axes(self) -> Tuple[np.ndarray, ...]:
        return tuple(self.axis(i) for i in range(self.ndim))

    def mesh(self) -> np.ndarray:
        """Node coordinates, shape ``counts + (ndim,)``."""
        return np.stack(np.meshgrid(*self.axes, indexing="ij"), axis=-1)

    def node(self, index) -> np.ndarray:
        return np.array([self.lower[a] + i * self.spacing[a] for a, i in enumerate(index)])

    def reflected(self) -> "BoxDomain":
        return BoxDomain(tuple(-b for b in self.upper), tuple(-a for a in self.lower), self.counts)

    def describe(self) -> dict:
        return {"lower": list(self.lower), "upper": list(self.upper), "counts": list(self.counts)}


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Node values of a function ``R^n -> [0, +inf]`` on a :class:`BoxDomain`.

    ``neglog`` holds ``v = -log f`` (``+inf`` where ``f = 0``, ``-inf`` where
    ``f = +inf``).  Both arrays are read-only.
    """

    domain: BoxDomain
    values: np.ndarray
    neglog: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != self.domain.shape:
            raise ValueError(f"values have shape {vals.shape}, domain expects {self.domain.shape}")
        if np.isnan(vals).any() or (vals < 0).any():
            raise ValueError("grid values must lie in [0, +inf]")
        if not (vals > 0).any():
            raise ValueError("grid function has empty support")
        if self.neglog is None:
            with np.errstate(divide="ignore"):
                neg = -np.log(vals)
        else:
            neg = np.array(self.neglog, dtype=float)
        vals.setflags(write=False)
        neg.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "neglog", neg)

    @classmethod
    def from_neglog(cls, domain: BoxDomain, v) -> "GridFunction":
        v = np.array(v, dtype=float)
        if np.isnan(v).any():
            raise ValueError("log-values cannot be NaN")
        return cls(domain, np.exp(-v), v)

    @property
    def ndim(self) -> int:
        return self.domain.ndim

    @property
    def infinite_nodes(self) -> int:
        return int(np.isinf(self.values).sum())

    @property
    def finite_max(self) -> float:
        finite = self.values[np.isfinite(self.values)]
        return float(finite.max()) if finite.size else 0.0

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.domain, values)

    def scaled(self, c: float) -> "GridFunction":
        return GridFunction(self.domain, c * self.values)

    # -- text serialisation -------------------------------------------------
    def to_text(self) -> str:
        """Header ``# gridfunction ndim=N``, one ``lower upper count`` line per
        axis, then node values in C order, one per line."""
        lines = [f"# gridfunction ndim={self.ndim}"]
        for a, b, c in zip(self.domain.lower, self.domain.upper, self.domain.counts):
            lines.append(f"{a!r} {b!r} {c}")
        lines.extend(repr(float(x)) for x in self.values.ravel())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "GridFunction":
        rows = [r for r in text.splitlines() if r.strip()]
        head = rows[0].split()
        if head[:2] != ["#", "gridfunction"] or not head[2].startswith("ndim="):
            raise ValueError("not a gridfunction table")
        n = int(head[2][5:])
        lo, hi, cn = [], [], []
        for r in rows[1 : 1 + n]:
            a, b, c = r.split()
            lo.append(float(a))
            hi.append(float(b))
            cn.append(int(c))
        dom = BoxDomain(tuple(lo), tuple(hi), tuple(cn))
        vals = np.array([float(r) for r in rows[1 + n :]], dtype=float)
        return cls(dom, vals.reshape(dom.shape))


# -- closed-form families ------------------------------------------------------


class _Family:
    ndim: int

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if pts.shape[-1] != self.ndim:
            raise ValueError(f"{type(self).__name__} is {self.ndim}-dimensional, got points of dim {pts.shape[-1]}")
        return self.evaluate(pts)

    def evaluate(self, pts: np.ndarray) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError


@dataclass(frozen=True)
class OrthantExp(_Family):
    """``exp(-(x_1 + ... + x_n))`` on the closed positive orthant, 0 elsewhere."""

    ndim: int = 1

    def evaluate(self, pts):
        inside = (pts >= -SUPPORT_TOL).all(axis=-1)
        with np.errstate(over="ignore"):
            return np.where(inside, np.exp(-pts.sum(axis=-1)), 0.0)


@dataclass(frozen=True)
class AbsExp(_Family):
    """``exp(-(|x_1| + ... + |x_n|))``."""

    ndim: int = 1

    def evaluate(self, pts):
        return np.exp(-np.abs(pts).sum(axis=-1))


@dataclass(frozen=True)
class Gaussian(_Family):
    """Isotropic ``exp(-|x - center|^2 / (2 width^2))``."""

    center: Tuple[float, ...] = (0.0,)
    width: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in np.atleast_1d(self.center)))
        if not self.width > 0:
            raise ValueError("width must be positive")

    @property
    def ndim(self) -> int:
        return len(self.center)

    def evaluate(self, pts):
        d = pts - np.asarray(self.center)
        return np.exp(-(d * d).sum(axis=-1) / (2.0 * self.width**2))


@dataclass(frozen=True, eq=False)
class PolytopeIndicator(_Family):
    """Indicator of a closed full-dimensional polytope."""

    body: Polytope

    @property
    def ndim(self) -> int:
        return self.body.ndim

    def evaluate(self, pts):
        return self.body.contains(pts, tol=SUPPORT_TOL).astype(float)


class SimplexIndicator(PolytopeIndicator):
    """Indicator of the closed simplex spanned by ``n + 1`` vertices."""

    def __init__(self, vertices):
        verts = np.atleast_2d(np.asarray(vertices, dtype=float))
        n = verts.shape[1]
        if verts.shape[0] != n + 1:
            raise ValueError(f"a simplex in R^{n} needs {n + 1} vertices")
        if abs(np.linalg.det(verts[1:] - verts[0])) < 1e-12:
            raise ValueError("simplex vertices are affinely dependent")
        object.__setattr__(self, "body", Polytope(verts))

    @classmethod
    def unit(cls, ndim: int) -> "SimplexIndicator":
        return cls(np.vstack([np.zeros(ndim), np.eye(ndim)]))


@dataclass(frozen=True)
class OneDExtremalA(_Family):
    """``(1 + x)**(1/alpha)`` on ``x >= 0``; needs ``-1 < alpha < 0``."""

    alpha: float = -0.5
    ndim: int = field(default=1, init=False)

    def __post_init__(self):
        if not -1 < self.alpha < 0:
            raise ValueError("OneDExtremalA requires alpha in (-1, 0)")

    def evaluate(self, pts):
        x = pts[..., 0]
        with np.errstate(invalid="ignore"):
            return np.where(x >= -SUPPORT_TOL, np.power(1.0 + np.maximum(x, 0.0), 1.0 / self.alpha), 0.0)


@dataclass(frozen=True)
class OneDExtremalB(_Family):
    """``x**(1/alpha)`` on ``(0, 1)``, ``+inf`` at 0, 0 elsewhere; needs ``alpha <= -1``."""

    alpha: float = -2.0
    ndim: int = field(default=1, init=False)

    def __post_init__(self):
        if not (-math.inf < self.alpha <= -1):
            raise ValueError("OneDExtremalB requires finite alpha <= -1")

    def evaluate(self, pts):
        x = pts[..., 0]
        at0 = np.abs(x) <= SUPPORT_TOL
        inside = (x > SUPPORT_TOL) & (x < 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            body = np.power(np.where(inside, x, 1.0), 1.0 / self.alpha)
        return np.where(at0, np.inf, np.where(inside, body, 0.0))


@dataclass(frozen=True, eq=False)
class SupportExp(_Family):
    """``exp(-h_K(x))`` for a polytope ``K``."""

    body: Polytope

    @property
    def ndim(self) -> int:
        return self.body.ndim

    def evaluate(self, pts):
        return np.exp(-self.body.support(pts))


@dataclass(frozen=True, eq=False)
class AffineImage(_Family):
    """``scale * inner(A x + shift)``."""

    inner: _Family
    matrix: np.ndarray
    shift: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        x0 = np.atleast_1d(np.asarray(self.shift, dtype=float))
        n = self.inner.ndim
        if A.shape != (n, n) or x0.shape != (n,):
            raise ValueError("matrix/shift do not match the inner family's dimension")
        if abs(np.linalg.det(A)) <= 1e-12:
            raise ValueError("affine image needs a non-singular matrix")
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        object.__setattr__(self, "matrix", A)
        object.__setattr__(self, "shift", x0)

    @property
    def ndim(self) -> int:
        return self.inner.ndim

    def evaluate(self, pts):
        return self.scale * self.inner(pts @ self.matrix.T + self.shift)


def sample(family: _Family, domain: BoxDomain) -> GridFunction:
    """Evaluate ``family`` at every node of ``domain``."""
    if family.ndim != domain.ndim:
        raise ValueError(f"family is {family.ndim}-dimensional, domain is {domain.ndim}-dimensional")
    return GridFunction(domain, family(domain.mesh()))


# -- elementary operations ------------------------------------------------------


def reflect(f: GridFunction) -> GridFunction:
    """``x -> f(-x)`` on the reflected box."""
    flipped = np.flip(f.values, axis=tuple(range(f.ndim)))
    neg = np.flip(f.neglog, axis=tuple(range(f.ndim)))
    return GridFunction(f.domain.reflected(), flipped, neg)


def sup_value(f: GridFunction) -> Tuple[float, Tuple[int, ...]]:
    """Largest node value and the lexicographically first node attaining it."""
    flat = int(np.argmax(f.values))
    idx = tuple(int(i) for i in np.unravel_index(flat, f.domain.shape))
    return float(f.values[idx]), idx


class ConcavityCheck(NamedTuple):
    ok: bool
    violation: Optional[Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]]]


def _offsets(shape, max_radius):
    ranges = []
    for n in shape:
        r = (n - 1) // 2 if max_radius is None else min((n - 1) // 2, max_radius)
        ranges.append(range(-r, r + 1))
    for d in np.ndindex(*[len(r) for r in ranges]):
        off = tuple(rg[i] for rg, i in zip(ranges, d))
        # one representative per {d, -d}; d = 0 is trivial
        nz = [o for o in off if o != 0]
        if nz and nz[0] > 0:
            yield off


def is_alpha_concave(
    f: GridFunction, alpha, tol: float = 0.0, max_radius: Optional[int] = None
) -> ConcavityCheck:
    """Midpoint test ``f(m) >= M_alpha(f(m - d), f(m + d); 1/2) - tol * scale``.

    Every pair of nodes whose midpoint is a node is visited unless
    ``max_radius`` bounds the half-offset ``|d|`` (in index units, per axis).
    ``scale`` is the largest finite node value.  Returns the first violating
    ``(x, m, y)`` index triple, scanning offsets in lexicographic order.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    alpha = alpha if isinstance(alpha, Alpha) else Alpha(alpha)
    vals = f.values
    slack = tol * f.finite_max
    shape = f.domain.shape
    for d in _offsets(shape, max_radius):
        mid_sl, lo_sl, hi_sl = [], [], []
        for n, o in zip(shape, d):
            a = abs(o)
            mid_sl.append(slice(a, n - a))
            lo_sl.append(slice(a - o, n - a - o))
            hi_sl.append(slice(a + o, n - a + o))
        mid = vals[tuple(mid_sl)]
        m = mean_alpha_symmetric(vals[tuple(lo_sl)], vals[tuple(hi_sl)], alpha)
        with np.errstate(invalid="ignore"):
            bad = mid < m - slack
        if bad.any():
            k = np.unravel_index(int(np.argmax(bad)), bad.shape)
            mi = tuple(int(k[a] + mid_sl[a].start) for a in range(len(shape)))
            x = tuple(mi[a] - d[a] for a in range(len(shape)))
            y = tuple(mi[a] + d[a] for a in range(len(shape)))
            return ConcavityCheck(False, (x, mi, y))
    return ConcavityCheck(True, None)


def midpoint_defect(f: GridFunction, alpha, max_radius: Optional[int] = None) -> np.ndarray:
    """Per node ``m``, the largest ``M_alpha(f(m - d), f(m + d); 1/2) - f(m)`` (at least 0)."""
    alpha = alpha if isinstance(alpha, Alpha) else Alpha(alpha)
    vals = f.values
    shape = f.domain.shape
    out = np.zeros(shape)
    for d in _offsets(shape, max_radius):
        mid_sl, lo_sl, hi_sl = [], [], []
        for n, o in zip(shape, d):
            a = abs(o)
            mid_sl.append(slice(a, n - a))
            lo_sl.append(slice(a - o, n - a - o))
            hi_sl.append(slice(a + o, n - a + o))
        mid = vals[tuple(mid_sl)]
        m = mean_alpha_symmetric(vals[tuple(lo_sl)], vals[tuple(hi_sl)], alpha)
        with np.errstate(invalid="ignore"):
            gap = np.where(np.isinf(mid), 0.0, m - mid)
        view = out[tuple(mid_sl)]
        np.maximum(view, gap, out=view)
    return out


def tail_estimate(f: GridFunction) -> float:
    """Heuristic mass of ``f`` outside its box.

    Each face contributes (face integral of the boundary layer) times an
    exponential decay length fitted from the boundary layer and the layer just
    inside it.  ``inf`` flags a face where ``f`` is not decaying outward.
    """
    vals = np.where(np.isfinite(f.values), f.values, 0.0)
    h = f.domain.spacing
    total = 0.0
    for ax in range(f.ndim):
        if f.domain.counts[ax] < 3:
            continue
        face_area = f.domain.cell_volume / h[ax]
        for edge, inner in ((0, 1), (-1, -2)):
            fb = np.take(vals, edge, axis=ax).sum() * face_area
            fi = np.take(vals, inner, axis=ax).sum() * face_area
            if fb == 0:
                continue
            if fi <= fb:
                return math.inf
            total += fb * h[ax] / math.log(fi / fb)
    return float(total)
