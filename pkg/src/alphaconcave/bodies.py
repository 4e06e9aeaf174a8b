"""Convex polytopes in dimensions 1-3.

Bodies are stored by their extreme points only.  Hulls are monotone chain in
the plane and qhull in space; intersections go through halfspace clipping so
that every volume stays exact up to rounding.
"""

from __future__ import annotations

import math
from typing import Tuple

import numpy as np
from scipy.spatial import ConvexHull

__all__ = [
    "Polytope",
    "convex_hull",
    "minkowski_sum",
    "difference_body",
    "reflect_body",
    "volume",
    "support_function",
    "polar",
    "hull_union_reflection",
    "clip",
    "intersect",
    "polar_identity_check",
    "hull_duality_check",
    "vertex_set_distance",
]

_EPS = 1e-12


def _scale(points: np.ndarray) -> float:
    return max(1.0, float(np.abs(points).max(initial=0.0)))


def _affine_basis(points: np.ndarray):
    """Centroid, orthonormal basis of the affine span, and its rank."""
    c = points.mean(axis=0)
    if len(points) == 1:
        return c, np.zeros((0, points.shape[1])), 0
    _, s, vt = np.linalg.svd(points - c, full_matrices=False)
    rank = int((s > 1e-10 * _scale(points)).sum())
    return c, vt[:rank], rank


def _monotone_chain(pts: np.ndarray) -> np.ndarray:
    """Counter-clockwise extreme points, starting at the lexicographic minimum."""
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    p = pts[order]
    tol = _EPS * _scale(pts) ** 2

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for q in p:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], q) <= tol:
            lower.pop()
        lower.append(q)
    for q in p[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], q) <= tol:
            upper.pop()
        upper.append(q)
    return np.array(lower[:-1] + upper[:-1])


def _hull_vertices(points: np.ndarray) -> Tuple[np.ndarray, int]:
    c, basis, rank = _affine_basis(points)
    n = points.shape[1]
    if rank < n:
        if rank == 0:
            return points[:1].copy(), 0
        local = (points - c) @ basis.T
        verts, _ = _hull_vertices(local)
        return verts @ basis + c, rank
    if n == 1:
        return np.array([[points[:, 0].min()], [points[:, 0].max()]]), 1
    if n == 2:
        return _monotone_chain(points), 2
    hull = ConvexHull(points)
    verts = points[np.sort(hull.vertices)]
    return verts[np.lexsort(verts.T[::-1])], 3


class Polytope:
    """Convex hull of finitely many points in R^n, n in {1, 2, 3}.

    ``vertices`` holds extreme points only.  In the plane they are in
    counter-clockwise order; in space they are sorted lexicographically.
    ``rank`` is the dimension of the affine hull.
    """

    def __init__(self, points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError("need at least one point")
        if not 1 <= pts.shape[1] <= 3:
            raise ValueError(f"dimension must be 1, 2 or 3, got {pts.shape[1]}")
        if not np.isfinite(pts).all():
            raise ValueError("points must be finite")
        verts, rank = _hull_vertices(pts)
        verts.setflags(write=False)
        self.vertices = verts
        self.rank = rank

    @property
    def ndim(self) -> int:
        return self.vertices.shape[1]

    @property
    def is_full(self) -> bool:
        return self.rank == self.ndim

    def __repr__(self) -> str:
        return f"Polytope(ndim={self.ndim}, nvertices={len(self.vertices)})"

    def support(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return (u @ self.vertices.T).max(axis=-1)

    def facets(self) -> Tuple[np.ndarray, np.ndarray]:
        """Unit outer normals ``N`` and offsets ``c`` with ``P = {x : N x <= c}``."""
        self._require_full("facets")
        V = self.vertices
        if self.ndim == 1:
            N = np.array([[-1.0], [1.0]])
            return N, np.array([-V[0, 0], V[1, 0]])
        if self.ndim == 2:
            E = np.roll(V, -1, axis=0) - V
            N = np.column_stack([E[:, 1], -E[:, 0]])
            N /= np.linalg.norm(N, axis=1)[:, None]
            return N, (N * V).sum(axis=1)
        eq = ConvexHull(V).equations
        normals, offsets = [], []
        for row in eq:
            nrm, off = row[:3], -row[3]
            if any(np.abs(nrm - m).max() < 1e-9 and abs(off - o) < 1e-9 * _scale(V) for m, o in zip(normals, offsets)):
                continue
            normals.append(nrm)
            offsets.append(off)
        return np.array(normals), np.array(offsets)

    def contains(self, pts, tol: float = 1e-9) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        self._require_full("contains")
        N, c = self.facets()
        return (pts @ N.T <= c + tol * np.maximum(1.0, np.abs(c))).all(axis=-1)

    def _require_full(self, what: str):
        if not self.is_full:
            raise ValueError(f"{what} needs a full-dimensional body (affine rank {self.rank} < {self.ndim})")

    def to_text(self) -> str:
        return "".join(" ".join(repr(float(x)) for x in v) + "\n" for v in self.vertices)

    @classmethod
    def from_text(cls, text: str) -> "Polytope":
        rows = [r.split() for r in text.splitlines() if r.strip() and not r.lstrip().startswith("#")]
        dims = {len(r) for r in rows}
        if len(dims) != 1:
            raise ValueError("inconsistent coordinate counts in polytope table")
        return cls(np.array(rows, dtype=float))


def convex_hull(points) -> Polytope:
    return Polytope(points)


def _same_dim(P: Polytope, Q: Polytope):
    if P.ndim != Q.ndim:
        raise ValueError(f"dimension mismatch: {P.ndim} vs {Q.ndim}")


def minkowski_sum(P: Polytope, Q: Polytope) -> Polytope:
    _same_dim(P, Q)
    sums = (P.vertices[:, None, :] + Q.vertices[None, :, :]).reshape(-1, P.ndim)
    return Polytope(sums)


def reflect_body(P: Polytope, x=None) -> Polytope:
    """``x - P``; the origin when ``x`` is omitted."""
    x = np.zeros(P.ndim) if x is None else np.asarray(x, dtype=float)
    return Polytope(x - P.vertices)


def difference_body(P: Polytope) -> Polytope:
    return minkowski_sum(P, reflect_body(P))


def volume(P: Polytope) -> float:
    """Exact ``n``-volume; 0 for bodies that are not full-dimensional."""
    if not P.is_full:
        return 0.0
    V = P.vertices
    if P.ndim == 1:
        return float(V[1, 0] - V[0, 0])
    if P.ndim == 2:
        x, y = V[:, 0], V[:, 1]
        return float(0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))
    hull = ConvexHull(V)
    c = V.mean(axis=0)
    tri = V[hull.simplices] - c
    return float(np.abs(np.linalg.det(tri)).sum() / 6.0)


def support_function(P: Polytope, u) -> np.ndarray:
    return P.support(u)


def polar(P: Polytope, tol: float = 1e-12) -> Polytope:
    """Polar body with respect to the origin, which must be interior."""
    P._require_full("polar")
    N, c = P.facets()
    if (c <= tol * _scale(P.vertices)).any():
        raise ValueError("origin is not an interior point")
    return Polytope(N / c[:, None])


def hull_union_reflection(P: Polytope, x) -> Polytope:
    """``co(P u (x - P))``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (P.ndim,):
        raise ValueError("reflection point has the wrong dimension")
    return Polytope(np.vstack([P.vertices, x - P.vertices]))


def _box(lo, hi) -> np.ndarray:
    corners = np.array(np.meshgrid(*[[a, b] for a, b in zip(lo, hi)], indexing="ij"))
    return corners.reshape(len(lo), -1).T


def clip(points: np.ndarray, normal, offset: float):
    """Extreme points of ``conv(points) n {x : <normal, x> <= offset}``.

    Returns ``None`` when the intersection is empty.
    """
    V = Polytope(points)
    normal = np.asarray(normal, dtype=float)
    s = V.vertices @ normal - offset
    tol = 1e-12 * _scale(V.vertices)
    if (s <= tol).all():
        return V.vertices
    if (s > tol).all():
        return None
    inside = V.vertices[s <= tol]
    if V.rank <= 1 or V.ndim == 1:
        edges = [(i, j) for i in range(len(s)) for j in range(i + 1, len(s))]
    elif V.ndim == 2 and V.rank == 2:
        k = len(s)
        edges = [(i, (i + 1) % k) for i in range(k)]
    else:
        if V.rank == 3:
            simp = ConvexHull(V.vertices).simplices
            edges = {tuple(sorted((t[a], t[b]))) for t in simp for a, b in ((0, 1), (1, 2), (0, 2))}
        else:
            edges = [(i, j) for i in range(len(s)) for j in range(i + 1, len(s))]
    cuts = []
    for i, j in edges:
        if (s[i] < -tol and s[j] > tol) or (s[i] > tol and s[j] < -tol):
            lam = s[i] / (s[i] - s[j])
            cuts.append(V.vertices[i] + lam * (V.vertices[j] - V.vertices[i]))
    pts = np.vstack([inside] + ([np.array(cuts)] if cuts else []))
    return Polytope(pts).vertices


def halfspace_body(normals, offsets, lower, upper) -> Polytope:
    """Intersection of halfspaces, clipped from the box ``[lower, upper]``."""
    pts = _box(lower, upper)
    for nrm, off in zip(normals, offsets):
        pts = clip(pts, nrm, off)
        if pts is None:
            raise ValueError("empty intersection")
    return Polytope(pts)


def intersect(P: Polytope, Q: Polytope) -> Polytope:
    _same_dim(P, Q)
    NP, cP = P.facets()
    NQ, cQ = Q.facets()
    lo = np.minimum(P.vertices.min(axis=0), Q.vertices.min(axis=0)) - 1.0
    hi = np.maximum(P.vertices.max(axis=0), Q.vertices.max(axis=0)) + 1.0
    return halfspace_body(np.vstack([NP, NQ]), np.concatenate([cP, cQ]), lo, hi)


def vertex_set_distance(A: Polytope, B: Polytope) -> float:
    """Hausdorff distance between vertex sets (``inf`` if the counts differ)."""
    if len(A.vertices) != len(B.vertices):
        return math.inf
    d = np.linalg.norm(A.vertices[:, None, :] - B.vertices[None, :, :], axis=-1)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def hull_duality_check(P: Polytope, tol: float = 1e-9) -> bool:
    """Compare ``(P n -P)*`` with ``co(P* u -P*)`` vertex by vertex."""
    lhs = polar(intersect(P, reflect_body(P)))
    Ps = polar(P)
    rhs = Polytope(np.vstack([Ps.vertices, -Ps.vertices]))
    return vertex_set_distance(lhs, rhs) <= tol * _scale(rhs.vertices)


def polar_identity_check(P: Polytope, half_width: float, nodes: int) -> float:
    """Ratio of the grid integral of ``exp(-h_P)`` to ``n! V(P*)``."""
    from .grids import BoxDomain, SupportExp, sample
    from .integration import integrate

    dom = BoxDomain.centered(half_width, nodes, P.ndim)
    f = sample(SupportExp(P), dom)
    return integrate(f).value / (math.factorial(P.ndim) * volume(polar(P)))
