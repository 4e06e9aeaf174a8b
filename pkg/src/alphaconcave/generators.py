"""Seeded random instances.

All randomness flows through :func:`make_rng`, a NumPy ``Generator`` on the
Philox 4x64 counter-based bit generator, so a seed reproduces the same
instance on every platform NumPy supports.

Coefficient ranges:

* affine pieces ``a . x + b``: ``a`` uniform in ``[-1, 1]^n``, ``b`` uniform in ``[-1, 1]``;
* quadratic ``(x - c)^T Q (x - c) / 2``: ``c`` uniform in ``[-1, 1]^n``,
  ``Q = L L^T + lam I`` with ``L`` uniform in ``[-1/2, 1/2]`` and ``lam`` uniform in ``[0.2, 1]``;
* alpha-concave offset ``c0`` uniform in ``[0.5, 1.5]``.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Optional

import numpy as np

from .bodies import Polytope
from .grids import BoxDomain, GridFunction, PolytopeIndicator, sample
from .means import Alpha

__all__ = [
    "make_rng",
    "default_domain",
    "generate_random_logconcave",
    "generate_random_alpha_concave",
    "generate_random_quasiconcave",
    "generate_random_polytope",
    "generate_random_affine",
    "AffineMap",
]

DEFAULT_NODES = {1: 257, 2: 65, 3: 33}
DEFAULT_HALF_WIDTH = 8.0


def make_rng(seed: int) -> np.random.Generator:
    """``Generator(Philox(seed))``."""
    if seed < 0:
        raise ValueError("seed must be non-negative")
    return np.random.Generator(np.random.Philox(int(seed)))


def default_domain(n: int, nodes: Optional[int] = None, half_width: float = DEFAULT_HALF_WIDTH) -> BoxDomain:
    return BoxDomain.centered(half_width, DEFAULT_NODES[n] if nodes is None else nodes, n)


class _Convex(NamedTuple):
    slopes: np.ndarray  # (k, n)
    offsets: np.ndarray  # (k,)
    center: np.ndarray
    hessian: np.ndarray

    def pieces(self, x: np.ndarray) -> np.ndarray:
        return (x @ self.slopes.T + self.offsets).max(axis=-1)

    def quadratic(self, x: np.ndarray) -> np.ndarray:
        d = x - self.center
        return 0.5 * np.einsum("...i,ij,...j->...", d, self.hessian, d)


def _random_convex(rng: np.random.Generator, n: int, k: int, quadratic: bool) -> _Convex:
    if k < 1:
        raise ValueError("need at least one affine piece")
    slopes = rng.uniform(-1.0, 1.0, size=(k, n))
    offsets = rng.uniform(-1.0, 1.0, size=k)
    center = rng.uniform(-1.0, 1.0, size=n)
    L = rng.uniform(-0.5, 0.5, size=(n, n))
    lam = rng.uniform(0.2, 1.0)
    Q = L @ L.T + lam * np.eye(n) if quadratic else np.zeros((n, n))
    return _Convex(slopes, offsets, center, Q)


def generate_random_logconcave(
    seed: int, n: int, k: int, domain: Optional[BoxDomain] = None, quadratic: bool = True
) -> GridFunction:
    """``f = exp(-v)`` with ``v`` = max of ``k`` affine pieces + positive-definite quadratic."""
    domain = default_domain(n) if domain is None else domain
    if domain.ndim != n:
        raise ValueError("domain dimension differs from n")
    conv = _random_convex(make_rng(seed), n, k, quadratic)
    x = domain.mesh()
    v = conv.pieces(x) + conv.quadratic(x)
    return GridFunction.from_neglog(domain, v)


def generate_random_alpha_concave(
    seed: int, n: int, k: int, alpha, domain: Optional[BoxDomain] = None
) -> GridFunction:
    """``f = u**(1/alpha)`` for a convex ``u >= c0 > 0``; alpha-concave since ``f**alpha = u``.

    ``u = c0 + max(0, max_j a_j . x + b_j) + (x - c)^T Q (x - c) / 2``.
    """
    alpha = alpha if isinstance(alpha, Alpha) else Alpha(alpha)
    if not alpha.is_finite:
        raise ValueError("alpha-concave generator needs finite negative alpha")
    domain = default_domain(n) if domain is None else domain
    if domain.ndim != n:
        raise ValueError("domain dimension differs from n")
    rng = make_rng(seed)
    conv = _random_convex(rng, n, k, True)
    c0 = rng.uniform(0.5, 1.5)
    x = domain.mesh()
    u = c0 + np.maximum(conv.pieces(x), 0.0) + conv.quadratic(x)
    return GridFunction(domain, np.power(u, 1.0 / alpha.value))


def generate_random_polytope(seed: int, n: int, m: int) -> Polytope:
    """Hull of ``m`` uniform points in the unit ball; resampled until full-dimensional."""
    if m < n + 1:
        raise ValueError(f"need at least {n + 1} points for a full-dimensional body in R^{n}")
    rng = make_rng(seed)
    for _ in range(100):
        d = rng.standard_normal(size=(m, n))
        d /= np.linalg.norm(d, axis=1)[:, None]
        r = rng.uniform(size=m) ** (1.0 / n)
        body = Polytope(d * r[:, None])
        if body.is_full:
            return body
    raise RuntimeError("could not draw a full-dimensional polytope in 100 attempts")


def generate_random_quasiconcave(seed: int, n: int, m: int, domain: BoxDomain) -> GridFunction:
    """Indicator of :func:`generate_random_polytope` sampled on ``domain``."""
    return sample(PolytopeIndicator(generate_random_polytope(seed, n, m)), domain)


class AffineMap(NamedTuple):
    matrix: np.ndarray
    shift: np.ndarray
    scale: float


def _rotation(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal(size=(n, n)))
    return q * np.sign(np.diag(r))


def generate_random_affine(
    seed: int, n: int, det_range=(0.2, 5.0), max_condition: float = 3.0
) -> AffineMap:
    """``(A, x0, C)`` with ``|det A|`` log-uniform in ``det_range``.

    ``A = U diag(s) V`` with random orthogonal ``U, V`` and singular values
    whose ratio is log-uniform in ``[1, max_condition]``; ``x0`` uniform in
    ``[-1, 1]^n``, ``C`` uniform in ``[0.5, 2]``.
    """
    rng = make_rng(seed)
    det = math.exp(rng.uniform(math.log(det_range[0]), math.log(det_range[1])))
    cond = math.exp(rng.uniform(0.0, math.log(max_condition)))
    # centred log singular values keep the product equal to det (a single one is 0)
    logs = (np.linspace(0.5, -0.5, n) if n > 1 else np.zeros(1)) * math.log(cond)
    s = np.exp(logs + math.log(det) / n)
    A = _rotation(rng, n) @ np.diag(s) @ _rotation(rng, n)
    x0 = rng.uniform(-1.0, 1.0, size=n)
    C = rng.uniform(0.5, 2.0)
    return AffineMap(A, x0, float(C))
