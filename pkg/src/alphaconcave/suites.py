"""Verification suites: build instances, measure ratios, compare with bounds.

Each suite returns a list of :class:`Case` records.  A case is one measured
ratio against one theoretical constant under one of three pass rules:

``upper``  ratio <= bound * (1 + tol)
``lower``  ratio >= bound * (1 - tol)
``equal``  |ratio - bound| <= tol * bound

``slack`` is the signed distance to failure (positive means pass).
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np

from . import bodies
from .bodies import Polytope
from .generators import (
    DEFAULT_NODES,
    default_domain,
    generate_random_affine,
    generate_random_alpha_concave,
    generate_random_logconcave,
    generate_random_polytope,
    make_rng,
)
from .grids import (
    AffineImage,
    BoxDomain,
    GridFunction,
    OneDExtremalA,
    OneDExtremalB,
    OrthantExp,
    PolytopeIndicator,
    SimplexIndicator,
    sample,
)
from .integration import integrate
from .means import Alpha
from .rearrangement import check_rearrangement
from .transforms import difference_function

__all__ = [
    "SuiteConfig",
    "Case",
    "VerificationReport",
    "ConfigError",
    "SUITES",
    "run_suite",
    "auto_route",
    "functional_ratio",
    "alpha_bound",
    "one_d_constant",
    "affine_box",
    "centered_polygon",
    "tight_box",
]

KINDS = ("upper", "lower", "equal")


class ConfigError(ValueError):
    """Invalid suite configuration."""


@dataclass(frozen=True)
class SuiteConfig:
    """Parameters of one suite run; ``None`` fields take the suite defaults."""

    suite: str
    dim: Optional[int] = None
    nodes: Optional[int] = None
    halfwidth: Optional[float] = None
    alpha: Optional[float] = None
    seed: int = 0
    tol: Optional[float] = None
    count: Optional[int] = None
    dump_dir: Optional[str] = None

    def __post_init__(self):
        if self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}; choose from {sorted(SUITES)}")
        if self.dim is not None and self.dim not in (1, 2, 3):
            raise ConfigError("dim must be 1, 2 or 3")
        if self.nodes is not None and self.nodes < 33:
            raise ConfigError("nodes per axis must be at least 33")
        if self.tol is not None and not 0 < self.tol <= 0.2:
            raise ConfigError("tol must lie in (0, 0.2]")
        if self.halfwidth is not None and not self.halfwidth > 0:
            raise ConfigError("halfwidth must be positive")
        if self.count is not None and self.count < 1:
            raise ConfigError("count must be at least 1")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.alpha is not None:
            try:
                Alpha(self.alpha)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("dump_dir")
        if d["alpha"] is not None:
            d["alpha"] = str(Alpha(d["alpha"]))
        return d


@dataclass
class Case:
    id: str
    ratio: float
    bound: float
    kind: str
    tol: float
    tail_estimate: float = 0.0
    ms: float = 0.0
    grid: Optional[dict] = None
    passed: bool = field(init=False)
    slack: float = field(init=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        r, b, t = self.ratio, self.bound, self.tol
        if self.kind == "upper":
            self.slack = b * (1 + t) - r
        elif self.kind == "lower":
            self.slack = r - b * (1 - t)
        else:
            self.slack = t * abs(b) - abs(r - b)
        self.passed = bool(np.isfinite(r) and self.slack >= 0)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "ratio": _num(self.ratio),
            "bound": _num(self.bound),
            "tol": self.tol,
            "slack": _num(self.slack),
            "pass": self.passed,
            "tail_estimate": _num(self.tail_estimate),
            "grid": self.grid,
            "ms": round(self.ms, 3),
        }


def _num(x: float):
    # JSON has no infinities
    x = float(x)
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")


@dataclass
class VerificationReport:
    suite: str
    config: dict
    cases: List[Case]

    @property
    def passed(self) -> int:
        return sum(c.passed for c in self.cases)

    @property
    def failed(self) -> int:
        return len(self.cases) - self.passed

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "config": self.config,
            "cases": [c.to_dict() for c in self.cases],
            "summary": {"passed": self.passed, "failed": self.failed},
        }


# -- shared measurement helpers -------------------------------------------------

# brute force costs (nodes in) x (nodes out); beyond this the transform routes take over
DIRECT_BUDGET = 2.5e8


def auto_route(f: GridFunction, alpha: Alpha) -> str:
    if alpha.is_minus_infinity:
        return "levelset"
    return "direct" if float(f.domain.size) ** 2 <= DIRECT_BUDGET else "conjugate"


def functional_ratio(f: GridFunction, alpha, route: Optional[str] = None):
    """``(int Delta_alpha f / int f, relative tail estimate)``."""
    alpha = alpha if isinstance(alpha, Alpha) else Alpha(alpha)
    route = auto_route(f, alpha) if route is None else route
    d = difference_function(f, alpha, route)
    num = integrate(d)
    den = integrate(f)
    tail = num.tail / num.value + den.tail / den.value
    return num.value / den.value, tail


def alpha_bound(n: int, alpha: Alpha) -> float:
    """``2**-(n + 1/alpha) * C(2n, n)`` (``C(2n, n) / 2**n`` at alpha = -inf)."""
    inv = 0.0 if alpha.is_minus_infinity else 1.0 / alpha.value
    return 2.0 ** (-(n + inv)) * math.comb(2 * n, n)


def one_d_constant(alpha: Alpha) -> float:
    """Sharp 1-D constant: 2 for alpha in (-1, 0), ``2**(-1/alpha)`` for alpha <= -1."""
    if alpha.is_zero or (alpha.is_finite and alpha.value > -1):
        return 2.0
    if alpha.is_minus_infinity:
        return 1.0
    return 2.0 ** (-1.0 / alpha.value)


def affine_box(matrix, shift, level: float, nodes: int) -> BoxDomain:
    """Bounding box of the preimage of ``{u >= 0, sum(u) <= level}`` under ``x -> A x + x0``."""
    A = np.asarray(matrix, dtype=float)
    n = A.shape[0]
    corners = np.vstack([np.zeros(n), level * np.eye(n)])
    pre = np.linalg.solve(A, (corners - shift).T).T
    return BoxDomain(tuple(pre.min(axis=0)), tuple(pre.max(axis=0)), (nodes,) * n)


def centered_polygon(seed: int, m: int) -> Polytope:
    """Random polygon moved to its vertex centroid and scaled to inradius-at-origin 1."""
    P = generate_random_polytope(seed, 2, m)
    P = Polytope(P.vertices - P.vertices.mean(axis=0))
    _, c = P.facets()
    return Polytope(P.vertices / c.min())


class _Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.ms = 1e3 * (time.perf_counter() - self.t0)


def _dims(cfg: SuiteConfig, default, allowed) -> List[int]:
    dims = default if cfg.dim is None else [cfg.dim]
    for n in dims:
        if n not in allowed:
            raise ConfigError(f"suite {cfg.suite} supports dim in {allowed}, got {n}")
    return list(dims)


def _tol(cfg: SuiteConfig, default: float) -> float:
    return default if cfg.tol is None else cfg.tol


def _alphas(cfg: SuiteConfig, default) -> List[Alpha]:
    return [Alpha(a) for a in (default if cfg.alpha is None else [cfg.alpha])]


def _dump(cfg: SuiteConfig, name: str, obj):
    if cfg.dump_dir is None:
        return
    path = Path(cfg.dump_dir)
    path.mkdir(parents=True, exist_ok=True)
    suffix = ".grid.txt" if isinstance(obj, GridFunction) else ".poly.txt"
    (path / (name.replace("/", "_") + suffix)).write_text(obj.to_text())


def _functional_case(cfg, cid, f, alpha, bound, kind, tol, route=None) -> Case:
    _dump(cfg, cid, f)
    with _Timer() as t:
        ratio, tail = functional_ratio(f, alpha, route)
    return Case(cid, ratio, bound, kind, tol, tail, t.ms, f.domain.describe())


# -- suites ----------------------------------------------------------------------

EXTREMAL_NODES = {1: 2049, 2: 513, 3: 129}


def _rs_functional_extremal(cfg: SuiteConfig) -> List[Case]:
    cases = []
    tol = _tol(cfg, 0.02)
    for n in _dims(cfg, [1, 2, 3], (1, 2, 3)):
        dom = BoxDomain.centered(cfg.halfwidth or 25.0, cfg.nodes or EXTREMAL_NODES[n], n)
        f = sample(OrthantExp(n), dom)
        cases.append(_functional_case(cfg, f"orthant-exp/n{n}", f, Alpha.zero(), 2.0**n, "equal", tol))
    return cases


def _random_logconcave_cases(cfg: SuiteConfig, kind: str) -> List[Case]:
    cases = []
    tol = _tol(cfg, 0.02)
    for n in _dims(cfg, [1, 2], (1, 2, 3)):
        dom = default_domain(n, cfg.nodes, cfg.halfwidth or 8.0)
        for i in range(cfg.count or 50):
            seed = cfg.seed + i
            f = generate_random_logconcave(seed, n, 3, dom)
            bound = 2.0**n if kind == "upper" else 1.0
            cases.append(_functional_case(cfg, f"logconcave/n{n}/seed{seed}", f, Alpha.zero(), bound, kind, tol))
    return cases


def _rs_functional_random(cfg):
    return _random_logconcave_cases(cfg, "upper")


def _pl_lower(cfg):
    return _random_logconcave_cases(cfg, "lower")


def _rs_functional_affine(cfg: SuiteConfig) -> List[Case]:
    cases = []
    tol = _tol(cfg, 0.03)
    for n in _dims(cfg, [2], (1, 2, 3)):
        for i in range(cfg.count or 10):
            seed = cfg.seed + i
            A, x0, C = generate_random_affine(seed, n)
            # --halfwidth is the truncation level in the orthant coordinates
            dom = affine_box(A, x0, cfg.halfwidth or 15.0, cfg.nodes or {1: 4097, 2: 1025, 3: 129}[n])
            f = sample(AffineImage(OrthantExp(n), A, x0, C), dom)
            cases.append(_functional_case(cfg, f"affine/n{n}/seed{seed}", f, Alpha.zero(), 2.0**n, "equal", tol))
    return cases


def _rs_body_simplex(cfg: SuiteConfig) -> List[Case]:
    cases = []
    tol = _tol(cfg, 1e-9)
    for n in _dims(cfg, [1, 2, 3], (1, 2, 3)):
        with _Timer() as t:
            K = SimplexIndicator.unit(n).body
            ratio = bodies.volume(bodies.difference_body(K)) / bodies.volume(K)
        cases.append(Case(f"simplex/n{n}", ratio, math.comb(2 * n, n), "equal", tol, 0.0, t.ms))
    return cases


def _polygon_sizes(rng_seed: int, count: int, lo: int = 3, hi: int = 12) -> List[int]:
    rng = make_rng(rng_seed)
    return [int(m) for m in rng.integers(lo, hi + 1, size=count)]


def _rs_body_random(cfg: SuiteConfig) -> List[Case]:
    cases = []
    tol = _tol(cfg, 1e-12)
    for n in _dims(cfg, [2], (1, 2, 3)):
        sizes = _polygon_sizes(cfg.seed, cfg.count or 100, n + 1, 4 * n + 4)
        for i, m in enumerate(sizes):
            seed = cfg.seed + i
            with _Timer() as t:
                K = generate_random_polytope(seed, n, m)
                ratio = bodies.volume(bodies.difference_body(K)) / bodies.volume(K)
            _dump(cfg, f"body/n{n}/seed{seed}", K)
            cid = f"body/n{n}/seed{seed}/m{m}"
            cases.append(Case(cid + "/upper", ratio, math.comb(2 * n, n), "upper", tol, 0.0, t.ms))
            cases.append(Case(cid + "/lower", ratio, 2.0**n, "lower", tol, 0.0, t.ms))
    return cases


def _hull_union(cfg: SuiteConfig) -> List[Case]:
    cases = []
    tol = _tol(cfg, 1e-12)
    for n in _dims(cfg, [2], (1, 2, 3)):
        K = SimplexIndicator.unit(n).body
        with _Timer() as t:
            ratio = bodies.volume(bodies.hull_union_reflection(K, np.zeros(n))) / bodies.volume(K)
        cases.append(Case(f"simplex-vertex/n{n}", ratio, 2.0**n, "equal", tol, 0.0, t.ms))
        sizes = _polygon_sizes(cfg.seed + 1, cfg.count or 100, n + 1, 4 * n + 4)
        for i, m in enumerate(sizes):
            seed = cfg.seed + i
            with _Timer() as t:
                # origin inside K: the bound needs the reflection centre x/2 in K
                K = generate_random_polytope(seed, n, m)
                K = Polytope(K.vertices - K.vertices.mean(axis=0))
                w = make_rng(seed).dirichlet(np.ones(len(K.vertices)))
                x = w @ K.vertices
                ratio = bodies.volume(bodies.hull_union_reflection(K, x)) / bodies.volume(K)
            cases.append(Case(f"random/n{n}/seed{seed}/m{m}", ratio, 2.0**n, "upper", tol, 0.0, t.ms))
    return cases


POLAR_NODES = {1: 4097, 2: 513, 3: 129}


def _polar_identity(cfg: SuiteConfig) -> List[Case]:
    cases = []
    tol = _tol(cfg, 0.02)
    hw = cfg.halfwidth or 20.0
    dims = _dims(cfg, [1, 2, 3], (1, 2, 3))
    for n in dims:
        K = Polytope(np.array(np.meshgrid(*[[-1.0, 1.0]] * n, indexing="ij")).reshape(n, -1).T)
        cases.append(_polar_case(cfg, f"cube/n{n}", K, hw, cfg.nodes or POLAR_NODES[n], tol))
    if 2 in dims:
        for i in range(cfg.count or 10):
            seed = cfg.seed + i
            K = centered_polygon(seed, 8)
            cases.append(_polar_case(cfg, f"polygon/seed{seed}", K, hw, cfg.nodes or POLAR_NODES[2], tol))
    return cases


def _polar_case(cfg, cid, K, hw, nodes, tol) -> Case:
    _dump(cfg, cid, K)
    with _Timer() as t:
        ratio = bodies.polar_identity_check(K, hw, nodes)
    return Case(cid, ratio, 1.0, "equal", tol, 0.0, t.ms, BoxDomain.centered(hw, nodes, K.ndim).describe())


def _hull_duality(cfg: SuiteConfig) -> List[Case]:
    tol = _tol(cfg, 1e-9)
    named = {
        "square": Polytope([[-1, -1], [1, -1], [1, 1], [-1, 1]]),
        "triangle": Polytope([[-1.0, -0.5], [2.0, -0.5], [0.0, 1.5]]),
        "segment": Polytope([[-1.0], [2.0]]),
        "tetrahedron": Polytope([[-1, -1, -1], [2, -0.5, -0.5], [-0.5, 2, -0.5], [-0.5, -0.5, 2]]),
    }
    for i in range(cfg.count or 10):
        named[f"polygon/seed{cfg.seed + i}"] = centered_polygon(cfg.seed + i, 8)
    cases = []
    for cid, K in named.items():
        if cfg.dim is not None and K.ndim != cfg.dim:
            continue
        with _Timer() as t:
            lhs = bodies.polar(bodies.intersect(K, bodies.reflect_body(K)))
            Ps = bodies.polar(K)
            rhs = Polytope(np.vstack([Ps.vertices, -Ps.vertices]))
            dist = bodies.vertex_set_distance(lhs, rhs) / max(1.0, float(np.abs(rhs.vertices).max()))
        cases.append(Case(cid, 1.0 + dist, 1.0, "equal", tol, 0.0, t.ms))
    return cases


SIMPLEX_BOX = (-0.25, 1.25)
SIMPLEX_NODES = {1: 385, 2: 193, 3: 97}
RANDOM_BODY_NODES = {1: 385, 2: 193, 3: 161}


def _alpha_minus_infinity(cfg: SuiteConfig) -> List[Case]:
    cases = []
    tol = _tol(cfg, 0.02)
    a = Alpha.minus_infinity()
    for n in _dims(cfg, [2, 3], (1, 2, 3)):
        nodes = cfg.nodes or SIMPLEX_NODES[n]
        dom = BoxDomain.cube(*SIMPLEX_BOX, nodes, n)
        f = sample(SimplexIndicator.unit(n), dom)
        cases.append(_functional_case(cfg, f"simplex/n{n}", f, a, alpha_bound(n, a), "equal", tol))
        sizes = _polygon_sizes(cfg.seed + 2, cfg.count or 20, n + 1, 4 * n + 4)
        for i, m in enumerate(sizes):
            seed = cfg.seed + i
            P = generate_random_polytope(seed, n, m)
            dom = tight_box(P, cfg.nodes or RANDOM_BODY_NODES[n])
            f = sample(PolytopeIndicator(P), dom)
            cases.append(_functional_case(cfg, f"polytope/n{n}/seed{seed}/m{m}", f, a, alpha_bound(n, a), "upper", tol))
    return cases


def tight_box(P: Polytope, nodes: int, pad: int = 2) -> BoxDomain:
    """Bounding box of ``P`` widened by ``pad`` cells per side."""
    lo = P.vertices.min(axis=0)
    hi = P.vertices.max(axis=0)
    h = (hi - lo) / (nodes - 1 - 2 * pad)
    return BoxDomain(tuple(lo - pad * h), tuple(hi + pad * h), (nodes,) * P.ndim)


def _alpha_general_bound(cfg: SuiteConfig) -> List[Case]:
    cases = []
    tol = _tol(cfg, 0.02)
    for alpha in _alphas(cfg, [-0.5, -1.0, -2.0]):
        if not alpha.is_finite:
            raise ConfigError("alpha-general-bound needs finite negative alpha")
        for n in _dims(cfg, [1, 2], (1, 2, 3)):
            dom = default_domain(n, cfg.nodes, cfg.halfwidth or 8.0)
            for i in range(cfg.count or 20):
                seed = cfg.seed + i
                f = generate_random_alpha_concave(seed, n, 3, alpha, dom)
                cid = f"alpha{alpha}/n{n}/seed{seed}"
                cases.append(_functional_case(cfg, cid, f, alpha, alpha_bound(n, alpha), "upper", tol))
    return cases


def extremal_1d(alpha: Alpha, nodes: Optional[int] = None, halfwidth: Optional[float] = None) -> GridFunction:
    """Sampled sharp example: ``(1 + x)**(1/alpha)`` for alpha > -1, ``x**(1/alpha)`` on (0, 1) otherwise."""
    if not alpha.is_finite:
        raise ConfigError("1-D extremal families need finite negative alpha")
    if alpha.value > -1:
        hw = halfwidth or 200.0
        return sample(OneDExtremalA(alpha.value), BoxDomain((-hw,), (hw,), (nodes or 8001,)))
    hw = halfwidth or 1.0
    return sample(OneDExtremalB(alpha.value), BoxDomain((-hw,), (hw,), (nodes or 4001,)))


def _alpha_1d(cfg: SuiteConfig) -> List[Case]:
    cases = []
    _dims(cfg, [1], (1,))
    for alpha in _alphas(cfg, [-0.5, -2.0, -1.0]):
        c = one_d_constant(alpha)
        f = extremal_1d(alpha, cfg.nodes, cfg.halfwidth)
        # the sharp examples are judged to +-0.02 in absolute terms
        cases.append(_functional_case(cfg, f"extremal/alpha{alpha}", f, alpha, c, "equal", _tol(cfg, 0.02 / c)))
        dom = default_domain(1)
        for i in range(cfg.count or 20):
            seed = cfg.seed + i
            g = generate_random_alpha_concave(seed, 1, 3, alpha, dom)
            cases.append(_functional_case(cfg, f"random/alpha{alpha}/seed{seed}", g, alpha, c, "upper", _tol(cfg, 0.02)))
    return cases


REARRANGE_DOMAINS = {"A": (50.0, 2001), "B": (1.0, 1001)}


def _rearrangement_properties(cfg: SuiteConfig) -> List[Case]:
    _dims(cfg, [1], (1,))
    alpha = Alpha(cfg.alpha) if cfg.alpha is not None else None
    items = []
    a_ext = alpha if alpha is not None and alpha.is_finite and alpha.value > -1 else Alpha(-0.5)
    b_ext = alpha if alpha is not None and alpha.is_finite and alpha.value <= -1 else Alpha(-2.0)
    hw, nodes = REARRANGE_DOMAINS["A"]
    items.append((f"extremal-A/alpha{a_ext}", extremal_1d(a_ext, cfg.nodes or nodes, hw), a_ext))
    hw, nodes = REARRANGE_DOMAINS["B"]
    items.append((f"extremal-B/alpha{b_ext}", extremal_1d(b_ext, cfg.nodes or nodes, hw), b_ext))
    cycle = [Alpha(-0.5), Alpha(-1.0), Alpha(-2.0)] if alpha is None else [alpha]
    dom = default_domain(1, cfg.nodes, cfg.halfwidth or 8.0)
    for i in range(cfg.count or 20):
        seed = cfg.seed + i
        a = cycle[i % len(cycle)]
        items.append((f"random/alpha{a}/seed{seed}", generate_random_alpha_concave(seed, 1, 3, a, dom), a))
    cases = []
    for cid, f, a in items:
        _dump(cfg, cid, f)
        with _Timer() as t:
            rep = check_rearrangement(f, a)
        for key, prop in rep.properties.items():
            # ratio = measured gap, bound = allowed gap; shared timing per instance
            cases.append(Case(f"{cid}/{key}", prop.gap, prop.tol, "upper", 1e-12, 0.0, t.ms, f.domain.describe()))
    return cases


SUITES: Dict[str, Callable[[SuiteConfig], List[Case]]] = {
    "rs-functional-extremal": _rs_functional_extremal,
    "rs-functional-random": _rs_functional_random,
    "rs-functional-affine": _rs_functional_affine,
    "pl-lower": _pl_lower,
    "rs-body-simplex": _rs_body_simplex,
    "rs-body-random": _rs_body_random,
    "hull-union": _hull_union,
    "polar-identity": _polar_identity,
    "hull-duality": _hull_duality,
    "alpha-minus-infinity": _alpha_minus_infinity,
    "alpha-general-bound": _alpha_general_bound,
    "alpha-1d": _alpha_1d,
    "rearrange-lemma": _rearrangement_properties,
}


def run_suite(config: SuiteConfig) -> VerificationReport:
    """Run every case of ``config.suite``; the report is deterministic except for ``ms``."""
    cases = SUITES[config.suite](config)
    return VerificationReport(config.suite, config.to_dict(), cases)
