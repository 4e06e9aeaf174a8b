"""Alpha-concave functions on grids, convex polytopes, and difference-function bounds."""

from types import ModuleType as _ModuleType

from .bodies import (
    Polytope,
    convex_hull,
    difference_body,
    hull_duality_check,
    hull_union_reflection,
    intersect,
    minkowski_sum,
    polar,
    polar_identity_check,
    reflect_body,
    support_function,
    volume,
)
from .generators import (
    AffineMap,
    generate_random_affine,
    generate_random_alpha_concave,
    generate_random_logconcave,
    generate_random_polytope,
    generate_random_quasiconcave,
    make_rng,
)
from .grids import (
    AbsExp,
    AffineImage,
    BoxDomain,
    Gaussian,
    GridFunction,
    OneDExtremalA,
    OneDExtremalB,
    OrthantExp,
    PolytopeIndicator,
    SimplexIndicator,
    SupportExp,
    is_alpha_concave,
    reflect,
    sample,
    sup_value,
)
from .integration import Integral, integrate, layer_cake, superlevel_volume
from .means import Alpha, mean_alpha, mean_alpha_symmetric
from .rearrangement import check_rearrangement, ratio_chain, star_rearrangement
from .suites import SuiteConfig, VerificationReport, run_suite
from .transforms import (
    check_alpha_concavity_of_delta,
    delta_v,
    difference_function,
    inf_convolution_brute,
    legendre,
    legendre_involution_gap,
)

__version__ = "0.1.0"

__all__ = sorted(k for k, v in globals().items() if not k.startswith("_") and not isinstance(v, _ModuleType))
