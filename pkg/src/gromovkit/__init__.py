"""Finite metric spaces, Gromov-Hausdorff bounds, spider trees, and the spider-tagged embedding family."""

from .constructions import ball_restrict, glue, l2_product, path_space, product_matrix, scale
from .family import (
    BranchSelectionError,
    ConfigError,
    FamilyConfig,
    build_D,
    build_E,
    build_F,
    continuity_sweep,
    default_config,
    injectivity_sweep,
    rho,
    select_branch,
    sine_curve,
    sweep,
    xi,
    zeta,
)
from .gh import (
    Correspondence,
    distortion,
    gh_bounds,
    gh_exact,
    gh_lower_diam,
    gh_upper_greedy,
    gh_upper_same_labels,
    hausdorff,
)
from .metric import (
    FiniteMetricSpace,
    MetricAxiomError,
    MetricStructureError,
    PseudoMetricMatrix,
    diameter,
    load_space,
    quotient,
    save_space,
    uniform_distance,
    validate,
)
from .pointed import (
    PointedSpace,
    RoughIsometryCert,
    check_admissible,
    check_rough_isometry,
    glue_from_rough_isometry,
    pgh_upper,
    product_rough_isometry,
    projection_rough_isometry,
    sigma,
)
from .spider import FingerprintError, SpiderParams, build_spider, fingerprint, tau

__version__ = "0.1.0"
