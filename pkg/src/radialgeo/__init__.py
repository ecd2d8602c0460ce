"""Volume growth, warping ODEs, and geodesic triangle calculus on
rotationally symmetric model geometries.

The package is organized bottom-up: curvature functions with declared tails,
warping solutions of m'' + k m = 0, volumes and growth ratios of n-models,
geodesic triangles on comparison surfaces, synthetic test manifolds, and the
pinching criteria that combine them. The ``radialgeo`` console script runs
scenario files end to end.
"""

__version__ = "0.1.0"

from .errors import (
    ConditionB1ViolatedError,
    ConjugatePointError,
    DomainError,
    GeometryError,
    HorizonExceededError,
    ScenarioError,
    SectorExceededError,
    UnboundedError,
    UnsupportedManifoldError,
)
from .curvature import (
    NEG_INFINITY,
    ConstantTail,
    FormulaCore,
    MomentIntegral,
    PowerLawTail,
    RadialCurvature,
    SplineCore,
    ZeroTail,
    moment_integral,
    nonpositive_min,
    nonpositive_part,
)
from .warping import (
    DEFAULT_REL_TOL,
    ModelSurface,
    WarpingSolution,
    default_horizon,
    slope_limit,
    slope_limit_bounds,
    solve_warping,
    total_curvature_direct,
    total_curvature_isoperimetric,
)
from .volume import (
    BallVolumeClass,
    GrowthRatio,
    bishop_monotonicity_check,
    cap_fraction,
    cap_volume,
    classify_ball_volume,
    growth_ratio,
    model_ball_volume,
    unit_sphere_volume,
)
from .geodesics import (
    GeodesicPath,
    GeodesicTriangle,
    SurfacePoint,
    comparison_triangle,
    critical_angle_bound,
    distance,
    gauss_bonnet_residual,
    shoot,
)
from .synthetic import RotSymManifold
from .criteria import (
    DEFAULT_HORIZONS,
    CriterionReport,
    critical_angle,
    growth_threshold,
    ricci_pinch_check,
    sectional_pinch_check,
)

__all__ = [
    "__version__",
    # errors
    "GeometryError", "DomainError", "ConjugatePointError", "UnboundedError",
    "HorizonExceededError", "SectorExceededError", "ConditionB1ViolatedError",
    "UnsupportedManifoldError", "ScenarioError",
    # curvature
    "RadialCurvature", "SplineCore", "FormulaCore", "ZeroTail", "PowerLawTail",
    "ConstantTail", "MomentIntegral", "moment_integral", "nonpositive_min",
    "nonpositive_part", "NEG_INFINITY",
    # warping
    "WarpingSolution", "solve_warping", "default_horizon", "ModelSurface",
    "slope_limit", "slope_limit_bounds", "total_curvature_direct",
    "total_curvature_isoperimetric", "DEFAULT_REL_TOL",
    # volume
    "unit_sphere_volume", "cap_fraction", "cap_volume", "model_ball_volume",
    "classify_ball_volume", "BallVolumeClass", "GrowthRatio", "growth_ratio",
    "bishop_monotonicity_check",
    # geodesics
    "SurfacePoint", "GeodesicPath", "GeodesicTriangle", "shoot", "distance",
    "comparison_triangle", "gauss_bonnet_residual", "critical_angle_bound",
    # synthetic
    "RotSymManifold",
    # criteria
    "CriterionReport", "critical_angle", "growth_threshold",
    "ricci_pinch_check", "sectional_pinch_check", "DEFAULT_HORIZONS",
]
