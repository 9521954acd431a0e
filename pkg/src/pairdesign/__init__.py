"""D-optimal designs for two-level paired comparison experiments.

Alternatives are described by K two-level attributes of which S are shown
(partial profiles), responses follow a linear paired-comparison model with
main effects and all two-, three- and four-way interaction products, and
designs are weightings of ordered pairs.  The library enumerates the design
region by comparison depth, evaluates information matrices both in closed
form and by brute force, certifies D-optimality through the equivalence
theorem, and computes optimal depth weightings.
"""

from .design_space import (
    ComparisonPair,
    DepthDesign,
    ExplicitDesign,
    InvalidPairError,
    ModelSpec,
    Profile,
    comparison_depth,
    count_pairs,
    enumerate_orbit,
    param_dims,
    realize_design,
    regression_vector,
)
from .equivalence import (
    CertificationReport,
    VarianceProfile,
    kw_certify,
    variance_exact,
    variance_from_blocks,
    variance_profile,
    variance_sweep_max_deviation,
    variance_uniform,
)
from .information import (
    BlockInfo,
    DenseInfo,
    SingularDesignError,
    h_numerators,
    h_values,
    info_matrix_exact,
    is_identifiable,
    log_det,
    mix_h,
)
from .optimizer import (
    OptimResult,
    conjectured_design,
    optimal_depth_first_order,
    optimal_depth_main,
    optimal_depth_second_order,
    optimal_depth_third_order,
    optimize_full,
)

__version__ = "0.1.0"

__all__ = [
    "BlockInfo",
    "CertificationReport",
    "ComparisonPair",
    "DenseInfo",
    "DepthDesign",
    "ExplicitDesign",
    "InvalidPairError",
    "ModelSpec",
    "OptimResult",
    "Profile",
    "SingularDesignError",
    "VarianceProfile",
    "comparison_depth",
    "conjectured_design",
    "count_pairs",
    "enumerate_orbit",
    "h_numerators",
    "h_values",
    "info_matrix_exact",
    "is_identifiable",
    "kw_certify",
    "log_det",
    "mix_h",
    "optimal_depth_first_order",
    "optimal_depth_main",
    "optimal_depth_second_order",
    "optimal_depth_third_order",
    "optimize_full",
    "param_dims",
    "realize_design",
    "regression_vector",
    "variance_exact",
    "variance_from_blocks",
    "variance_profile",
    "variance_sweep_max_deviation",
    "variance_uniform",
]
