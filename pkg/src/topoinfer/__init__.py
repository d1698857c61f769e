"""Homology recovery from random samples of model manifolds.

Pipeline: a catalog of closed-form manifolds (geometry), coverage
bounds and admissibility checks (bounds), seeded samplers and density
certificates (sampling), Rips/Cech complexes with GF(2) Betti numbers
(complexes), and a config-driven Monte Carlo harness (experiments)
with brute-force validators (validation).
"""

from .geometry import (
    AmbientSpace,
    GeometricParams,
    ManifoldModel,
    MedialAxisError,
    MODEL_NAMES,
    ambient_distance,
    ambient_pairwise,
    exact_ambient_ball_volume,
    exact_intrinsic_ball_volume,
    geometric_params,
    intrinsic_diameter,
    intrinsic_distance,
    intrinsic_pairwise,
    parse_model,
    project_to_manifold,
    reach_estimate_bruteforce,
    tube_volume,
    unit_ball_volume,
)
from .bounds import (
    AdmissibilityCheck,
    AdmissibilityReport,
    CoverageBound,
    VacuousBoundError,
    ball_volume_lower_bound,
    check_clean_admissibility,
    check_noisy_admissibility,
    coverage_probability_lower_bound,
    covering_number_upper_bound,
    sample_size,
    second_variation_certificate,
)
from .sampling import (
    SampleSet,
    SamplingError,
    derive_trial_seed,
    empirical_coverage_probability,
    is_eps_dense_in_M,
    is_eps_dense_wrt_M,
    min_density_resolution,
    read_sample_csv,
    sample_tube,
    sample_to_csv,
    sample_uniform,
    write_sample_csv,
)
from .complexes import (
    SimplexBudgetError,
    SimplicialComplex,
    betti_numbers,
    betti_reference,
    build_cech_euclidean,
    build_rips,
    boundary_rank,
    complex_from_text,
    complex_to_text,
    min_enclosing_ball_radius,
    read_complex,
    write_complex,
)
from .experiments import (
    AdmissibilityError,
    ConfigError,
    ExperimentConfig,
    betti_match,
    complex_plan,
    load_config,
    parse_config,
    run_experiment,
)
from .validation import (
    OracleCheck,
    betti_oracle,
    gf2_rank_dense,
    random_complex,
    run_oracle_suites,
)

__version__ = "0.1.0"
