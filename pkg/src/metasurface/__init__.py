"""Exact and Monte Carlo tools for the learning surface of finite meta-hypothesis families."""

from .combinatorics import (
    EXCEEDS_CAP,
    ErrorCurve,
    HellyResult,
    TrivialityReport,
    dual_helly,
    eps_dual_helly_class,
    eps_dual_helly_family,
    eps_dual_helly_relative,
    family_vc,
    find_hard_set,
    minimal_nonrealizable_sets,
    optimal_error_curve,
    triviality_report,
    vc_dimension,
)
from .game import GameSolution, MixedStrategy, adversary_best_response, family_value, solve_matrix_game
from .generators import (
    GeneratorSpec,
    gen_halfspace_family,
    gen_near_complete_family,
    gen_random_family,
    gen_singleton_family,
    pair_singleton_family,
)
from .simulate import (
    BoundParams,
    ErmPolicy,
    SurfaceEstimate,
    build_easy_metadist,
    build_hard_metadist,
    build_mixture,
    compression_learner,
    erm_select,
    estimate_surface,
    exact_surface,
    sample_three_stage,
    sample_two_stage,
    upper_bound_curve,
)
from .universe import (
    Domain,
    Hypothesis,
    HypothesisClass,
    LabeledExample,
    MetaDistribution,
    MetaFamily,
    MultiSample,
    PointUniverse,
    class_loss,
    hypothesis_loss,
    is_meta_realizable,
    meta_loss,
)

__version__ = "0.1.0"
