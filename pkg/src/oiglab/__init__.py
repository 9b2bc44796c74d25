"""Exact and Monte Carlo tools for one-inclusion graph prediction.

The package builds one-inclusion graphs of finite concept classes, orients
them, runs the induced prediction rule, and studies its error tails.  The
adversarial orientation built from Varshamov-Tenengolts residue classes has
small expected error yet a heavy error tail.
"""

__version__ = "0.1.0"

from .adversarial import (
    AdversarialParams,
    AdversarialRule,
    RandomFlipRule,
    accept_seeds,
    bipartite_view,
    find_accepted_seed,
    orient_extension,
    verify_matching_lemma,
)
from .concept_class import (
    BitVector,
    ProjectedClass,
    StarSystem,
    build_bounded_ones_class,
    build_indicator_class,
    load_class_file,
    parse_class,
    project,
    vc_dimension,
)
from .errors import (
    CapacityError,
    ConfigError,
    ConstructionError,
    InputError,
    InvariantViolation,
    OigLabError,
    ParseError,
    RealizabilityError,
)
from .experiment import ExperimentConfig, Summary, emit, exact_distribution, monte_carlo, run_trial
from .oig import (
    ClosureRule,
    FlowRule,
    OneInclusionGraph,
    Orientation,
    build_graph,
    closure_orientation,
    exact_error,
    max_out_degree,
    orient_min_max_outdegree,
    out_degree,
    predict,
    realize_hypothesis,
)
from .vt_code import VtParams, check_unique_neighborhoods, count_by_residue, covered_codewords, residue

__all__ = [
    "__version__",
    "AdversarialParams",
    "AdversarialRule",
    "RandomFlipRule",
    "accept_seeds",
    "bipartite_view",
    "find_accepted_seed",
    "orient_extension",
    "verify_matching_lemma",
    "BitVector",
    "ProjectedClass",
    "StarSystem",
    "build_bounded_ones_class",
    "build_indicator_class",
    "load_class_file",
    "parse_class",
    "project",
    "vc_dimension",
    "CapacityError",
    "ConfigError",
    "ConstructionError",
    "InputError",
    "InvariantViolation",
    "OigLabError",
    "ParseError",
    "RealizabilityError",
    "ExperimentConfig",
    "Summary",
    "emit",
    "exact_distribution",
    "monte_carlo",
    "run_trial",
    "ClosureRule",
    "FlowRule",
    "OneInclusionGraph",
    "Orientation",
    "build_graph",
    "closure_orientation",
    "exact_error",
    "max_out_degree",
    "orient_min_max_outdegree",
    "out_degree",
    "predict",
    "realize_hypothesis",
    "VtParams",
    "check_unique_neighborhoods",
    "count_by_residue",
    "covered_codewords",
    "residue",
]
