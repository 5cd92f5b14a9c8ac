__version__ = "0.1.0"

from .baseline import chow_liu, mutual_information, mutual_information_matrix
from .categorizer import build_proximal, classify_quad
from .equivalence import build_class, canonical_form, enumerate_members, is_member, member_swaps
from .estimator import empirical_moments
from .exceptions import (
    AmbiguousQuadError,
    ConstructionError,
    DegenerateColumnError,
    DegenerateQuadError,
    DimensionMismatchError,
    EnumerationCapError,
    FormatError,
    InfeasibleNoiseError,
    InvalidConfigurationError,
    InvalidParameterError,
    InvalidTreeError,
    LearnerError,
    OracleSizeError,
    TreeIsingError,
)
from .learner import find_tree
from .noise import (
    clean_cov,
    estimate_flip_quadratic,
    noisy_cov,
    noisy_mean,
    path_correlation,
    sample_bound,
    theorem2_qhat,
    thresholds,
)
from .sampler import apply_noise, sample_clean
from .types import (
    AssumptionParams,
    CanonicalKey,
    EquivalenceClass,
    ExperimentConfig,
    IsingModel,
    JointDistribution,
    LearnedEdges,
    MomentEstimate,
    MomentSource,
    NoiseSpec,
    ProximalSets,
    SampleBatch,
    StarVerdict,
    TreeGraph,
    VerdictKind,
)
from .utils import setup_logging

__all__ = [
    "TreeGraph",
    "IsingModel",
    "NoiseSpec",
    "AssumptionParams",
    "SampleBatch",
    "MomentSource",
    "MomentEstimate",
    "ProximalSets",
    "VerdictKind",
    "StarVerdict",
    "LearnedEdges",
    "CanonicalKey",
    "EquivalenceClass",
    "JointDistribution",
    "ExperimentConfig",
    "sample_clean",
    "apply_noise",
    "empirical_moments",
    "noisy_mean",
    "noisy_cov",
    "clean_cov",
    "path_correlation",
    "estimate_flip_quadratic",
    "theorem2_qhat",
    "thresholds",
    "sample_bound",
    "build_proximal",
    "classify_quad",
    "find_tree",
    "build_class",
    "canonical_form",
    "is_member",
    "enumerate_members",
    "member_swaps",
    "chow_liu",
    "mutual_information",
    "mutual_information_matrix",
    "TreeIsingError",
    "InvalidTreeError",
    "InvalidParameterError",
    "DimensionMismatchError",
    "FormatError",
    "DegenerateColumnError",
    "InfeasibleNoiseError",
    "InvalidConfigurationError",
    "ConstructionError",
    "DegenerateQuadError",
    "AmbiguousQuadError",
    "LearnerError",
    "EnumerationCapError",
    "OracleSizeError",
    "setup_logging",
]
