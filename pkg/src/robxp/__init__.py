"""Robustness verdicts and formal explanations for classifiers via SAT/PB reasoning."""

from .distance import INF, DistanceSpec, distance, minimum_meaningful_epsilon, parse_norm, within_ball
from .errors import (
    BridgeError, DecodeError, DimensionError, DomainError, EmptyChangeError, EncodingUnsupported,
    NotApplicable, OracleUnknown, ParseError, PrecisionError, RobxpError, TooLarge, TrivialClassifier,
)
from .explain import (
    Explanation, ExplanationListing, check_mhs_duality, cxp_from_aex, enumerate_explanations, find_axp,
    find_cxp, is_weak_axp, is_weak_cxp, plain_explanations,
)
from .fixtures import build_kappa1, build_kappa2, kappa1_threshold, random_bnn, random_lookup
from .model import (
    ABSTAIN, BNN, BNNLayer, Binary, Categorical, Classifier, ExplanationProblem, FeatureSpace, Guard,
    Instance, IntegerRange, Linear, Lookup, Piecewise, QuantizedReal, RealInterval, evaluate,
    is_nontrivial,
)
from .robustness import (
    AExFound, ConstraintSet, NoAExFound, OracleConfig, SamplingConfig, Verdict, certify_demo,
    find_aex, find_global_counterexample, find_global_counterexample_delta, find_transition_point,
    is_locally_robust, local_flip_threshold, sample_local_robustness,
)

__version__ = "0.1.0"

__all__ = [
    "INF", "DistanceSpec", "distance", "minimum_meaningful_epsilon", "parse_norm", "within_ball",
    "BridgeError", "DecodeError", "DimensionError", "DomainError", "EmptyChangeError", "EncodingUnsupported",
    "NotApplicable", "OracleUnknown", "ParseError", "PrecisionError", "RobxpError", "TooLarge",
    "TrivialClassifier", "Explanation", "ExplanationListing", "check_mhs_duality", "cxp_from_aex",
    "enumerate_explanations", "find_axp", "find_cxp", "is_weak_axp", "is_weak_cxp", "plain_explanations",
    "build_kappa1", "build_kappa2", "kappa1_threshold", "random_bnn", "random_lookup", "ABSTAIN", "BNN",
    "BNNLayer", "Binary", "Categorical", "Classifier", "ExplanationProblem", "FeatureSpace", "Guard",
    "Instance", "IntegerRange", "Linear", "Lookup", "Piecewise", "QuantizedReal", "RealInterval", "evaluate",
    "is_nontrivial", "AExFound", "ConstraintSet", "NoAExFound", "OracleConfig", "SamplingConfig", "Verdict",
    "certify_demo", "find_aex", "find_global_counterexample", "find_global_counterexample_delta",
    "find_transition_point", "is_locally_robust", "local_flip_threshold", "sample_local_robustness",
    "__version__",
]
