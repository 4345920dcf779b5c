"""Decision discovery for data-aware object-centric event logs.

The package covers the full loop: DOCEL log parsing/writing and
validation, shift indexing, correlation-guided discovery of decision
requirements diagrams with random-forest support gating, rule extraction
from decision trees, DOT/JSON export, and synthetic log generators with
replayable ground truth.
"""

__version__ = "0.1.0"

from .correlation import correlate
from .discovery import (
    DiscoveredDrd,
    MiningConfig,
    build_predictive_model,
    deduplicate_drds,
    find_input_models,
    find_input_variables,
    mine_dmn_models,
    related_objects,
)
from .docel import (
    DocelLog,
    ValidationReport,
    object_trace,
    parse_docel,
    validate_log,
    write_docel,
)
from .export import drd_to_dot, drd_to_json, rules_to_json, tree_to_dot
from .generators import (
    GroundTruthSpec,
    PublicationParams,
    ShippingParams,
    generate_publication_log,
    generate_shipping_log,
    ground_truth,
)
from .learners import (
    LearnerConfig,
    encode_features,
    evaluate_accuracy,
    train_decision_tree,
    train_random_forest,
    tree_to_rules,
)
from .shifts import (
    Ataots,
    ShiftIndex,
    TraceSet,
    build_shift_index,
    candidate_variables,
    enumerate_ataots,
    traces_with_shift,
)

__all__ = [
    "__version__",
    "Ataots",
    "DiscoveredDrd",
    "DocelLog",
    "GroundTruthSpec",
    "LearnerConfig",
    "MiningConfig",
    "PublicationParams",
    "ShiftIndex",
    "ShippingParams",
    "TraceSet",
    "ValidationReport",
    "build_predictive_model",
    "build_shift_index",
    "candidate_variables",
    "correlate",
    "deduplicate_drds",
    "drd_to_dot",
    "drd_to_json",
    "encode_features",
    "enumerate_ataots",
    "evaluate_accuracy",
    "find_input_models",
    "find_input_variables",
    "generate_publication_log",
    "generate_shipping_log",
    "ground_truth",
    "mine_dmn_models",
    "object_trace",
    "parse_docel",
    "related_objects",
    "rules_to_json",
    "traces_with_shift",
    "train_decision_tree",
    "train_random_forest",
    "tree_to_dot",
    "tree_to_rules",
    "validate_log",
    "write_docel",
]
