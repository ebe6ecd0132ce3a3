"""jurysim: weighted majority rules, judge-perceived log-odds weighting,
and deterministic accuracy experiments over independent binary experts."""

from .core import (
    AccuracyEstimate,
    ENUMERATION_CAP,
    Outcome,
    RuleSignature,
    TIE_EPS,
    ZERO_WEIGHT_EPS,
    batch_exact_accuracy,
    count_distinct_rules,
    evaluate_wmr,
    exact_accuracy,
    mc_accuracy,
    rule_signature,
    rules_equivalent,
)
from .errors import (
    ConfigError,
    DomainError,
    EnumerationCapError,
    JurysimError,
    LengthMismatchError,
)
from .experiments import (
    PartitionConfig,
    ResultTable,
    SweepConfig,
    default_judge_counts,
    default_judge_grid,
    distribution_sweep,
    fixed_expert_sweep,
    partition_experiment,
)
from .sampling import (
    DistributionSpec,
    SeedSpec,
    TruncExp,
    TruncNormal,
    Uniform,
    parse_distribution,
    sample,
)
from .weighting import (
    ThresholdResult,
    WeightingMode,
    find_optimality_threshold,
    geometric_mean_odds,
    judge_weights,
    log_odds,
    optimal_weights,
    panel_weights,
    panel_weights_from_competences,
    perceived_competence,
    weight_error_under_bias,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyEstimate",
    "ConfigError",
    "DistributionSpec",
    "DomainError",
    "ENUMERATION_CAP",
    "EnumerationCapError",
    "JurysimError",
    "LengthMismatchError",
    "Outcome",
    "PartitionConfig",
    "ResultTable",
    "RuleSignature",
    "SeedSpec",
    "SweepConfig",
    "ThresholdResult",
    "TIE_EPS",
    "TruncExp",
    "TruncNormal",
    "Uniform",
    "WeightingMode",
    "ZERO_WEIGHT_EPS",
    "batch_exact_accuracy",
    "count_distinct_rules",
    "default_judge_counts",
    "default_judge_grid",
    "distribution_sweep",
    "evaluate_wmr",
    "exact_accuracy",
    "find_optimality_threshold",
    "fixed_expert_sweep",
    "geometric_mean_odds",
    "judge_weights",
    "log_odds",
    "mc_accuracy",
    "optimal_weights",
    "panel_weights",
    "panel_weights_from_competences",
    "parse_distribution",
    "partition_experiment",
    "perceived_competence",
    "rule_signature",
    "rules_equivalent",
    "sample",
    "weight_error_under_bias",
    "__version__",
]
