"""Grammatical error detection for verb usage against a collostruction database."""

from .data import GedInstance, load_ged_dataset, resolve_target, save_ged_dataset
from .index import CollostructionIndex, build_index, heuristic_search
from .matching import (
    Alignment,
    FeatureVector,
    MatchScore,
    MatchWeights,
    align,
    asym_similarities,
    coverage_density,
    extract_features,
    fuzzy_node_sim,
    select_top,
)
from .classifier import (
    ClassifierParams,
    EvalReport,
    TrainConfig,
    Verdict,
    classify,
    evaluate,
    train,
)

__all__ = [
    "GedInstance",
    "load_ged_dataset",
    "save_ged_dataset",
    "resolve_target",
    "CollostructionIndex",
    "build_index",
    "heuristic_search",
    "Alignment",
    "FeatureVector",
    "MatchScore",
    "MatchWeights",
    "align",
    "asym_similarities",
    "coverage_density",
    "extract_features",
    "fuzzy_node_sim",
    "select_top",
    "ClassifierParams",
    "EvalReport",
    "TrainConfig",
    "Verdict",
    "classify",
    "evaluate",
    "train",
]
