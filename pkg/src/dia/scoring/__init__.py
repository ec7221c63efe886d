from .bank import (
    BalancingTerms,
    FeatureBank,
    anomaly_score,
    anomaly_score_components,
    balancing_terms,
    build_feature_bank,
    combine_scores,
    score_cls,
    score_con,
    score_con_batch,
)
from .metrics import auroc
from .report import ScoreReport

__all__ = [
    "BalancingTerms",
    "FeatureBank",
    "ScoreReport",
    "anomaly_score",
    "anomaly_score_components",
    "auroc",
    "balancing_terms",
    "build_feature_bank",
    "combine_scores",
    "score_cls",
    "score_con",
    "score_con_batch",
]
