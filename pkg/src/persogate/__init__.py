"""Toolkit for predicting when search personalization helps.

Computes 37 pre-retrieval predictors over an indexed corpus, evaluates
personalized against original rankings with NDCG, correlates predictors
with the observed gain, and trains per-profile models that decide, per
(query, profile), whether to personalize at all.
"""

from .correlation import (CorrelationSummary, CorrelationTable, kendall,
                          pearson, select_top, spearman, summarize,
                          correlation_table)
from .decision import (DecisionRow, ForestModel, GainReport, categorize,
                       decide, evaluate_kfold, evaluate_loo, gain_report,
                       pct_gain, prepare_rows, run_decision_pipeline,
                       run_with_selection, train_classifier, train_regressor)
from .evaluation import (EvaluationTriplet, aspire_assess, build_triplets,
                         count_by_profile, diff_perso, ndcg_at_k)
from .index import CorpusIndex, Document, TermStats, build_index
from .predictors import (ExpansionPolicy, PredictorVector, PREDICTOR_NAMES,
                         Query, UserProfile, compute_all, cosine_query_profile,
                         expand_query)
from .ranking import PersonalizationStrategy, Ranking, personalize_rerank, rank
from .synthetic import SyntheticData, generate_synthetic_corpus
from .text import NormalizationPipeline, PorterStemmer, tokenize

__version__ = "0.1.0"

__all__ = [
    "CorpusIndex", "CorrelationSummary", "CorrelationTable", "DecisionRow",
    "Document", "EvaluationTriplet", "ExpansionPolicy", "ForestModel",
    "GainReport", "NormalizationPipeline", "PersonalizationStrategy",
    "PorterStemmer", "PredictorVector", "PREDICTOR_NAMES", "Query", "Ranking",
    "SyntheticData", "TermStats", "UserProfile", "aspire_assess",
    "build_index", "build_triplets", "categorize", "compute_all",
    "correlation_table", "cosine_query_profile", "count_by_profile", "decide",
    "diff_perso", "evaluate_kfold", "evaluate_loo", "expand_query",
    "gain_report", "generate_synthetic_corpus", "kendall", "ndcg_at_k",
    "pct_gain", "pearson", "personalize_rerank", "prepare_rows", "rank",
    "run_decision_pipeline", "run_with_selection", "select_top", "spearman",
    "summarize", "tokenize", "train_classifier", "train_regressor",
    "__version__",
]
