"""Interpretable clustering of 2D-embedded data via information-guided dendrogram cuts."""

from .model import (
    AttributeType,
    BiclusterPattern,
    BooleanStat,
    ClusteringSolution,
    Dataset,
    Embedding,
    Hyperparameters,
    Linkage,
    PriorModel,
    RealStat,
    fit_cluster_statistics,
    fit_prior,
)
from .infotheory import (
    Score,
    description_complexity,
    kl_bernoulli,
    kl_gaussian,
    pattern_information,
    subjective_interestingness,
)
from .hierarchy import (
    CutSet,
    Dendrogram,
    build_dendrogram,
    candidate_merges,
    candidate_splits,
    clusters_from_cutset,
)
from .search import (
    NodeStatistics,
    SearchBudget,
    SearchTrace,
    evaluate_cutset,
    greedy_search,
    refine,
    select_attributes,
)
from .ingestion import (
    IngestionError,
    SchemaSpec,
    Session,
    build_session,
    load_dataset,
    load_embedding,
    load_solution,
    pca_embedding,
    save_solution,
)

__all__ = [
    "AttributeType",
    "BiclusterPattern",
    "BooleanStat",
    "ClusteringSolution",
    "CutSet",
    "Dataset",
    "Dendrogram",
    "Embedding",
    "Hyperparameters",
    "IngestionError",
    "Linkage",
    "NodeStatistics",
    "PriorModel",
    "RealStat",
    "SchemaSpec",
    "Score",
    "SearchBudget",
    "SearchTrace",
    "Session",
    "build_dendrogram",
    "build_session",
    "candidate_merges",
    "candidate_splits",
    "clusters_from_cutset",
    "description_complexity",
    "evaluate_cutset",
    "fit_cluster_statistics",
    "fit_prior",
    "greedy_search",
    "kl_bernoulli",
    "kl_gaussian",
    "load_dataset",
    "load_embedding",
    "load_solution",
    "pattern_information",
    "pca_embedding",
    "refine",
    "save_solution",
    "select_attributes",
    "subjective_interestingness",
]

__version__ = "0.1.0"
