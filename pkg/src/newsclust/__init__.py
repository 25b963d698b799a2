"""Group social-media news posts into news-event clusters and measure what
drives engagement: publication timing, promptness and post format."""

from .corpus import (
    Corpus, CorpusError, Post, PostFormat, ReactionCounts, Source, load_corpus,
    reaction_volume,
)
from .eventcluster import (
    NOISE, Cluster, ClusterParams, RecursiveDBSCAN, dbscan, is_oversize,
    materialize_clusters, recursive_dbscan,
)
from .impact import (
    format_stats, performance, promptness_records, promptness_regression,
    publication_profile, reactivity_profile, sn_scores, source_stats, synchronization,
    synchronization_regression,
)
from .insights import detect_omissions, pca_map, reaction_matrix, similarity_matrix
from .linalg import JacobiPCA, jacobi_eigh
from .metricspace import (
    DistanceParams, TimeMode, combined_distance, distance_matrix, pairwise_distances,
    time_distance, word_distance,
)
from .stats import RegressionResult, betainc, ols_regression, t_two_sided_p
from .textfeat import (
    TfidfFeaturizer, TfIdfVector, Vocabulary, build_vocabulary, idf,
    normalize_description, tfidf,
)

__all__ = [
    "Corpus", "CorpusError", "Post", "PostFormat", "ReactionCounts", "Source",
    "load_corpus", "reaction_volume", "NOISE", "Cluster", "ClusterParams",
    "RecursiveDBSCAN", "dbscan", "is_oversize", "materialize_clusters",
    "recursive_dbscan", "format_stats", "performance", "promptness_records",
    "promptness_regression", "publication_profile", "reactivity_profile", "sn_scores",
    "source_stats", "synchronization", "synchronization_regression", "detect_omissions",
    "pca_map", "reaction_matrix", "similarity_matrix", "JacobiPCA", "jacobi_eigh",
    "DistanceParams", "TimeMode", "combined_distance", "distance_matrix",
    "pairwise_distances", "time_distance", "word_distance", "RegressionResult",
    "betainc", "ols_regression", "t_two_sided_p", "TfidfFeaturizer", "TfIdfVector",
    "Vocabulary", "build_vocabulary", "idf", "normalize_description", "tfidf",
]

__version__ = "0.1.0"
