"""Order preserving hierarchical agglomerative clustering."""

from .clustering import (ClusteringResult, NFoldResult, classical_hc, enumerate_outcomes,
                         exact_opt, hc_plus, idempotency_check, nfold_approximation,
                         ordered_agglomerate, ultrametric_fit)
from .dendrogram import (DEFAULT_EPSILON, Merge, MergeHistory, PartialDendrogram,
                         complete_ultrametric, dendrogram, kappa, psi)
from .dissimilarity import DissimilarityMatrix, OrderedSpace, linkage, pnorm_distance
from .errors import OrderClustError, SearchBudgetExceeded
from .metrics import ari, best_cut_by_ari, diff_variance, loops, normalized_fits, oari
from .partition import LabeledPartition
from .poset import StrictPoset, base_space_projection, induced_quotient, transitive_closure

__version__ = "0.1.0"

__all__ = [
    "ClusteringResult",
    "NFoldResult",
    "classical_hc",
    "enumerate_outcomes",
    "exact_opt",
    "hc_plus",
    "idempotency_check",
    "nfold_approximation",
    "ordered_agglomerate",
    "ultrametric_fit",
    "DEFAULT_EPSILON",
    "Merge",
    "MergeHistory",
    "PartialDendrogram",
    "complete_ultrametric",
    "dendrogram",
    "kappa",
    "psi",
    "DissimilarityMatrix",
    "OrderedSpace",
    "linkage",
    "pnorm_distance",
    "OrderClustError",
    "SearchBudgetExceeded",
    "ari",
    "best_cut_by_ari",
    "diff_variance",
    "loops",
    "normalized_fits",
    "oari",
    "LabeledPartition",
    "StrictPoset",
    "base_space_projection",
    "induced_quotient",
    "transitive_closure",
]
