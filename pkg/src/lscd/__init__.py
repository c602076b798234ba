"""Lexical semantic change detection between two diachronic corpora.

Builds per-period vector spaces (count, PPMI, SGNS), places them into a
common coordinate system (column intersection, orthogonal Procrustes,
vector initialization, word injection, KNN second-order vectors), scores
target words by degree of change (cosine distance, Jensen-Shannon
distance, frequency difference) and evaluates rankings against a gold
standard with Spearman's rho.
"""

__version__ = "0.1.0"

from .align import (
    AlignedPair,
    OpOptions,
    column_intersection,
    knn_local_neighborhood,
    orthogonal_procrustes,
    vector_initialization_align,
    word_injection_merge,
    word_injection_pair,
)
from .config import PipelineConfig, validate_config
from .corpus import (
    TokenizedCorpus,
    Vocabulary,
    build_vocabulary,
    load_corpus,
    load_targets,
    normalized_frequency,
    subsample,
)
from .errors import (
    AlignmentError,
    ConfigError,
    DegenerateDistributionError,
    EmptySpaceError,
    EvaluationError,
    FormatError,
    LscdError,
    MissingWordError,
    NumericalError,
    ParameterError,
    UndefinedDistanceError,
)
from .evaluation import (
    EvalReport,
    GoldRanking,
    Leaderboard,
    SystemInfo,
    average_ranks,
    leaderboard,
    load_gold,
    spearman,
)
from .measures import (
    ChangeRanking,
    cosine_distance,
    frequency_difference,
    jensen_shannon_distance,
    rank_targets,
)
from .pipeline import RunResult, build_space, run_pipeline
from .sgns import (
    HAVE_COMPILED_KERNEL,
    SgnsHyperparameters,
    default_backend,
    train_sgns,
)
from .spaces import (
    VectorSpace,
    apply_context_selection,
    binarize,
    build_count_matrix,
    ppmi_transform,
    tfidf_select_contexts,
)

__all__ = [name for name in dir() if not name.startswith("_")]
