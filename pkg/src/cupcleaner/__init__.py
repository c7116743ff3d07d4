"""cupcleaner: quality scoring and tail-trim cleaning for comment-updating datasets."""

from .anchor import (
    AnchorCandidate,
    AnchorConfig,
    AnchorResult,
    DistributionStats,
    area_changed,
    distribution_stats,
    filter_by_anchor,
    search_anchor,
)
from .corpus import Dataset, Reject, Sample, load_dataset, write_dataset
from .embedding import (
    CHANNELS,
    CODE_TOKEN,
    SENTENCE,
    EmbeddingCache,
    HashEmbedder,
    ServiceEmbedder,
    cached_embed,
    cosine,
)
from .errors import (
    CupCleanerError,
    EmbedError,
    InputError,
    ProtocolError,
    ProviderError,
    TransportError,
)
from .pipeline import CleanConfig, clean, report_render, score_only, subsample
from .scoring import ScoreBreakdown, score_dataset, score_sample
from .textdiff import DiffResult, lcs_len, overlap_score, tokenize, word_diff

__version__ = "0.1.0"

__all__ = [
    "AnchorCandidate",
    "AnchorConfig",
    "AnchorResult",
    "CHANNELS",
    "CODE_TOKEN",
    "CleanConfig",
    "CupCleanerError",
    "Dataset",
    "DiffResult",
    "DistributionStats",
    "EmbedError",
    "EmbeddingCache",
    "HashEmbedder",
    "InputError",
    "ProtocolError",
    "ProviderError",
    "Reject",
    "SENTENCE",
    "Sample",
    "ScoreBreakdown",
    "ServiceEmbedder",
    "TransportError",
    "area_changed",
    "cached_embed",
    "clean",
    "cosine",
    "distribution_stats",
    "filter_by_anchor",
    "lcs_len",
    "load_dataset",
    "overlap_score",
    "report_render",
    "score_dataset",
    "score_only",
    "score_sample",
    "search_anchor",
    "subsample",
    "tokenize",
    "word_diff",
    "write_dataset",
    "__version__",
]
