"""Clone detection: normalize, tokenize, fingerprint, index, match."""

from .fingerprint import (
    ALPHABET,
    EmptyFingerprint,
    Fingerprint,
    fingerprint,
    fingerprint_source,
    read_fingerprints,
    token_char,
    token_hash,
    write_fingerprints,
)
from .index import (
    DEFAULT_EPSILON_THRESHOLD,
    DEFAULT_ETA,
    DEFAULT_NGRAM,
    STUDY_EPSILON_THRESHOLD,
    CloneParams,
    DuplicateId,
    MatchResult,
    MissingId,
    NgramIndex,
    StorageError,
    match,
    ngrams,
)
from .normalize import (
    SEGMENT_CONTRACT,
    SEGMENT_FUNCTION,
    Segment,
    normalize,
    split_tokens,
    tokenize_for_fingerprint,
)
from .similarity import EmptyInput, delta, epsilon, levenshtein

__all__ = [
    "ALPHABET",
    "CloneParams",
    "DEFAULT_EPSILON_THRESHOLD",
    "DEFAULT_ETA",
    "DEFAULT_NGRAM",
    "DuplicateId",
    "EmptyFingerprint",
    "EmptyInput",
    "Fingerprint",
    "MatchResult",
    "MissingId",
    "NgramIndex",
    "STUDY_EPSILON_THRESHOLD",
    "Segment",
    "SEGMENT_CONTRACT",
    "SEGMENT_FUNCTION",
    "StorageError",
    "delta",
    "epsilon",
    "fingerprint",
    "fingerprint_source",
    "levenshtein",
    "match",
    "ngrams",
    "normalize",
    "read_fingerprints",
    "split_tokens",
    "token_char",
    "token_hash",
    "write_fingerprints",
]
