"""Study pipeline: ingestion, filtering, clone mapping, validation, stats."""

from .clones import (
    ALL,
    DISSEMINATOR,
    SOURCE,
    build_contract_index,
    classify_links,
    map_clones,
)
from .filtering import (
    DedupResult,
    MissingKeywordFile,
    dedup,
    filter_solidity,
    load_keywords,
    strip_comments,
)
from .records import (
    CONTRACTS,
    SNIPPETS,
    CloneLink,
    ContractRecord,
    CorrelationResult,
    IngestResult,
    IoError,
    SchemaError,
    SnippetRecord,
    ingest,
    parse_timestamp,
)
from .report import report_json, report_text
from .stats import DegenerateSample, average_ranks, spearman
from .study import StudyConfig, StudyResult, run_study
from .validate import PairValidation, ValidationReport, validate

__all__ = [
    "ALL",
    "CONTRACTS",
    "CloneLink",
    "ContractRecord",
    "CorrelationResult",
    "DISSEMINATOR",
    "DedupResult",
    "DegenerateSample",
    "IngestResult",
    "IoError",
    "MissingKeywordFile",
    "PairValidation",
    "SNIPPETS",
    "SOURCE",
    "SchemaError",
    "SnippetRecord",
    "StudyConfig",
    "StudyResult",
    "ValidationReport",
    "average_ranks",
    "build_contract_index",
    "classify_links",
    "dedup",
    "filter_solidity",
    "ingest",
    "load_keywords",
    "map_clones",
    "parse_timestamp",
    "report_json",
    "report_text",
    "run_study",
    "spearman",
    "strip_comments",
    "validate",
]
