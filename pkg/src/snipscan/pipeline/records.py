"""Corpus record types and JSON-lines ingestion.

Two input corpora exist: Q&A snippets and deployed contracts. Both
arrive as JSON lines. A line that does not decode, or decodes to a
record violating the schema, is skipped and reported with its line
number; one bad line never aborts an ingest.

Wire field names are camelCase (postId, createdAt, deployedAt,
compilerVersion); attribute names follow Python convention.
"""

import json
import re
from dataclasses import dataclass
from datetime import datetime, timezone

SNIPPETS = "snippets"
CONTRACTS = "contracts"

_ADDRESS = re.compile(r"^0x[0-9a-fA-F]{40}$")


class IoError(OSError):
    """Corpus file missing or unreadable."""


class SchemaError(ValueError):
    """Unknown corpus kind requested."""


@dataclass(frozen=True)
class SnippetRecord:
    id: str
    site: str
    post_id: str
    created_at: datetime
    views: int
    code: str


@dataclass(frozen=True)
class ContractRecord:
    id: str
    address: str
    deployed_at: datetime
    compiler_version: str
    code: str


@dataclass(frozen=True)
class CloneLink:
    snippet_id: str
    contract_id: str
    epsilon: float
    temporal_class: str  # "All" | "Disseminator" | "Source"

    @property
    def is_disseminator(self):
        return self.temporal_class in ("Disseminator", "Source")

    @property
    def is_source(self):
        return self.temporal_class == "Source"


@dataclass(frozen=True)
class CorrelationResult:
    n: int
    rho: float
    p_value: float
    variable_pair: str
    permutation_p_value: float = None


@dataclass(frozen=True)
class IngestResult:
    records: tuple
    diagnostics: tuple

    @property
    def skipped(self):
        return len(self.diagnostics)


def parse_timestamp(value):
    """UTC datetime from an ISO 8601 string or epoch seconds."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return datetime.fromtimestamp(value, tz=timezone.utc)
    if isinstance(value, str):
        text = value.strip()
        if text.endswith(("Z", "z")):
            text = text[:-1] + "+00:00"
        moment = datetime.fromisoformat(text)
        if moment.tzinfo is None:
            moment = moment.replace(tzinfo=timezone.utc)
        return moment.astimezone(timezone.utc)
    raise ValueError("not a timestamp: %r" % (value,))


def _require(record, name, kind=str):
    value = record.get(name)
    if not isinstance(value, kind) or (kind is str and not value):
        raise ValueError("field %r missing or invalid" % name)
    return value


def _snippet_from(record):
    views = record.get("views")
    if not isinstance(views, int) or isinstance(views, bool) or views < 0:
        raise ValueError("field 'views' must be a non-negative integer")
    return SnippetRecord(
        id=_require(record, "id"),
        site=record.get("site", ""),
        post_id=str(record.get("postId", "")),
        created_at=parse_timestamp(record.get("createdAt")),
        views=views,
        code=_require(record, "code"),
    )


def _contract_from(record):
    address = record.get("address")
    if address is not None and not _ADDRESS.match(str(address)):
        raise ValueError("field 'address' must be 0x plus 40 hex digits")
    return ContractRecord(
        id=_require(record, "id"),
        address=address or "",
        deployed_at=parse_timestamp(record.get("deployedAt")),
        compiler_version=record.get("compilerVersion") or "",
        code=_require(record, "code"),
    )


_LOADERS = {SNIPPETS: _snippet_from, CONTRACTS: _contract_from}


def ingest(path, kind):
    """Read a JSON-lines corpus, skipping malformed lines.

    Returns an IngestResult whose diagnostics list one entry per
    skipped line, each prefixed with the 1-based line number.
    """
    loader = _LOADERS.get(kind)
    if loader is None:
        raise SchemaError("unknown corpus kind %r" % (kind,))
    try:
        with open(path, "r", encoding="utf-8") as source:
            lines = source.readlines()
    except OSError as err:
        raise IoError("cannot read %s corpus at %s: %s" % (kind, path, err))
    records = []
    diagnostics = []
    seen = set()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            payload = json.loads(line)
            if not isinstance(payload, dict):
                raise ValueError("record is not a JSON object")
            record = loader(payload)
            if record.id in seen:
                raise ValueError("duplicate id %r" % record.id)
        except ValueError as err:
            diagnostics.append("line %d: %s" % (lineno, err))
            continue
        seen.add(record.id)
        records.append(record)
    return IngestResult(tuple(records), tuple(diagnostics))
