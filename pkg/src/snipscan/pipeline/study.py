"""End-to-end study: corpora in, funnel counts and correlations out.

The stages mirror how the data narrows: ingest both corpora, keep the
Solidity-looking snippets, drop unparsable ones, collapse comment-level
duplicates, scan what remains, map vulnerable snippets into the
deployed-contract index, validate the time-plausible links, and
correlate views with spread.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from ..clone import CloneParams, NgramIndex, STUDY_EPSILON_THRESHOLD
from ..cpg import build_cpg
from ..detectors import scan
from ..graphquery import DEFAULT_LADDER, DEFAULT_WALL_CLOCK_LIMIT
from ..parser import ParseError, parse_source
from .clones import build_contract_index, map_clones
from .filtering import dedup, filter_solidity, load_keywords
from .records import CONTRACTS, SNIPPETS, ingest
from .stats import DegenerateSample, spearman
from .validate import validate


@dataclass(frozen=True)
class StudyConfig:
    params: CloneParams = CloneParams(
        epsilon_threshold=STUDY_EPSILON_THRESHOLD)
    ladder: tuple = DEFAULT_LADDER
    wall_clock_limit: float = DEFAULT_WALL_CLOCK_LIMIT
    keyword_path: str = None
    detector_ids: tuple = None
    jobs: int = 1
    seed: int = 0
    permutations: int = 0


@dataclass
class StudyResult:
    unique_snippets: list = field(default_factory=list)
    dedup_mapping: dict = field(default_factory=dict)
    findings: dict = field(default_factory=dict)      # snippet id -> tuple
    links: list = field(default_factory=list)
    contracts_by_id: dict = field(default_factory=dict)
    validation: object = None
    correlations: dict = field(default_factory=dict)  # group -> result | str
    diagnostics: list = field(default_factory=list)
    counts: dict = field(default_factory=dict)

    @property
    def vulnerable_ids(self):
        return sorted(sid for sid, hits in self.findings.items() if hits)

    def links_of(self, snippet_id):
        return [l for l in self.links if l.snippet_id == snippet_id]


def _scan_one(task):
    """Worker: scan one snippet source."""
    snippet_id, code, detector_ids, ladder, wall_clock_limit = task
    try:
        graph = build_cpg(parse_source(code))
        report = scan(graph, detector_ids=detector_ids, ladder=ladder,
                      wall_clock_limit=wall_clock_limit)
    except ParseError as err:
        return snippet_id, None, True, str(err)
    return snippet_id, tuple(report.findings), report.complete, None


def _scan_all(snippets, config):
    tasks = [
        (s.id, s.code,
         list(config.detector_ids) if config.detector_ids else None,
         config.ladder, config.wall_clock_limit)
        for s in snippets
    ]
    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_scan_one, tasks))
    else:
        results = [_scan_one(t) for t in tasks]
    return {sid: (findings, complete, error)
            for sid, findings, complete, error in results}


def _correlation_groups(result):
    """(v, nr) samples for the all / disseminator / source groups."""
    by_snippet = {}
    for link in result.links:
        by_snippet.setdefault(link.snippet_id, []).append(link)
    snippets_by_id = {s.id: s for s in result.unique_snippets}
    groups = {"all": [], "disseminator": [], "source": []}
    for sid in result.vulnerable_ids:
        links = by_snippet.get(sid, [])
        if not links:
            continue
        views = snippets_by_id[sid].views
        groups["all"].append((views, len({l.contract_id for l in links})))
        diss = {l.contract_id for l in links if l.is_disseminator}
        if diss:
            groups["disseminator"].append((views, len(diss)))
        if any(l.is_source for l in links):
            groups["source"].append((views, len(diss)))
    return groups


def run_study(snippets_path, contracts_path, config=None):
    config = config or StudyConfig()
    result = StudyResult()

    snippets_in = ingest(snippets_path, SNIPPETS)
    contracts_in = ingest(contracts_path, CONTRACTS)
    for note in snippets_in.diagnostics:
        result.diagnostics.append("snippets: %s" % note)
    for note in contracts_in.diagnostics:
        result.diagnostics.append("contracts: %s" % note)

    keywords = load_keywords(config.keyword_path)
    solidity = filter_solidity(snippets_in.records, keywords=keywords)

    parsable = []
    for snippet in solidity:
        try:
            parse_source(snippet.code)
        except ParseError as err:
            result.diagnostics.append(
                "snippet %s: parse failed: %s" % (snippet.id, err))
            continue
        parsable.append(snippet)

    deduped = dedup(parsable)
    result.unique_snippets = list(deduped.records)
    result.dedup_mapping = dict(deduped.mapping)

    scans = _scan_all(result.unique_snippets, config)
    for sid in sorted(scans):
        findings, complete, error = scans[sid]
        if error is not None:
            result.diagnostics.append("snippet %s: scan failed: %s"
                                      % (sid, error))
            result.findings[sid] = ()
            continue
        if not complete:
            result.diagnostics.append("snippet %s: budget exhausted" % sid)
        result.findings[sid] = findings

    index = NgramIndex(n=config.params.n)
    result.contracts_by_id = build_contract_index(
        contracts_in.records, index,
        on_error=lambda cid, err: result.diagnostics.append(
            "contract %s: not fingerprintable: %s" % (cid, err)))

    vulnerable = [s for s in result.unique_snippets
                  if result.findings.get(s.id)]
    result.links = map_clones(
        vulnerable, index, result.contracts_by_id, config.params,
        on_error=lambda sid, err: result.diagnostics.append(
            "snippet %s: not fingerprintable: %s" % (sid, err)))

    detectors_of = {
        sid: sorted({f.detector for f in hits})
        for sid, hits in result.findings.items() if hits
    }
    checkable = [l for l in result.links if l.is_disseminator]
    result.validation = validate(
        checkable, result.contracts_by_id, detectors_of,
        ladder=config.ladder, wall_clock_limit=config.wall_clock_limit,
        jobs=config.jobs)

    for group, pairs in _correlation_groups(result).items():
        if len(pairs) < 3:
            result.correlations[group] = "skipped: %d samples" % len(pairs)
            continue
        try:
            result.correlations[group] = spearman(
                pairs, permutations=config.permutations, seed=config.seed)
        except DegenerateSample as err:
            result.correlations[group] = "skipped: %s" % err

    result.counts = {
        "ingestedSnippets": len(snippets_in.records),
        "skippedSnippetLines": snippets_in.skipped,
        "ingestedContracts": len(contracts_in.records),
        "skippedContractLines": contracts_in.skipped,
        "solidity": len(solidity),
        "parsable": len(parsable),
    }
    return result
