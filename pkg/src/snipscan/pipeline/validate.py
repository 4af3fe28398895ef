"""Re-checking linked contracts for the snippet's own vulnerabilities.

A clone link only says the code looks alike. Validation parses the
contract, builds its graph, and runs exactly the detectors that fired
on the snippet; a hit means the vulnerability survived whatever edits
the contract author made. Contracts that resist analysis are recorded
as failures and never counted as vulnerable.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from ..cpg import build_cpg
from ..detectors import scan
from ..graphquery import DEFAULT_LADDER, DEFAULT_WALL_CLOCK_LIMIT
from ..parser import ParseError, parse_source


@dataclass(frozen=True)
class PairValidation:
    snippet_id: str
    contract_id: str
    temporal_class: str
    detector_ids: tuple
    confirmed: tuple  # detector ids that fired on the contract
    complete: bool    # False when the budget ladder ran dry

    @property
    def vulnerable(self):
        return bool(self.confirmed)


@dataclass
class ValidationReport:
    pairs: list = field(default_factory=list)
    failures: list = field(default_factory=list)  # (contract_id, reason)

    @property
    def vulnerable_contracts(self):
        return sorted({p.contract_id for p in self.pairs if p.vulnerable})

    @property
    def vulnerable_snippets(self):
        return sorted({p.snippet_id for p in self.pairs if p.vulnerable})

    def to_dict(self):
        return {
            "pairs": [
                {
                    "snippetId": p.snippet_id,
                    "contractId": p.contract_id,
                    "temporalClass": p.temporal_class,
                    "detectors": list(p.detector_ids),
                    "confirmed": list(p.confirmed),
                    "complete": p.complete,
                }
                for p in self.pairs
            ],
            "failures": [
                {"contractId": cid, "reason": reason}
                for cid, reason in self.failures
            ],
            "vulnerableContracts": self.vulnerable_contracts,
            "vulnerableSnippets": self.vulnerable_snippets,
        }


def _run_one(task):
    """Worker: analyze one contract against one detector set."""
    key, code, detector_ids, ladder, wall_clock_limit = task
    try:
        graph = build_cpg(parse_source(code))
        report = scan(graph, detector_ids=list(detector_ids), ladder=ladder,
                      wall_clock_limit=wall_clock_limit)
    except ParseError as err:
        return key, None, False, str(err)
    confirmed = tuple(sorted({f.detector for f in report.findings}))
    return key, confirmed, report.complete, None


def validate(links, contracts_by_id, detectors_of_snippet,
             ladder=DEFAULT_LADDER,
             wall_clock_limit=DEFAULT_WALL_CLOCK_LIMIT,
             jobs=1):
    """Validate every link whose snippet has known detector hits.

    detectors_of_snippet maps snippet id to the detector ids that fired
    on it; links without an entry are skipped (nothing to confirm).
    Analysis is restricted to those ids, so validation can never
    introduce a finding of a different kind. Each distinct
    (contract, detector set) combination is analyzed once, in parallel
    when jobs > 1; output order follows the input links either way.
    """
    report = ValidationReport()
    tasks = {}
    rows = []
    for link in links:
        wanted = tuple(sorted(detectors_of_snippet.get(link.snippet_id, ())))
        if not wanted:
            continue
        contract = contracts_by_id.get(link.contract_id)
        if contract is None:
            report.failures.append((link.contract_id, "contract record missing"))
            continue
        key = (link.contract_id, wanted)
        tasks.setdefault(
            key, (key, contract.code, wanted, ladder, wall_clock_limit))
        rows.append((link, key))

    outcomes = {}
    ordered = [tasks[key] for key in sorted(tasks)]
    if jobs > 1 and len(ordered) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for key, confirmed, complete, error in pool.map(_run_one, ordered):
                outcomes[key] = (confirmed, complete, error)
    else:
        for task in ordered:
            key, confirmed, complete, error = _run_one(task)
            outcomes[key] = (confirmed, complete, error)

    failed = set()
    for link, key in rows:
        confirmed, complete, error = outcomes[key]
        if error is not None:
            if key not in failed:
                failed.add(key)
                report.failures.append((link.contract_id, error))
            continue
        report.pairs.append(PairValidation(
            link.snippet_id, link.contract_id, link.temporal_class,
            key[1], confirmed, complete))
    return report
