"""Detector registry and scan driver.

Runs the whole catalog (or a selection) over one program graph under
the budget ladder and flattens pattern rows into findings. One finding
per (detector, reported node); a detector backed by several patterns
still reports each node once.
"""

import re
from dataclasses import dataclass, field

from ..graphquery import DEFAULT_LADDER, DEFAULT_WALL_CLOCK_LIMIT, analyze_with_budget
from . import catalog

DASP_ACCESS_CONTROL = "Access Control"
DASP_ARITHMETIC = "Arithmetic"
DASP_BAD_RANDOMNESS = "Bad Randomness"
DASP_DENIAL_OF_SERVICE = "Denial of Service"
DASP_FRONT_RUNNING = "Front Running"
DASP_REENTRANCY = "Reentrancy"
DASP_SHORT_ADDRESSES = "Short Addresses"
DASP_TIME_MANIPULATION = "Time Manipulation"
DASP_UNCHECKED_CALLS = "Unchecked Low Level Calls"
DASP_UNKNOWN_UNKNOWNS = "Unknown Unknowns"


@dataclass(frozen=True)
class Detector:
    id: str
    title: str
    category: str
    report: str                 # pattern variable that names the finding
    build: object               # options dict -> list of Pattern


DETECTORS = (
    Detector("access-control-state-write",
             "state write reachable without ownership check",
             DASP_ACCESS_CONTROL, "entry", catalog.access_control_state_write),
    Detector("access-control-selfdestruct",
             "unprotected selfdestruct",
             DASP_ACCESS_CONTROL, "c", catalog.access_control_selfdestruct),
    Detector("short-address-call",
             "transfer amount taken from the final, padding-prone argument",
             DASP_SHORT_ADDRESSES, "c", catalog.short_address_call),
    Detector("short-address-state",
             "state write fed by the final, padding-prone argument",
             DASP_SHORT_ADDRESSES, "ad", catalog.short_address_state),
    Detector("bad-randomness",
             "block properties used as entropy",
             DASP_BAD_RANDOMNESS, "r", catalog.bad_randomness),
    Detector("dos-blocking-call",
             "failing transfer blocks later transfers",
             DASP_DENIAL_OF_SERVICE, "c", catalog.dos_blocking_call),
    Detector("dos-blocking-state",
             "failing transfer blocks a state write",
             DASP_DENIAL_OF_SERVICE, "c", catalog.dos_blocking_state),
    Detector("unchecked-return",
             "low-level call result never inspected",
             DASP_UNCHECKED_CALLS, "c", catalog.unchecked_return),
    Detector("dos-gas-loop",
             "unbounded loop doing gas-heavy work",
             DASP_DENIAL_OF_SERVICE, "b", catalog.dos_gas_loop),
    Detector("default-proxy-delegate",
             "fallback delegates raw call data",
             DASP_ACCESS_CONTROL, "c", catalog.default_proxy_delegate),
    Detector("dos-empty-collection",
             "payout collection can be reset",
             DASP_DENIAL_OF_SERVICE, "b", catalog.dos_empty_collection),
    Detector("front-running",
             "first caller claims a slot or payout",
             DASP_FRONT_RUNNING, "int", catalog.front_running),
    Detector("local-struct-write",
             "write through an uninitialized storage local",
             DASP_UNKNOWN_UNKNOWNS, "v", catalog.local_struct_write),
    Detector("over-underflow",
             "unchecked arithmetic on external input",
             DASP_ARITHMETIC, "b", catalog.over_underflow),
    Detector("reentrancy",
             "state settled only after an external call",
             DASP_REENTRANCY, "c", catalog.reentrancy),
    Detector("time-manipulation",
             "timestamp steers value-relevant control flow",
             DASP_TIME_MANIPULATION, "r", catalog.time_manipulation),
    Detector("tx-origin",
             "tx.origin used for authorization",
             DASP_ACCESS_CONTROL, "n", catalog.tx_origin),
)

_BY_ID = {d.id: d for d in DETECTORS}


def detector_ids():
    return [d.id for d in DETECTORS]


def get_detector(detector_id):
    try:
        return _BY_ID[detector_id]
    except KeyError:
        raise KeyError("unknown detector %r" % detector_id) from None


@dataclass(frozen=True)
class Finding:
    detector: str
    category: str
    node_id: int
    line: int
    col: int
    code: str
    source_id: str = ""

    def to_dict(self):
        return {"detector": self.detector, "category": self.category,
                "nodeId": self.node_id, "line": self.line, "col": self.col,
                "code": self.code, "sourceId": self.source_id}


@dataclass
class ScanReport:
    findings: list = field(default_factory=list)
    complete: bool = True

    def by_detector(self):
        out = {}
        for f in self.findings:
            out.setdefault(f.detector, []).append(f)
        return out

    def to_dict(self):
        return {"complete": self.complete,
                "findings": [f.to_dict() for f in self.findings]}


_VERSION_DIGITS = re.compile(r"\d+")


def declared_version(graph):
    """(major, minor) of the first solidity version pragma, or None.

    Pragma text keeps the tokenizer's spacing ('solidity ^ 0.8 .4'), so
    the version is recovered from the digit runs rather than the shape.
    """
    for pragma in getattr(graph, "pragmas", ()):
        if not pragma.startswith("solidity"):
            continue
        digits = _VERSION_DIGITS.findall(pragma)
        if len(digits) >= 2:
            return int(digits[0]), int(digits[1])
    return None


def _build_patterns(detectors, options):
    patterns = []
    owner = {}
    for det in detectors:
        built = det.build(options)
        for i, pattern in enumerate(built):
            if len(built) > 1:
                pattern.name = "%s/%d" % (det.id, i + 1)
            else:
                pattern.name = det.id
            owner[pattern.name] = det
            patterns.append(pattern)
    return patterns, owner


def scan(graph, detector_ids=None, ladder=DEFAULT_LADDER,
         wall_clock_limit=DEFAULT_WALL_CLOCK_LIMIT, clock=None,
         loop_bound=catalog.DEFAULT_LOOP_BOUND,
         suppress_checked_arithmetic=True):
    """Run detectors against a program graph and return a ScanReport.

    `suppress_checked_arithmetic` drops the over/underflow detector on
    sources that declare a compiler version with checked arithmetic
    built in (0.8 and later).
    """
    selected = [get_detector(i) for i in detector_ids] if detector_ids \
        else list(DETECTORS)
    if suppress_checked_arithmetic:
        version = declared_version(graph)
        if version is not None and version >= (0, 8):
            selected = [d for d in selected if d.id != "over-underflow"]

    patterns, owner = _build_patterns(selected, {"loop_bound": loop_bound})
    results, complete = analyze_with_budget(
        graph, patterns, ladder=ladder,
        wall_clock_limit=wall_clock_limit, clock=clock)

    seen = set()
    findings = []
    for pattern in patterns:
        det = owner[pattern.name]
        for row in results[pattern.name]:
            node_id = row.get(det.report)
            if node_id is None or (det.id, node_id) in seen:
                continue
            seen.add((det.id, node_id))
            node = graph.node(node_id)
            findings.append(Finding(
                detector=det.id, category=det.category, node_id=node_id,
                line=node.properties.get("line", 0),
                col=node.properties.get("col", 0),
                code=node.properties.get("code", ""),
                source_id=graph.source_id))
    findings.sort(key=lambda f: (f.line, f.col, f.node_id))
    return ScanReport(findings=findings, complete=complete)
