"""Detector tests over the fixture corpus plus runner behavior."""

import pytest

import detector_corpus
from snipscan.cpg import build_cpg
from snipscan.detectors import DETECTORS, detector_ids, get_detector, scan
from snipscan.parser import parse_source


def build(source):
    return build_cpg(parse_source(source))


class TestCatalogShape:
    def test_seventeen_detectors(self):
        assert len(DETECTORS) == 17

    def test_every_detector_has_a_fixture_pair(self):
        assert sorted(detector_corpus.FIXTURES) == sorted(detector_ids())

    def test_ids_unique(self):
        ids = detector_ids()
        assert len(ids) == len(set(ids))

    def test_lookup_unknown_id(self):
        with pytest.raises(KeyError):
            get_detector("no-such-detector")


@pytest.mark.parametrize("detector_id", sorted(detector_corpus.FIXTURES))
class TestFixturePairs:
    def test_positive_fires_once(self, detector_id):
        positive, _ = detector_corpus.FIXTURES[detector_id]
        report = scan(build(positive), detector_ids=[detector_id])
        assert report.complete
        assert [f.detector for f in report.findings] == [detector_id]

    def test_mitigated_twin_is_silent(self, detector_id):
        _, twin = detector_corpus.FIXTURES[detector_id]
        report = scan(build(twin), detector_ids=[detector_id])
        assert report.complete
        assert report.findings == []


class TestDelegateSnippet:
    """The unguarded fallback-delegate pair exercises proxy dispatch."""

    def test_positive_text_is_the_known_one_liner(self):
        positive, _ = detector_corpus.FIXTURES["default-proxy-delegate"]
        assert positive == "function() {lib.delegatecall(msg.data);}"

    def test_twin_guards_on_calldata_length(self):
        _, twin = detector_corpus.FIXTURES["default-proxy-delegate"]
        assert "msg.data.length" in twin


class TestRunnerBehavior:
    def test_findings_sorted_by_position(self):
        source = """contract Two {
  address owner;
  function a() public { require(tx.origin == owner); }
  function b() public { require(tx.origin == owner); }
}"""
        report = scan(build(source), detector_ids=["tx-origin"])
        lines = [f.line for f in report.findings]
        assert lines == sorted(lines)
        assert len(report.findings) == 2

    def test_duplicate_rows_collapse_to_one_finding(self):
        # both arms of the randomness pattern can hit the same call site
        positive, _ = detector_corpus.FIXTURES["bad-randomness"]
        report = scan(build(positive), detector_ids=["bad-randomness"])
        assert len(report.findings) == 1

    def test_detector_filter_restricts_output(self):
        positive, _ = detector_corpus.FIXTURES["reentrancy"]
        graph = build(positive)
        scoped = scan(graph, detector_ids=["tx-origin"])
        assert scoped.findings == []

    def test_categories_are_dasp_names(self):
        categories = {d.category for d in DETECTORS}
        assert "Reentrancy" in categories
        assert "Access Control" in categories
        assert "Front Running" in categories

    def test_finding_carries_source_position(self):
        positive, _ = detector_corpus.FIXTURES["tx-origin"]
        report = scan(build(positive), detector_ids=["tx-origin"])
        finding = report.findings[0]
        assert finding.line > 0 and finding.col > 0
        assert "tx.origin" in finding.code


class TestCheckedArithmetic:
    UNGUARDED = """contract Counter {
  uint total;
  function add(uint amount) public {
    total += amount;
  }
}"""

    def test_flagged_without_version_pragma(self):
        report = scan(build(self.UNGUARDED), detector_ids=["over-underflow"])
        assert len(report.findings) == 1

    def test_suppressed_on_checked_compiler(self):
        source = "pragma solidity ^0.8.4;\n" + self.UNGUARDED
        report = scan(build(source), detector_ids=["over-underflow"])
        assert report.findings == []

    def test_suppression_can_be_disabled(self):
        source = "pragma solidity ^0.8.4;\n" + self.UNGUARDED
        report = scan(build(source), detector_ids=["over-underflow"],
                      suppress_checked_arithmetic=False)
        assert len(report.findings) == 1

    def test_old_pragma_still_flagged(self):
        source = "pragma solidity ^0.5.0;\n" + self.UNGUARDED
        report = scan(build(source), detector_ids=["over-underflow"])
        assert len(report.findings) == 1


class TestBudgetSurface:
    def test_expired_clock_marks_report_incomplete(self):
        positive, _ = detector_corpus.FIXTURES["reentrancy"]
        graph = build(positive)
        ticks = iter(range(0, 100_000_000, 1_000_000))
        report = scan(graph, detector_ids=["reentrancy"],
                      wall_clock_limit=0.5, clock=lambda: float(next(ticks)))
        assert not report.complete
