"""Pipeline stage tests: ingest, filter, dedup, clone mapping, validation."""

import json
import random
from datetime import datetime, timedelta, timezone

import pytest

import detector_corpus
import study_corpus
from snipscan.clone import CloneParams, MatchResult, NgramIndex
from snipscan.pipeline import (
    ALL,
    CONTRACTS,
    DISSEMINATOR,
    SNIPPETS,
    SOURCE,
    CloneLink,
    ContractRecord,
    IoError,
    MissingKeywordFile,
    SchemaError,
    SnippetRecord,
    StudyConfig,
    build_contract_index,
    classify_links,
    dedup,
    filter_solidity,
    ingest,
    load_keywords,
    map_clones,
    parse_timestamp,
    report_json,
    report_text,
    run_study,
    validate,
)

UTC = timezone.utc


def snippet(sid, code, created="2020-01-01T00:00:00Z", views=10):
    return SnippetRecord(id=sid, site="site", post_id="1",
                         created_at=parse_timestamp(created),
                         views=views, code=code)


def contract(cid, code, deployed="2021-01-01T00:00:00Z"):
    return ContractRecord(id=cid, address="0x" + "1" * 40,
                          deployed_at=parse_timestamp(deployed),
                          compiler_version="v0.5.17", code=code)


def snippet_line(sid, code, created="2020-01-01T00:00:00Z", views=10):
    return json.dumps({"id": sid, "site": "site", "postId": "1",
                       "createdAt": created, "views": views, "code": code})


class TestIngest:
    def test_reads_valid_lines(self, tmp_path):
        path = tmp_path / "snippets.jsonl"
        path.write_text("\n".join(snippet_line("s%d" % i, "contract A {}")
                                  for i in range(3)) + "\n", encoding="utf-8")
        got = ingest(path, SNIPPETS)
        assert [r.id for r in got.records] == ["s0", "s1", "s2"]
        assert got.diagnostics == ()
        assert got.records[0].created_at.tzinfo is UTC

    def test_malformed_line_skipped_with_line_number(self, tmp_path):
        path = tmp_path / "snippets.jsonl"
        path.write_text(snippet_line("s0", "contract A {}") + "\n"
                        + "{broken\n"
                        + snippet_line("s2", "contract B {}") + "\n",
                        encoding="utf-8")
        got = ingest(path, SNIPPETS)
        assert [r.id for r in got.records] == ["s0", "s2"]
        assert len(got.diagnostics) == 1
        assert got.diagnostics[0].startswith("line 2:")
        assert got.skipped == 1

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("", encoding="utf-8")
        got = ingest(path, SNIPPETS)
        assert got.records == () and got.diagnostics == ()

    def test_blank_lines_ignored(self, tmp_path):
        path = tmp_path / "snippets.jsonl"
        path.write_text("\n\n" + snippet_line("s0", "contract A {}") + "\n\n",
                        encoding="utf-8")
        got = ingest(path, SNIPPETS)
        assert len(got.records) == 1 and got.diagnostics == ()

    def test_duplicate_id_skipped(self, tmp_path):
        path = tmp_path / "snippets.jsonl"
        path.write_text(snippet_line("dup", "contract A {}") + "\n"
                        + snippet_line("dup", "contract B {}") + "\n",
                        encoding="utf-8")
        got = ingest(path, SNIPPETS)
        assert len(got.records) == 1
        assert "duplicate" in got.diagnostics[0]

    def test_bad_views_rejected(self, tmp_path):
        path = tmp_path / "snippets.jsonl"
        rows = [json.dumps({"id": "a", "createdAt": "2020-01-01", "views": -3,
                            "code": "contract A {}"}),
                json.dumps({"id": "b", "createdAt": "2020-01-01",
                            "views": "many", "code": "contract A {}"})]
        path.write_text("\n".join(rows) + "\n", encoding="utf-8")
        got = ingest(path, SNIPPETS)
        assert got.records == () and len(got.diagnostics) == 2

    def test_bad_address_rejected(self, tmp_path):
        path = tmp_path / "contracts.jsonl"
        rows = [json.dumps({"id": "c1", "address": "0x1234",
                            "deployedAt": "2021-01-01",
                            "code": "contract A {}"}),
                json.dumps({"id": "c2", "address": "0x" + "a" * 40,
                            "deployedAt": "2021-01-01",
                            "code": "contract A {}"})]
        path.write_text("\n".join(rows) + "\n", encoding="utf-8")
        got = ingest(path, CONTRACTS)
        assert [r.id for r in got.records] == ["c2"]
        assert "address" in got.diagnostics[0]

    def test_missing_file_raises(self, tmp_path):
        with pytest.raises(IoError):
            ingest(tmp_path / "absent.jsonl", SNIPPETS)

    def test_unknown_kind_raises(self, tmp_path):
        path = tmp_path / "x.jsonl"
        path.write_text("", encoding="utf-8")
        with pytest.raises(SchemaError):
            ingest(path, "recipes")


class TestParseTimestamp:
    def test_iso_zulu(self):
        got = parse_timestamp("2020-06-15T12:30:00Z")
        assert got == datetime(2020, 6, 15, 12, 30, tzinfo=UTC)

    def test_iso_offset_normalized_to_utc(self):
        got = parse_timestamp("2020-06-15T14:30:00+02:00")
        assert got == datetime(2020, 6, 15, 12, 30, tzinfo=UTC)

    def test_naive_string_assumed_utc(self):
        got = parse_timestamp("2020-06-15")
        assert got == datetime(2020, 6, 15, tzinfo=UTC)

    def test_epoch_seconds(self):
        assert parse_timestamp(0) == datetime(1970, 1, 1, tzinfo=UTC)
        assert parse_timestamp(86400.0) == datetime(1970, 1, 2, tzinfo=UTC)

    def test_rejects_bool_and_garbage(self):
        with pytest.raises(ValueError):
            parse_timestamp(True)
        with pytest.raises(ValueError):
            parse_timestamp("not a date")
        with pytest.raises(ValueError):
            parse_timestamp(None)


class TestFilterSolidity:
    def test_keyword_hit_keeps_snippet(self):
        kept = filter_solidity([snippet("s", "pragma solidity ^0.5.0;")])
        assert [s.id for s in kept] == ["s"]

    def test_javascript_dropped(self):
        js = snippet("js", "const x = () => { return 1; };")
        assert filter_solidity([js]) == []

    def test_keywords_match_whole_words_only(self):
        noise = snippet("n", "mycontracts = contractsFactory();")
        assert filter_solidity([noise]) == []

    def test_blank_code_dropped(self):
        assert filter_solidity([snippet("s", "   \n")]) == []

    def test_custom_keyword_file(self, tmp_path):
        path = tmp_path / "words.txt"
        path.write_text("bespoke  # comment\n\n", encoding="utf-8")
        hit = snippet("s", "bespoke thing")
        miss = snippet("t", "pragma solidity ^0.5.0;")
        kept = filter_solidity([hit, miss], keyword_path=path)
        assert [s.id for s in kept] == ["s"]

    def test_missing_keyword_file(self, tmp_path):
        with pytest.raises(MissingKeywordFile):
            load_keywords(tmp_path / "absent.txt")

    def test_empty_keyword_file(self, tmp_path):
        path = tmp_path / "empty.txt"
        path.write_text("# only a comment\n", encoding="utf-8")
        with pytest.raises(MissingKeywordFile):
            load_keywords(path)

    def test_shipped_list_excludes_javascript_words(self):
        words = load_keywords()
        assert "pragma" in words and "mapping" in words
        for shared in ("function", "return", "if", "const", "new"):
            assert shared not in words


def corpus_snippets():
    return [snippet(sid, code, created, views)
            for sid, _, _, created, views, code in study_corpus.SNIPPETS]


def corpus_contracts():
    return [contract(cid, code, deployed)
            for cid, deployed, code in study_corpus.CONTRACTS]


class TestDedup:
    def test_comment_only_copy_collapses(self):
        records = [s for s in corpus_snippets() if s.id in ("s05", "s06")]
        got = dedup(records)
        assert [r.id for r in got.records] == ["s05"]
        assert got.mapping == {"s06": "s05"}
        assert got.survivor_of("s06") == "s05"
        assert got.survivor_of("s05") == "s05"

    def test_whitespace_difference_keeps_both(self):
        a = snippet("a", "contract A { uint x; }")
        b = snippet("b", "contract A {  uint x; }")
        got = dedup([a, b])
        assert [r.id for r in got.records] == ["a", "b"]

    def test_earliest_copy_survives(self):
        late = snippet("late", "contract A {}", created="2020-05-01")
        early = snippet("early", "contract A {}", created="2020-01-01")
        got = dedup([late, early])
        assert [r.id for r in got.records] == ["early"]
        assert got.mapping == {"late": "early"}

    def test_timestamp_tie_broken_by_id(self):
        a = snippet("aaa", "contract A {}")
        b = snippet("bbb", "contract A {}")
        got = dedup([b, a])
        assert [r.id for r in got.records] == ["aaa"]

    def test_input_order_preserved(self):
        records = [snippet("z", "contract Z {}"), snippet("a", "contract A {}")]
        got = dedup(records)
        assert [r.id for r in got.records] == ["z", "a"]


def fake_match(cid):
    return MatchResult(candidate_id=cid, epsilon=95.0, eta_overlap=1.0)


class TestClassifyLinks:
    def setup_method(self):
        self.snippet = snippet("s", "contract A {}", created="2020-06-01")
        self.older = contract("older", "contract A {}", deployed="2020-01-01")
        self.newer = contract("newer", "contract A {}", deployed="2020-12-01")
        self.same = contract("same", "contract A {}", deployed="2020-06-01")
        self.by_id = {c.id: c for c in (self.older, self.newer, self.same)}

    def test_all_newer_is_source(self):
        links = classify_links(self.snippet, [fake_match("newer")], self.by_id)
        assert [(l.contract_id, l.temporal_class) for l in links] == [
            ("newer", SOURCE)]

    def test_mixed_ages_split_disseminator_and_all(self):
        links = classify_links(
            self.snippet, [fake_match("newer"), fake_match("older")], self.by_id)
        assert {(l.contract_id, l.temporal_class) for l in links} == {
            ("newer", DISSEMINATOR), ("older", ALL)}

    def test_equal_timestamp_counts_as_older(self):
        links = classify_links(
            self.snippet, [fake_match("newer"), fake_match("same")], self.by_id)
        classes = {l.contract_id: l.temporal_class for l in links}
        assert classes["same"] == ALL
        assert classes["newer"] == DISSEMINATOR

    def test_no_matches_no_links(self):
        assert classify_links(self.snippet, [], self.by_id) == []

    def test_class_predicates_nest(self):
        link = CloneLink("s", "c", 100.0, SOURCE)
        assert link.is_source and link.is_disseminator
        link = CloneLink("s", "c", 100.0, DISSEMINATOR)
        assert not link.is_source and link.is_disseminator
        link = CloneLink("s", "c", 100.0, ALL)
        assert not link.is_source and not link.is_disseminator

    def test_source_subset_of_disseminator_randomized(self):
        rng = random.Random(1234)
        base = datetime(2020, 1, 1, tzinfo=UTC)
        for _ in range(200):
            posted = base + timedelta(days=rng.randint(0, 365))
            s = SnippetRecord("s", "site", "1", posted, 5, "contract A {}")
            by_id = {}
            matches = []
            for i in range(rng.randint(1, 6)):
                cid = "c%d" % i
                deployed = base + timedelta(days=rng.randint(0, 365))
                by_id[cid] = ContractRecord(cid, "", deployed, "", "x")
                matches.append(fake_match(cid))
            links = classify_links(s, matches, by_id)
            source = {l.contract_id for l in links if l.is_source}
            disseminator = {l.contract_id for l in links if l.is_disseminator}
            assert source <= disseminator


class TestCloneMapping:
    def test_unparsable_contract_reported_and_skipped(self):
        bad = contract("bad", "This is English prose, not a contract.")
        good = contract("good", "contract A { uint x; }")
        errors = []
        index = NgramIndex(n=3)
        by_id = build_contract_index(
            [bad, good], index, on_error=lambda cid, err: errors.append(cid))
        assert errors == ["bad"]
        assert set(by_id) == {"good"}
        assert len(index) == 1

    def test_corpus_links_match_hand_derivation(self):
        index = NgramIndex(n=3)
        by_id = build_contract_index(corpus_contracts(), index)
        assert len(by_id) == len(study_corpus.CONTRACTS)
        vulnerable = [s for s in corpus_snippets()
                      if s.id in study_corpus.EXPECTED_LINKS]
        params = CloneParams(epsilon_threshold=90.0)
        links = map_clones(vulnerable, index, by_id, params)
        got = {(l.snippet_id, l.contract_id): l.temporal_class for l in links}
        expected = {(sid, cid): cls
                    for sid, targets in study_corpus.EXPECTED_LINKS.items()
                    for cid, cls in targets.items()}
        assert got == expected


DELEGATE = detector_corpus.FIXTURES["default-proxy-delegate"]


class TestValidate:
    def test_confirms_vulnerable_clone(self):
        by_id = {"c": contract("c", DELEGATE["positive"])}
        links = [CloneLink("s", "c", 100.0, DISSEMINATOR)]
        report = validate(links, by_id, {"s": ("default-proxy-delegate",)})
        assert len(report.pairs) == 1
        pair = report.pairs[0]
        assert pair.vulnerable
        assert pair.confirmed == ("default-proxy-delegate",)
        assert pair.complete
        assert report.vulnerable_contracts == ["c"]
        assert report.vulnerable_snippets == ["s"]

    def test_mitigated_clone_not_vulnerable(self):
        by_id = {"c": contract("c", DELEGATE["negative"])}
        links = [CloneLink("s", "c", 95.0, DISSEMINATOR)]
        report = validate(links, by_id, {"s": ("default-proxy-delegate",)})
        assert len(report.pairs) == 1
        assert not report.pairs[0].vulnerable
        assert report.vulnerable_contracts == []

    def test_unparsable_contract_is_failure_not_vulnerable(self):
        by_id = {"c": contract("c", "English prose only.")}
        links = [CloneLink("s", "c", 95.0, DISSEMINATOR)]
        report = validate(links, by_id, {"s": ("tx-origin",)})
        assert report.pairs == []
        assert len(report.failures) == 1
        assert report.failures[0][0] == "c"
        assert report.vulnerable_contracts == []

    def test_missing_contract_record_is_failure(self):
        links = [CloneLink("s", "ghost", 95.0, DISSEMINATOR)]
        report = validate(links, {}, {"s": ("tx-origin",)})
        assert report.failures == [("ghost", "contract record missing")]

    def test_benign_snippet_links_skipped(self):
        by_id = {"c": contract("c", DELEGATE["positive"])}
        links = [CloneLink("s", "c", 100.0, DISSEMINATOR)]
        report = validate(links, by_id, {})
        assert report.pairs == [] and report.failures == []

    def test_analysis_restricted_to_snippet_detectors(self):
        mixed = """contract Mixed {
  address owner;
  function guard() {
    require(tx.origin == owner);
  }
  function drain(uint amount) {
    msg.sender.call.value(amount)();
    balance = balance - amount;
  }
  uint balance;
}"""
        by_id = {"c": contract("c", mixed)}
        links = [CloneLink("s", "c", 95.0, DISSEMINATOR)]
        report = validate(links, by_id, {"s": ("tx-origin",)})
        assert report.pairs[0].confirmed == ("tx-origin",)

    def test_parallel_jobs_identical_report(self):
        by_id = {
            "c1": contract("c1", DELEGATE["positive"]),
            "c2": contract("c2", DELEGATE["negative"]),
            "c3": contract("c3", detector_corpus.FIXTURES["tx-origin"]["positive"]),
        }
        links = [CloneLink("s1", "c1", 100.0, DISSEMINATOR),
                 CloneLink("s1", "c2", 95.0, SOURCE),
                 CloneLink("s2", "c3", 100.0, ALL)]
        detectors = {"s1": ("default-proxy-delegate",), "s2": ("tx-origin",)}
        serial = validate(links, by_id, detectors, jobs=1)
        parallel = validate(links, by_id, detectors, jobs=2)
        assert serial.to_dict() == parallel.to_dict()

    def test_report_dict_shape(self):
        by_id = {"c": contract("c", DELEGATE["positive"])}
        links = [CloneLink("s", "c", 100.0, DISSEMINATOR)]
        doc = validate(links, by_id, {"s": ("default-proxy-delegate",)}).to_dict()
        assert set(doc) == {"pairs", "failures", "vulnerableContracts",
                            "vulnerableSnippets"}
        assert doc["pairs"][0]["temporalClass"] == DISSEMINATOR


class TestStudy:
    def test_empty_corpora_yield_zero_tables(self, tmp_path):
        spath = tmp_path / "snippets.jsonl"
        cpath = tmp_path / "contracts.jsonl"
        spath.write_text("", encoding="utf-8")
        cpath.write_text("", encoding="utf-8")
        result = run_study(spath, cpath)
        doc = report_json(result)
        funnel = doc["funnel"]
        assert funnel["snippets"]["unique"] == 0
        assert funnel["snippets"]["vulnerable"] == 0
        assert funnel["contracts"]["unique"] == {"disseminator": 0, "source": 0}
        assert doc["categories"] == {}
        assert doc["validationFailures"] == []
        assert all(value == {"skipped": "skipped: 0 samples"}
                   for value in doc["correlations"].values())

    def test_funnel_is_monotone_on_corpus(self, tmp_path):
        spath, cpath = study_corpus.write_corpus(tmp_path)
        result = run_study(spath, cpath, StudyConfig(jobs=1))
        doc = report_json(result)
        counts = doc["counts"]
        snippets = doc["funnel"]["snippets"]
        assert (counts["ingestedSnippets"] >= counts["solidity"]
                >= counts["parsable"] >= snippets["unique"]
                >= snippets["vulnerable"] >= snippets["containedInContracts"])
        before = snippets["postedBeforeDeployment"]
        assert (snippets["containedInContracts"] >= before["disseminator"]
                >= before["source"])

    def test_text_report_shape(self, tmp_path):
        spath, cpath = study_corpus.write_corpus(tmp_path)
        result = run_study(spath, cpath)
        text = report_text(result)
        assert "Posted before deployment" in text
        assert "(" in text  # source counts ride along in parentheses
        assert "Correlations" in text or "correlation" in text.lower()
