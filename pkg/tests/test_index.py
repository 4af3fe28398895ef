"""N-gram index tests: prefilter behavior, recall, persistence."""

import json
import random

import pytest

import clone_corpus
from snipscan.clone import (
    CloneParams,
    DuplicateId,
    Fingerprint,
    MissingId,
    NgramIndex,
    StorageError,
    epsilon,
    match,
    ngrams,
)


def brute_force_matches(index, fp, threshold):
    scored = []
    for candidate_id, stored in index.store.items():
        score = epsilon(fp, stored)
        if score >= threshold:
            scored.append((candidate_id, score))
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored


class TestQuery:
    def test_eta_zero_scores_every_stored_entry(self):
        rng = random.Random(4242)
        index, queries = clone_corpus.planted_store(rng, size=500, planted=20)
        params = CloneParams(n=3, eta=0.0, epsilon_threshold=70.0)
        for fp in queries[:10]:
            got = [(r.candidate_id, r.epsilon) for r in match(index, fp, params)]
            assert got == brute_force_matches(index, fp, 70.0)

    def test_candidate_sets_shrink_as_eta_rises(self):
        rng = random.Random(99)
        index, queries = clone_corpus.planted_store(rng, size=300, planted=10)
        fp = queries[0]
        previous = None
        for eta in (0.1, 0.3, 0.5, 0.7, 0.9):
            candidates = set(index.query(
                fp, CloneParams(n=3, eta=eta, epsilon_threshold=70.0)))
            if previous is not None:
                assert candidates <= previous
            previous = candidates

    def test_eta_zero_returns_whole_store(self):
        index = NgramIndex(n=3)
        index.add(Fingerprint(":ab.cdefg", "one"))
        index.add(Fingerprint(":zz.zzzzz", "two"))
        got = index.query(Fingerprint(":ab.cdefh"),
                          CloneParams(n=3, eta=0.0, epsilon_threshold=0.0))
        assert set(got) == {"one", "two"}
        assert got["two"] == 0.0

    def test_overlap_ratio_is_shared_gram_fraction(self):
        index = NgramIndex(n=3)
        index.add(Fingerprint(":ab.cdefg", "one"))
        query = Fingerprint(":ab.cdxfg")
        got = index.query(query, CloneParams(n=3, eta=0.0,
                                             epsilon_threshold=0.0))
        shared = ngrams(query.text, 3) & ngrams(":ab.cdefg", 3)
        assert got["one"] == len(shared) / len(ngrams(query.text, 3))

    def test_short_query_falls_back_to_substring_scan(self):
        index = NgramIndex(n=4)
        index.add(Fingerprint(":ab.cdefg", "hit"))
        index.add(Fingerprint(":xy.z", "miss"))
        got = index.query(Fingerprint("cde"))
        assert got == {"hit": 1.0}

    def test_default_params_use_index_ngram_size(self):
        index = NgramIndex(n=5)
        index.add(Fingerprint(":ab.cdefgh", "one"))
        # No params given: the n=5 grams of the query must drive lookup.
        got = index.query(Fingerprint(":ab.cdefgh"))
        assert set(got) == {"one"}


class TestRecall:
    def test_default_prefilter_recall_on_planted_clones(self):
        # Small store here; the full-size run lives in the acceptance suite.
        expected, found = clone_corpus.measure_recall(
            seed=20240814, size=1200, planted=30)
        assert expected >= 30
        assert found / expected >= 0.95


class TestMatch:
    def test_results_sorted_by_score_then_id(self):
        index = NgramIndex(n=3)
        index.add(Fingerprint(":ab.cdefg", "bbb"))
        index.add(Fingerprint(":ab.cdefg", "aaa"))
        results = match(index, Fingerprint(":ab.cdefg"),
                        CloneParams(n=3, eta=0.0, epsilon_threshold=50.0))
        assert [r.candidate_id for r in results] == ["aaa", "bbb"]
        assert all(r.epsilon == 100.0 for r in results)

    def test_threshold_filters(self):
        index = NgramIndex(n=3)
        index.add(Fingerprint(":ab.cdefg", "near"))
        index.add(Fingerprint(":ab.zzzzz", "far"))
        results = match(index, Fingerprint(":ab.cdefg"),
                        CloneParams(n=3, eta=0.0, epsilon_threshold=90.0))
        assert [r.candidate_id for r in results] == ["near"]


class TestMutation:
    def test_add_rejects_duplicate_id(self):
        index = NgramIndex(n=3)
        index.add(Fingerprint(":ab.cdefg", "one"))
        with pytest.raises(DuplicateId):
            index.add(Fingerprint(":zz.zzzzz", "one"))

    def test_remove_unknown_id(self):
        index = NgramIndex(n=3)
        with pytest.raises(MissingId):
            index.remove("ghost")

    def test_remove_scrubs_postings(self):
        index = NgramIndex(n=3)
        index.add(Fingerprint(":ab.cdefg", "one"))
        index.add(Fingerprint(":ab.cdxyz", "two"))
        index.remove("one")
        assert "one" not in index
        assert len(index) == 1
        for bucket in index.postings.values():
            assert "one" not in bucket
        assert all(bucket for bucket in index.postings.values())

    def test_len_and_contains(self):
        index = NgramIndex(n=3)
        assert len(index) == 0
        index.add(Fingerprint(":ab.cdefg", "one"))
        assert len(index) == 1 and "one" in index and "two" not in index


class TestPersistence:
    def test_round_trip(self, tmp_path):
        rng = random.Random(7)
        index, queries = clone_corpus.planted_store(rng, size=50, planted=5)
        path = tmp_path / "store.json"
        index.persist(path)
        back = NgramIndex.load(path)
        assert back.n == index.n
        assert set(back.store) == set(index.store)
        params = CloneParams(n=3, eta=0.0, epsilon_threshold=70.0)
        for fp in queries:
            assert match(back, fp, params) == match(index, fp, params)

    def test_load_rejects_corrupt_file(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(StorageError):
            NgramIndex.load(path)

    def test_load_rejects_foreign_json(self, tmp_path):
        path = tmp_path / "other.json"
        path.write_text(json.dumps({"hello": "world"}), encoding="utf-8")
        with pytest.raises(StorageError):
            NgramIndex.load(path)

    def test_load_rejects_unknown_version(self, tmp_path):
        index = NgramIndex(n=3)
        index.add(Fingerprint(":ab.cdefg", "one"))
        path = tmp_path / "store.json"
        index.persist(path)
        payload = json.loads(path.read_text(encoding="utf-8"))
        payload["version"] = 999
        path.write_text(json.dumps(payload), encoding="utf-8")
        with pytest.raises(StorageError):
            NgramIndex.load(path)

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(StorageError):
            NgramIndex.load(tmp_path / "absent.json")


class TestParams:
    def test_defaults(self):
        params = CloneParams()
        assert params.n == 3
        assert params.eta == 0.5
        assert params.epsilon_threshold == 70.0

    def test_validation(self):
        with pytest.raises(ValueError):
            CloneParams(n=0)
        with pytest.raises(ValueError):
            CloneParams(eta=1.5)
        with pytest.raises(ValueError):
            CloneParams(eta=-0.1)
        with pytest.raises(ValueError):
            CloneParams(epsilon_threshold=100.5)
