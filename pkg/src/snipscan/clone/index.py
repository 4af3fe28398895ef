"""N-gram prefilter index over fingerprints.

Edit distance across a whole corpus is too slow, so candidates are first
narrowed to fingerprints sharing at least a fraction eta of the query's
distinct character n-grams. Only the survivors get the full epsilon
score. eta counts containment of the query's distinct n-grams, not
Jaccard overlap: a short snippet inside a long contract should survive.
"""

import json
import os
import tempfile
import threading
from collections import Counter
from dataclasses import dataclass

from .fingerprint import Fingerprint
from .similarity import epsilon

DEFAULT_NGRAM = 3
DEFAULT_ETA = 0.5
DEFAULT_EPSILON_THRESHOLD = 70.0
# High-confidence cutoff used when results feed manual review.
STUDY_EPSILON_THRESHOLD = 90.0

_FORMAT = "snipscan-ngram-index"
_VERSION = 1


class DuplicateId(ValueError):
    pass


class MissingId(KeyError):
    pass


class StorageError(RuntimeError):
    """Index persistence failed or the file is not an index."""


@dataclass(frozen=True)
class CloneParams:
    n: int = DEFAULT_NGRAM
    eta: float = DEFAULT_ETA
    epsilon_threshold: float = DEFAULT_EPSILON_THRESHOLD

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n-gram size must be positive")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError("eta must lie in [0, 1]")
        if not 0.0 <= self.epsilon_threshold <= 100.0:
            raise ValueError("epsilon threshold must lie in [0, 100]")


@dataclass(frozen=True)
class MatchResult:
    candidate_id: str
    epsilon: float
    eta_overlap: float


def ngrams(text, n):
    return {text[i:i + n] for i in range(len(text) - n + 1)}


class NgramIndex:
    """id -> fingerprint store with an n-gram posting list.

    Mutations take an exclusive lock; queries read without one and may
    run concurrently from many threads.
    """

    def __init__(self, n=DEFAULT_NGRAM):
        if n < 1:
            raise ValueError("n-gram size must be positive")
        self.n = n
        self.store = {}
        self.postings = {}
        self._lock = threading.Lock()

    def __len__(self):
        return len(self.store)

    def __contains__(self, source_id):
        return source_id in self.store

    def add(self, fp):
        with self._lock:
            if fp.source_id in self.store:
                raise DuplicateId(fp.source_id)
            self.store[fp.source_id] = fp
            for gram in ngrams(fp.text, self.n):
                self.postings.setdefault(gram, set()).add(fp.source_id)

    def remove(self, source_id):
        with self._lock:
            fp = self.store.pop(source_id, None)
            if fp is None:
                raise MissingId(source_id)
            for gram in ngrams(fp.text, self.n):
                bucket = self.postings.get(gram)
                if bucket is not None:
                    bucket.discard(source_id)
                    if not bucket:
                        del self.postings[gram]

    def query(self, fp, params=None):
        """Candidate ids with their achieved n-gram containment ratio."""
        params = params or CloneParams(n=self.n)
        eta = params.eta
        grams = ngrams(fp.text, self.n)
        if not grams:
            # Query shorter than one n-gram: exact substring scan.
            return {source_id: 1.0
                    for source_id, stored in self.store.items()
                    if fp.text in stored.text}
        counts = Counter()
        for gram in grams:
            for source_id in self.postings.get(gram, ()):
                counts[source_id] += 1
        if eta <= 0.0:
            return {source_id: counts[source_id] / len(grams)
                    for source_id in self.store}
        return {source_id: hits / len(grams)
                for source_id, hits in counts.items()
                if hits / len(grams) >= eta}

    def persist(self, path):
        with self._lock:
            payload = {
                "format": _FORMAT,
                "version": _VERSION,
                "n": self.n,
                "fingerprints": {source_id: fp.text
                                 for source_id, fp in sorted(self.store.items())},
            }
        try:
            handle, scratch = tempfile.mkstemp(
                dir=os.path.dirname(os.path.abspath(path)) or ".",
                prefix=".index-", suffix=".tmp")
            with os.fdopen(handle, "w", encoding="utf-8") as sink:
                json.dump(payload, sink, indent=1, sort_keys=True)
                sink.write("\n")
            os.replace(scratch, path)
        except OSError as err:
            raise StorageError("cannot persist index to %s: %s" % (path, err))

    @classmethod
    def load(cls, path):
        try:
            with open(path, "r", encoding="utf-8") as source:
                payload = json.load(source)
        except (OSError, ValueError) as err:
            raise StorageError("cannot load index from %s: %s" % (path, err))
        if not isinstance(payload, dict) or payload.get("format") != _FORMAT:
            raise StorageError("%s is not a fingerprint index" % path)
        if payload.get("version") != _VERSION:
            raise StorageError("unsupported index version %r"
                               % payload.get("version"))
        index = cls(n=int(payload.get("n", DEFAULT_NGRAM)))
        for source_id, text in payload.get("fingerprints", {}).items():
            index.add(Fingerprint(text, source_id))
        return index


def match(index, fp, params=None):
    """Scored matches for a query fingerprint, best first.

    epsilon runs query->candidate, so a snippet fully contained in a
    larger stored contract still scores 100.
    """
    params = params or CloneParams(n=index.n)
    results = []
    for candidate_id, overlap in index.query(fp, params).items():
        score = epsilon(fp, index.store[candidate_id])
        if score >= params.epsilon_threshold:
            results.append(MatchResult(candidate_id, score, overlap))
    results.sort(key=lambda r: (-r.epsilon, r.candidate_id))
    return results
