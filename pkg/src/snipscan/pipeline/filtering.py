"""Snippet corpus filters: language detection and duplicate collapse."""

import re
from dataclasses import dataclass
from importlib import resources


class MissingKeywordFile(FileNotFoundError):
    pass


def load_keywords(path=None):
    """Keyword list from a file, or the shipped Solidity-unique set.

    The shipped list is the Solidity keyword set minus every JavaScript
    reserved word, so any hit marks a snippet as Solidity rather than
    look-alike JavaScript.
    """
    if path is None:
        source = resources.files(__package__).joinpath(
            "data/solidity_keywords.txt")
        text = source.read_text(encoding="utf-8")
    else:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as err:
            raise MissingKeywordFile("keyword file unusable: %s" % err)
    words = []
    for line in text.splitlines():
        word = line.split("#", 1)[0].strip()
        if word:
            words.append(word)
    if not words:
        raise MissingKeywordFile("keyword list is empty")
    return frozenset(words)


def filter_solidity(snippets, keywords=None, keyword_path=None):
    """Snippets containing at least one whole-word keyword hit."""
    if keywords is None:
        keywords = load_keywords(keyword_path)
    pattern = re.compile(
        r"\b(?:%s)\b" % "|".join(re.escape(w) for w in sorted(keywords)))
    return [s for s in snippets if pattern.search(s.code)]


def strip_comments(code):
    """Source text with // and /* */ comments removed, all else verbatim.

    String literals are honored so a protocol like "https://..." does
    not lose its tail. A line comment keeps its terminating newline;
    an unterminated block comment swallows the rest of the input.
    """
    out = []
    i = 0
    n = len(code)
    while i < n:
        ch = code[i]
        nxt = code[i + 1] if i + 1 < n else ""
        if ch == "/" and nxt == "/":
            i += 2
            while i < n and code[i] != "\n":
                i += 1
        elif ch == "/" and nxt == "*":
            i += 2
            while i + 1 < n and not (code[i] == "*" and code[i + 1] == "/"):
                i += 1
            i = i + 2 if i + 1 < n else n
        elif ch in "\"'":
            quote = ch
            out.append(ch)
            i += 1
            while i < n:
                out.append(code[i])
                if code[i] == "\\" and i + 1 < n:
                    out.append(code[i + 1])
                    i += 2
                    continue
                if code[i] == quote:
                    i += 1
                    break
                i += 1
        else:
            out.append(ch)
            i += 1
    return "".join(out)


@dataclass(frozen=True)
class DedupResult:
    records: tuple
    mapping: dict  # dropped id -> surviving id

    def survivor_of(self, record_id):
        return self.mapping.get(record_id, record_id)


def dedup(snippets):
    """Collapse snippets that are byte-identical after comment removal.

    The earliest-posted copy survives (ties broken by id); whitespace
    differences are deliberately preserved, only comments are ignored.
    """
    groups = {}
    for snippet in snippets:
        groups.setdefault(strip_comments(snippet.code), []).append(snippet)
    survivors = set()
    mapping = {}
    for copies in groups.values():
        keep = min(copies, key=lambda s: (s.created_at, s.id))
        survivors.add(keep.id)
        for other in copies:
            if other.id != keep.id:
                mapping[other.id] = keep.id
    kept = tuple(s for s in snippets if s.id in survivors)
    return DedupResult(kept, mapping)
