"""Condensing token segments into short comparable fingerprints.

Every token becomes exactly one base-64 character, so an edit that
touches k tokens moves at most k characters of the fingerprint. A `:`
precedes each contract header's characters and a `.` precedes each
function body's, which lets the matcher compare functions independently
of their order in the file.
"""

import re
from dataclasses import dataclass, field

from .normalize import SEGMENT_CONTRACT, normalize, tokenize_for_fingerprint

ALPHABET = (
    "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    "abcdefghijklmnopqrstuvwxyz"
    "0123456789+/"
)

_SEPARATORS = re.compile(r"[.:]")
_VALID_TEXT = re.compile(r"^[A-Za-z0-9+/.:]*$")

_MASK32 = 0xFFFFFFFF


class EmptyFingerprint(ValueError):
    """No segment contributed a single token."""


def token_hash(token):
    """32-bit polynomial fold over the token's UTF-8 bytes."""
    state = 5381
    for byte in token.encode("utf-8"):
        state = (state * 257 + byte) & _MASK32
    return state


def token_char(token):
    return ALPHABET[token_hash(token) % 64]


@dataclass(frozen=True)
class Fingerprint:
    text: str
    source_id: str = ""
    subfingerprints: tuple = field(init=False)

    def __post_init__(self):
        if not _VALID_TEXT.match(self.text):
            raise ValueError("fingerprint text outside [A-Za-z0-9+/.:]: %r"
                             % self.text)
        subs = tuple(s for s in _SEPARATORS.split(self.text) if s)
        object.__setattr__(self, "subfingerprints", subs)


def fingerprint(segments, source_id=""):
    """Fingerprint of tokenized segments.

    Raises EmptyFingerprint when no segment holds any token: there is
    nothing to compare such an input against.
    """
    pieces = []
    total = 0
    for segment in segments:
        pieces.append(":" if segment.kind == SEGMENT_CONTRACT else ".")
        for token in segment.tokens:
            pieces.append(token_char(token))
        total += len(segment.tokens)
    if total == 0:
        raise EmptyFingerprint("no tokens in any segment")
    return Fingerprint("".join(pieces), source_id)


def fingerprint_source(source, source_id=""):
    """Normalize, tokenize, and fingerprint raw snippet source."""
    return fingerprint(tokenize_for_fingerprint(normalize(source)), source_id)


def write_fingerprints(path, fingerprints):
    """One record per line: id, a tab, the fingerprint text."""
    with open(path, "w", encoding="utf-8") as sink:
        for fp in fingerprints:
            if "\t" in fp.source_id or "\n" in fp.source_id:
                raise ValueError("fingerprint id not writable: %r" % fp.source_id)
            sink.write("%s\t%s\n" % (fp.source_id, fp.text))


def read_fingerprints(path):
    out = []
    with open(path, "r", encoding="utf-8") as source:
        for lineno, line in enumerate(source, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            source_id, sep, text = line.partition("\t")
            if not sep:
                raise ValueError("line %d: missing tab separator" % lineno)
            out.append(Fingerprint(text, source_id))
    return out
