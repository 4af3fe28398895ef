"""Edit-distance similarity over fingerprints.

delta scores two sub-fingerprints on a 0..100 scale. epsilon lifts that
to whole fingerprints by matching every sub-fingerprint of the query
against its best counterpart in the candidate and averaging; the order
of functions inside either fingerprint does not matter.
"""

from .fingerprint import EmptyFingerprint, Fingerprint


class EmptyInput(ValueError):
    """delta needs two non-empty strings."""


def levenshtein(a, b):
    """Plain edit distance, two-row dynamic programming."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            current.append(min(previous[j] + 1,
                               current[j - 1] + 1,
                               previous[j - 1] + cost))
        previous = current
    return previous[-1]


def delta(s1, s2):
    """Similarity of two sub-fingerprints in [0, 100]."""
    if not s1 or not s2:
        raise EmptyInput("delta needs non-empty sub-fingerprints")
    longest = max(len(s1), len(s2))
    return (longest - levenshtein(s1, s2)) / longest * 100.0


def _subs(fp):
    if isinstance(fp, Fingerprint):
        return fp.subfingerprints
    return tuple(fp)


def epsilon(f1, f2):
    """Mean best-match similarity of f1's sub-fingerprints within f2.

    Directional on purpose: f1 is the query (a snippet), f2 the
    candidate it may be contained in (a contract). Swap the arguments
    for the opposite containment question.
    """
    subs1 = _subs(f1)
    subs2 = _subs(f2)
    if not subs1 or not subs2:
        raise EmptyFingerprint("epsilon needs at least one sub-fingerprint each")
    total = 0.0
    for s1 in subs1:
        total += max(delta(s1, s2) for s2 in subs2)
    return total / len(subs1)
