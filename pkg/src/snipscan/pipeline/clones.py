"""Snippet-to-contract clone mapping with temporal classification.

Every accepted match produces a CloneLink. The link's temporal class
records what the timestamps allow one to claim: "All" is any clone,
"Disseminator" means this contract went on chain after the snippet was
posted, and "Source" additionally means every matched contract did, so
the snippet cannot have been copied from any of them.
"""

from ..clone import CloneParams, EmptyFingerprint, fingerprint_source, match
from ..parser import ParseError
from .records import CloneLink

ALL = "All"
DISSEMINATOR = "Disseminator"
SOURCE = "Source"


def classify_links(snippet, matches, contracts_by_id):
    """CloneLinks for one snippet's match results.

    Timestamp comparison is strict: a contract deployed at the exact
    posting instant counts as older.
    """
    newer = {
        m.candidate_id: contracts_by_id[m.candidate_id].deployed_at
        > snippet.created_at
        for m in matches
    }
    all_newer = bool(newer) and all(newer.values())
    links = []
    for m in matches:
        if all_newer:
            label = SOURCE
        elif newer[m.candidate_id]:
            label = DISSEMINATOR
        else:
            label = ALL
        links.append(CloneLink(snippet.id, m.candidate_id, m.epsilon, label))
    return links


def build_contract_index(contracts, index, on_error=None):
    """Fingerprint contracts into an index; returns the id->record map.

    Contracts whose code cannot be fingerprinted (unparsable, or empty
    after normalization) are reported through on_error and left out.
    """
    by_id = {}
    for contract in contracts:
        try:
            index.add(fingerprint_source(contract.code, contract.id))
        except (ParseError, EmptyFingerprint) as err:
            if on_error is not None:
                on_error(contract.id, err)
            continue
        by_id[contract.id] = contract
    return by_id


def map_clones(snippets, index, contracts_by_id, params=None, on_error=None):
    """Match each snippet against the contract index and classify."""
    params = params or CloneParams(n=index.n)
    links = []
    for snippet in snippets:
        try:
            fp = fingerprint_source(snippet.code, snippet.id)
        except (ParseError, EmptyFingerprint) as err:
            if on_error is not None:
                on_error(snippet.id, err)
            continue
        results = match(index, fp, params)
        links.extend(classify_links(snippet, results, contracts_by_id))
    return links
