"""Code property graph construction for tolerant Solidity snippets."""

from . import graph
from .build import TranslationError, infer_wrappers, translate
from .export import from_dict, from_json, to_dict, to_dot, to_json
from .graph import CpgEdge, CpgGraph, CpgNode
from .passes import expand_modifiers, pass_dfg, pass_eog, resolve_refs_and_calls

__all__ = [
    "CpgEdge", "CpgGraph", "CpgNode", "TranslationError", "build_cpg",
    "expand_modifiers", "from_dict", "from_json", "graph", "infer_wrappers",
    "pass_dfg", "pass_eog", "resolve_refs_and_calls", "to_dict", "to_dot",
    "to_json", "translate",
]


def build_cpg(snippet, source_id=None):
    """Full pipeline from source text or a SnippetAst to an analysis-ready graph."""
    if isinstance(snippet, str):
        from ..parser import parse_source
        snippet = parse_source(snippet)
    cpg = translate(snippet, source_id=source_id)
    expand_modifiers(cpg)
    resolve_refs_and_calls(cpg)
    pass_eog(cpg)
    pass_dfg(cpg)
    return cpg
