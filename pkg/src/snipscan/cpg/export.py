"""Serialize property graphs to JSON (round-trippable) and DOT."""

import json

from .graph import AST, CpgGraph, DFG, EOG


def to_dict(graph):
    return {
        "sourceId": graph.source_id,
        "roots": list(graph.roots),
        "pragmas": list(graph.pragmas),
        "diagnostics": list(graph.diagnostics),
        "nodes": [
            {"id": n.id, "labels": sorted(n.labels), "properties": n.properties}
            for n in sorted(graph.nodes.values(), key=lambda n: n.id)
        ],
        "edges": [
            {"src": e.src, "dst": e.dst, "label": e.label, "properties": e.properties}
            for e in graph.edges
        ],
    }


def to_json(graph, indent=None):
    return json.dumps(to_dict(graph), indent=indent, sort_keys=False)


def from_dict(data):
    graph = CpgGraph(data.get("sourceId", ""))
    graph.roots = list(data.get("roots", []))
    graph.pragmas = list(data.get("pragmas", []))
    graph.diagnostics = list(data.get("diagnostics", []))
    for nd in data["nodes"]:
        graph.insert_node(nd["id"], nd["labels"], **nd.get("properties", {}))
    for ed in data["edges"]:
        graph.add_edge(ed["src"], ed["dst"], ed["label"], **ed.get("properties", {}))
    return graph


def from_json(text):
    return from_dict(json.loads(text))


_EDGE_STYLES = {
    EOG: ' color="forestgreen"',
    DFG: ' color="blue3"',
    AST: ' color="gray60"',
}


def _dot_escape(text):
    return text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")


def to_dot(graph):
    lines = ["digraph cpg {", "  node [shape=box, fontname=monospace];"]
    for n in sorted(graph.nodes.values(), key=lambda n: n.id):
        label = "|".join(sorted(n.labels))
        name = n.prop("localName") or n.prop("code") or ""
        if isinstance(name, str) and len(name) > 32:
            name = name[:29] + "..."
        lines.append('  n%d [label="%s\\n%s"];' % (n.id, _dot_escape(label), _dot_escape(str(name))))
    for e in graph.edges:
        style = _EDGE_STYLES.get(e.label, "")
        lines.append('  n%d -> n%d [label="%s"%s];' % (e.src, e.dst, _dot_escape(e.label), style))
    lines.append("}")
    return "\n".join(lines)
