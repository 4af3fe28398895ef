"""CPG structural tests: evaluation order, data flow, and round-trips."""

import json
import random

from snipscan.cpg import build_cpg, from_json, to_dict, to_dot, to_json
from snipscan.parser import parse_source

FIG2_STYLE = """contract A {
  address owner;
  function f() public {
    if (msg.sender == owner) {
      owner = msg.sender;
    }
  }
}"""

MODIFIER_FIXTURE = """contract A {
  address owner;
  modifier onlyOwner() { require(msg.sender == owner); _; }
  function setOwner(address o) public onlyOwner {
    owner = o;
  }
}"""


def build(source):
    return build_cpg(parse_source(source))


def eog_chain(graph, start_id, length):
    """Follow EOG successors, preferring live branches over Rollback."""
    chain = [start_id]
    cur = start_id
    for _ in range(length):
        nxt = [s for s in graph.successors(cur, ["EOG"])
               if not graph.node(s).has_label("Rollback")]
        if not nxt:
            break
        cur = nxt[0]
        chain.append(cur)
    return chain


class TestEvaluationOrder:
    def test_condition_evaluates_before_branch(self):
        graph = build(FIG2_STYLE)
        fn = next(n for n in graph.nodes.values()
                  if n.has_label("FunctionDeclaration"))
        chain = [graph.node(i) for i in eog_chain(graph, fn.id, 5)]
        names = [n.prop("name") for n in chain[1:4]]
        assert names == ["msg", "sender", "owner"]
        assert chain[4].has_label("BinaryOperator")
        assert chain[4].prop("operatorCode") == "=="
        assert chain[5].has_label("IfStatement")

    def test_if_branches_in_eog(self):
        graph = build(FIG2_STYLE)
        branch = next(n for n in graph.nodes.values()
                      if n.has_label("IfStatement"))
        assert len(graph.successors(branch.id, ["EOG"])) == 2

    def test_loop_has_eog_cycle(self):
        graph = build("contract L { function f(uint n) public {"
                      " for (uint i = 0; i < n; i++) { n = n - 1; } } }")
        assert _has_eog_cycle(graph)

    def test_straight_line_code_has_no_cycle(self):
        graph = build("contract S { uint x; function f() public {"
                      " x = 1; x = 2; } }")
        assert not _has_eog_cycle(graph)


def _has_eog_cycle(graph):
    color = {}

    def visit(nid):
        color[nid] = 1
        for succ in graph.successors(nid, ["EOG"]):
            state = color.get(succ)
            if state == 1:
                return True
            if state is None and visit(succ):
                return True
        color[nid] = 2
        return False

    return any(visit(nid) for nid in list(graph.nodes) if nid not in color)


class TestDataFlow:
    def test_comparison_has_two_dfg_inputs(self):
        graph = build(FIG2_STYLE)
        compare = next(n for n in graph.nodes.values()
                       if n.has_label("BinaryOperator")
                       and n.prop("operatorCode") == "==")
        sources = {graph.node(e.src).prop("name")
                   for e in graph.in_edges(compare.id, ["DFG"])}
        assert sources == {"sender", "owner"}

    def test_field_write_fan_in(self):
        graph = build("contract A { uint total;"
                      " function a(uint x) public { total = x; }"
                      " function b(uint y) public { total = y; } }")
        field = next(n for n in graph.nodes.values()
                     if n.has_label("FieldDeclaration"))
        writers = [e.src for e in graph.in_edges(field.id, ["DFG"])]
        assert len(writers) == 2

    def test_reference_resolution(self):
        graph = build("contract A { uint x; function f() public { x = 1; } }")
        ref = next(n for n in graph.nodes.values()
                   if n.has_label("DeclaredReferenceExpression")
                   and n.prop("name") == "x")
        targets = graph.successors(ref.id, ["REFERS_TO"])
        assert len(targets) == 1
        assert graph.node(targets[0]).has_label("FieldDeclaration")

    def test_call_invokes_edge(self):
        graph = build("contract A { function g() public {}"
                      " function f() public { g(); } }")
        call = next(n for n in graph.nodes.values()
                    if n.has_label("CallExpression"))
        invoked = graph.successors(call.id, ["INVOKES"])
        assert [graph.node(i).prop("name") for i in invoked] == ["g"]


class TestRollback:
    def test_rollback_nodes_are_eog_terminal(self):
        graph = build(MODIFIER_FIXTURE)
        rollbacks = [n for n in graph.nodes.values() if n.has_label("Rollback")]
        assert rollbacks
        for node in rollbacks:
            assert list(graph.out_edges(node.id, ["EOG"])) == []

    def test_rollback_terminal_on_whole_corpus(self):
        import detector_corpus
        for positive, twin in detector_corpus.FIXTURES.values():
            for source in (positive, twin):
                graph = build(source)
                for node in graph.nodes.values():
                    if node.has_label("Rollback"):
                        assert list(graph.out_edges(node.id, ["EOG"])) == []


class TestModifierExpansion:
    def test_guard_copy_injected_into_function(self):
        graph = build(MODIFIER_FIXTURE)
        fn = next(n for n in graph.nodes.values()
                  if n.has_label("FunctionDeclaration")
                  and n.prop("name") == "setOwner")
        body = graph.successors(fn.id, ["BODY"])
        seen = set()
        stack = list(body)
        requires = 0
        while stack:
            cur = stack.pop()
            if cur in seen:
                continue
            seen.add(cur)
            node = graph.node(cur)
            if node.has_label("CallExpression") and node.prop("name") == "require":
                requires += 1
            stack.extend(e.dst for e in graph.out_edges(cur, ["AST"]))
        assert requires == 1

    def test_guard_runs_before_original_body(self):
        graph = build(MODIFIER_FIXTURE)
        fn = next(n for n in graph.nodes.values()
                  if n.has_label("FunctionDeclaration")
                  and n.prop("name") == "setOwner")
        order = eog_chain(graph, fn.id, 50)
        labels = []
        for nid in order:
            node = graph.node(nid)
            if node.has_label("CallExpression"):
                labels.append("require")
            if (node.has_label("BinaryOperator")
                    and node.prop("operatorCode") == "="):
                labels.append("assign")
        assert labels.index("require") < labels.index("assign")


class TestInferredWrappers:
    def test_statement_shape_gets_both_wrappers(self):
        graph = build("uint x = 1;\nx = x + 2;")
        inferred = sorted(
            label
            for n in graph.nodes.values() if n.prop("isInferred")
            for label in n.labels
            if label in ("RecordDeclaration", "FunctionDeclaration"))
        assert inferred == ["FunctionDeclaration", "RecordDeclaration"]

    def test_function_shape_gets_record_wrapper_only(self):
        graph = build("function f() public { uint x = 1; }")
        fn = next(n for n in graph.nodes.values()
                  if n.has_label("FunctionDeclaration"))
        rec = next(n for n in graph.nodes.values()
                   if n.has_label("RecordDeclaration"))
        assert not fn.prop("isInferred")
        assert rec.prop("isInferred")

    def test_contract_shape_has_no_inferred_nodes(self):
        graph = build(FIG2_STYLE)
        assert not any(n.prop("isInferred") for n in graph.nodes.values())


FIELD_POOL = ["uint total;", "address owner;", "bool live;",
              "mapping(address => uint) held;", "uint[] slots;"]
STMT_POOL = [
    "x = x + 1;",
    "if (x > 2) { x = 0; }",
    "require(msg.sender == owner);",
    "msg.sender.transfer(x);",
    "for (uint i = 0; i < x; i++) { x = x - 1; }",
    "uint y = x * 3;",
    "held[msg.sender] = x;",
    "emit Moved(x);" if False else "x = block.timestamp;",
    "revert();",
]


def random_contract(rng):
    fields = rng.sample(FIELD_POOL, rng.randint(1, 3))
    functions = []
    for i in range(rng.randint(1, 3)):
        statements = [rng.choice(STMT_POOL) for _ in range(rng.randint(1, 4))]
        functions.append("function f%d(uint x) public {\n    %s\n  }"
                         % (i, "\n    ".join(statements)))
    return "contract C {\n  %s\n  %s\n}" % (
        "\n  ".join(fields), "\n  ".join(functions))


class TestSerialization:
    def test_json_round_trip_on_random_fixtures(self):
        rng = random.Random(20240801)
        for _ in range(50):
            graph = build(random_contract(rng))
            clone = from_json(to_json(graph))
            assert to_dict(clone) == to_dict(graph)

    def test_json_is_valid_and_ordered(self):
        graph = build(FIG2_STYLE)
        payload = json.loads(to_json(graph))
        ids = [n["id"] for n in payload["nodes"]]
        assert ids == sorted(ids)

    def test_dot_export_mentions_every_node(self):
        graph = build(FIG2_STYLE)
        dot = to_dot(graph)
        assert dot.startswith("digraph")
        for nid in graph.nodes:
            assert ("n%d " % nid) in dot or ("n%d [" % nid) in dot
