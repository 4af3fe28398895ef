"""Query engine tests: a naive oracle, budgets, and negation stability.

The oracle enumerates per-step relations by brute force and joins them,
which is exact for patterns without path variables: reachability steps
collect every node whose shortest distance lies within the hop window,
and the engine deduplicates rows by the returned variables either way.
"""

import json
import random

import pytest

from snipscan.cpg import CpgGraph
from snipscan.graphquery import (
    ANY,
    IN,
    OUT,
    Budget,
    Compare,
    Const,
    HasLabel,
    Not,
    NodePred,
    NotExists,
    PathStep,
    Pattern,
    Prop,
    SeqInPath,
    analyze_with_budget,
    run,
)

NODE_LABELS = ("A", "B", "C")
EDGE_LABELS = ("E", "F")


def random_graph(rng, max_nodes=30):
    graph = CpgGraph("random")
    count = rng.randint(4, max_nodes)
    for _ in range(count):
        labels = {rng.choice(NODE_LABELS)}
        if rng.random() < 0.3:
            labels.add(rng.choice(NODE_LABELS))
        graph.new_node(labels, p=rng.randint(0, 3))
    ids = list(graph.nodes)
    for _ in range(rng.randint(count, count * 2)):
        graph.add_edge(rng.choice(ids), rng.choice(ids),
                       rng.choice(EDGE_LABELS))
    return graph


def random_pattern(rng):
    variables = ["a"]
    anchor = NodePred("a", labels=_maybe_label(rng), props=_maybe_props(rng))
    steps = []
    for i in range(rng.randint(1, 3)):
        var = "v%d" % i
        hops = rng.choice([(1, 1), (1, 1), (1, 2), (1, 3), (0, 1)])
        steps.append(PathStep(
            src=rng.choice(variables),
            dst=NodePred(var, labels=_maybe_label(rng), props=_maybe_props(rng)),
            labels=_maybe_edge_label(rng),
            direction=rng.choice((OUT, OUT, IN, ANY)),
            min_hops=hops[0], max_hops=hops[1]))
        variables.append(var)
    where = None
    if rng.random() < 0.5:
        var = rng.choice(variables)
        where = Compare(Prop(var, "p"),
                        rng.choice(("eq", "neq", "gt", "le")),
                        Const(rng.randint(0, 3)))
        if rng.random() < 0.3:
            where = Not(where)
    returns = tuple(sorted(rng.sample(variables, rng.randint(1, len(variables)))))
    return Pattern("rnd", anchor, steps, where, returns)


def _maybe_label(rng):
    return (rng.choice(NODE_LABELS),) if rng.random() < 0.6 else ()


def _maybe_edge_label(rng):
    return (rng.choice(EDGE_LABELS),) if rng.random() < 0.6 else ()


def _maybe_props(rng):
    return {"p": rng.randint(0, 3)} if rng.random() < 0.2 else {}


# ---------------------------------------------------------------- oracle


def _neighbors(graph, nid, labels, direction):
    label_list = list(labels) if labels else None
    out = []
    if direction in (OUT, ANY):
        out.extend(e.dst for e in graph.out_edges(nid, label_list))
    if direction in (IN, ANY):
        out.extend(e.src for e in graph.in_edges(nid, label_list))
    return out


def _step_relation(graph, step):
    """All (src, dst) pairs the step can bind, by brute-force BFS."""
    pairs = set()
    for src in graph.nodes:
        if step.min_hops == 0:
            pairs.add((src, src))
        visited = {src}
        frontier = [src]
        depth = 0
        while frontier and depth < step.max_hops:
            depth += 1
            nxt = []
            for nid in frontier:
                for other in _neighbors(graph, nid, step.labels, step.direction):
                    if other not in visited:
                        visited.add(other)
                        nxt.append(other)
                        pairs.add((src, other))
            frontier = nxt
    return pairs


def _eval_where(graph, where, bindings):
    if where is None:
        return True
    if isinstance(where, Not):
        return not _eval_where(graph, where.part, bindings)
    value = graph.node(bindings[where.lhs.var]).properties.get(where.lhs.name)
    want = where.rhs.value
    if where.op == "eq":
        return value == want
    if where.op == "neq":
        return value != want
    if where.op == "gt":
        return isinstance(value, int) and value > want
    if where.op == "le":
        return isinstance(value, int) and value <= want
    raise AssertionError("oracle does not model %r" % where.op)


def naive_match(graph, pattern):
    rows = []
    anchors = [nid for nid in graph.nodes
               if pattern.anchor.matches(graph.node(nid))]
    relations = [( _step_relation(graph, s), s) for s in pattern.steps]

    def extend(bindings, idx):
        if idx == len(pattern.steps):
            if _eval_where(graph, pattern.where, bindings):
                rows.append(tuple(bindings[v] for v in pattern.returns))
            return
        relation, step = relations[idx]
        src = bindings[step.src]
        for pair in relation:
            if pair[0] != src:
                continue
            dst = pair[1]
            if not step.dst.matches(graph.node(dst)):
                continue
            nb = dict(bindings)
            nb[step.dst.var] = dst
            extend(nb, idx + 1)

    for nid in anchors:
        extend({pattern.anchor.var: nid}, 0)
    return sorted(set(rows))


class TestOracle:
    def test_engine_equals_naive_enumeration(self):
        rng = random.Random(987123)
        for trial in range(100):
            graph = random_graph(rng)
            pattern = random_pattern(rng)
            result = run(graph, pattern, Budget(hop_cap=64))
            assert result.complete
            got = sorted({tuple(row[v] for v in pattern.returns)
                          for row in result.rows})
            want = naive_match(graph, pattern)
            assert got == want, "trial %d diverged" % trial


# ----------------------------------------------------- budgets, negation


def chain_graph(length):
    """head -E-> n1 -E-> ... -E-> tail, tail labeled End."""
    graph = CpgGraph("chain")
    prev = graph.new_node({"Head"}, p=0)
    first = prev
    for i in range(1, length):
        labels = {"Mid"} if i < length - 1 else {"End"}
        node = graph.new_node(labels, p=i)
        graph.add_edge(prev.id, node.id, "E")
        prev = node
    return graph, first.id


def unbounded_reach_pattern():
    return Pattern(
        "reach", NodePred("h", labels=("Head",)),
        [PathStep("h", NodePred("x"), labels=("E",), min_hops=1,
                  max_hops=None)],
        None, ("x",))


class TestBudget:
    def test_row_count_grows_with_hop_cap(self):
        graph, _ = chain_graph(100)
        pattern = unbounded_reach_pattern()
        sizes = {}
        for cap in (4, 16, 64, 200):
            result = run(graph, pattern, Budget(hop_cap=cap))
            sizes[cap] = {row["x"] for row in result.rows}
        assert sizes[4] < sizes[16] < sizes[64] < sizes[200]

    def test_truncation_is_flagged(self):
        graph, _ = chain_graph(100)
        pattern = unbounded_reach_pattern()
        assert not run(graph, pattern, Budget(hop_cap=4)).complete
        assert run(graph, pattern, Budget(hop_cap=200)).complete

    def test_ladder_retries_and_reports_completion(self):
        graph, _ = chain_graph(50)
        patterns = [unbounded_reach_pattern()]
        results, completed = analyze_with_budget(graph, patterns,
                                                 ladder=(64, 32), wall_clock_limit=60.0)
        assert completed
        assert len(results["reach"]) == 49

    def test_expired_clock_yields_incomplete(self):
        graph, _ = chain_graph(50)
        ticks = iter(range(0, 10_000_000, 1_000_000))

        def clock():
            return float(next(ticks))

        results, completed = analyze_with_budget(
            graph, [unbounded_reach_pattern()], ladder=(64, 32, 16, 8),
            wall_clock_limit=4.0, clock=clock)
        assert not completed
        assert not results["reach"].complete


class TestNegationStability:
    def test_not_exists_immune_to_hop_cap(self):
        graph, head = chain_graph(80)
        # head reaches End, so NotExists must be false at every cap
        blocked = Pattern(
            "blocked", NodePred("h", labels=("Head",)), [],
            NotExists(steps=[PathStep("h", NodePred("e", labels=("End",)),
                                      labels=("E",), min_hops=1,
                                      max_hops=None)]),
            ("h",))
        # nothing is labeled Missing, so this NotExists is always true
        open_pattern = Pattern(
            "open", NodePred("h", labels=("Head",)), [],
            NotExists(steps=[PathStep("h", NodePred("m", labels=("Missing",)),
                                      labels=("E",), min_hops=1,
                                      max_hops=None)]),
            ("h",))
        for cap in (2, 8, 64):
            assert run(graph, blocked, Budget(hop_cap=cap)).rows == []
            rows = run(graph, open_pattern, Budget(hop_cap=cap)).rows
            assert [r["h"] for r in rows] == [head]


class TestWhereOperators:
    def graph(self):
        g = CpgGraph("ops")
        g.new_node({"A"}, name="alpha", p=1, flag=True, code="f() { body }")
        g.new_node({"B"}, name="Beta", p=2)
        return g

    def run_where(self, where):
        g = self.graph()
        pattern = Pattern("w", NodePred("n"), [], where, ("n",))
        return [row["n"] for row in run(g, pattern).rows]

    def test_numeric_comparisons_exclude_bools(self):
        assert self.run_where(Compare(Prop("n", "p"), "gt", Const(1))) == [1]
        assert self.run_where(Compare(Prop("n", "p"), "le", Const(1))) == [0]
        assert self.run_where(Compare(Prop("n", "flag"), "gt", Const(0))) == []

    def test_membership_ops(self):
        assert self.run_where(
            Compare(Prop("n", "name"), "in", Const(("alpha", "x")))) == [0]
        assert self.run_where(
            Compare(Prop("n", "name"), "in_ci", Const(("BETA",)))) == [1]

    def test_contains_and_prefix_ops(self):
        assert self.run_where(
            Compare(Prop("n", "code"), "contains", Const("body"))) == [0]
        assert self.run_where(
            Compare(Prop("n", "code"), "split0_contains", Const("body"))) == []
        assert self.run_where(
            Compare(Prop("n", "code"), "split0_contains", Const("f("))) == [0]

    def test_null_checks(self):
        assert self.run_where(Compare(Prop("n", "flag"), "is_null")) == [1]
        assert self.run_where(Compare(Prop("n", "flag"), "not_null")) == [0]

    def test_same_and_diff(self):
        g = CpgGraph("samediff")
        g.new_node({"A"})
        g.new_node({"B"})
        g.new_node({"C"})
        g.add_edge(0, 1, "E")
        g.add_edge(0, 1, "F")
        g.add_edge(0, 2, "F")
        base = [PathStep("n", NodePred("m"), labels=("E",)),
                PathStep("n", NodePred("k"), labels=("F",))]
        same = Pattern("s", NodePred("n", labels=("A",)), base,
                       Compare("m", "same", "k"), ("m", "k"))
        diff = Pattern("d", NodePred("n", labels=("A",)), base,
                       Compare("m", "diff", "k"), ("m", "k"))
        assert [(r["m"], r["k"]) for r in run(g, same).rows] == [(1, 1)]
        assert [(r["m"], r["k"]) for r in run(g, diff).rows] == [(1, 2)]


class TestPathPredicates:
    def test_seq_in_path_sees_edge_label_order(self):
        g = CpgGraph("seq")
        a = g.new_node({"A"})
        b = g.new_node({"B"})
        c = g.new_node({"C"})
        g.add_edge(a.id, b.id, "E")
        g.add_edge(b.id, c.id, "F")
        pattern = Pattern(
            "seq", NodePred("a", labels=("A",)),
            [PathStep("a", NodePred("c", labels=("C",)), min_hops=1,
                      max_hops=3, path_var="walk")],
            SeqInPath("walk", "E", "F"), ("a", "c"))
        rows = run(g, pattern).rows
        assert [(r["a"], r["c"]) for r in rows] == [(a.id, c.id)]
        flipped = Pattern(
            "seq2", NodePred("a", labels=("A",)),
            [PathStep("a", NodePred("c", labels=("C",)), min_hops=1,
                      max_hops=3, path_var="walk")],
            SeqInPath("walk", "F", "E"), ("a", "c"))
        assert run(g, flipped).rows == []


class TestSerialization:
    def test_catalog_patterns_survive_dict_round_trip(self):
        import detector_corpus
        from snipscan.detectors import DETECTORS
        from snipscan.cpg import build_cpg
        from snipscan.parser import parse_source

        source = detector_corpus.FIXTURES["reentrancy"][0]
        graph = build_cpg(parse_source(source))
        for det in DETECTORS:
            for pattern in det.build({"loop_bound": 100}):
                blob = json.dumps(pattern.to_dict())
                clone = Pattern.from_dict(json.loads(blob))
                original = run(graph, pattern, Budget(hop_cap=64))
                replayed = run(graph, clone, Budget(hop_cap=64))
                assert replayed.rows == original.rows, pattern.name
