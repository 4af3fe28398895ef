"""Backtracking matcher for graph patterns with hop and time budgets.

Unbounded steps (max_hops=None) are capped at the budget's hop cap; if
a cap actually cut off exploration the result is marked incomplete.
NotExists sub-matches ignore the cap (they run to graph size) so that a
"no path" verdict is never produced by truncation. The wall clock is the
final authority: when it expires the whole analysis attempt aborts and
the caller may retry with a smaller cap (analyze_with_budget does this
along a reduction ladder).
"""

import time

from .pattern import (
    And, Compare, Const, Exists, HasLabel, InPath, Not, NodePred, NotExists,
    Or, Prop, SeqInPath, ANY, IN, OUT,
)

DEFAULT_LADDER = (64, 32, 16, 8)
DEFAULT_WALL_CLOCK_LIMIT = 1800.0


class BudgetExhausted(Exception):
    pass


class Budget:
    def __init__(self, hop_cap=64, wall_clock_limit=DEFAULT_WALL_CLOCK_LIMIT, clock=None):
        self.hop_cap = hop_cap
        self.wall_clock_limit = wall_clock_limit
        self.clock = clock or time.monotonic
        self.deadline = None

    def start(self):
        if self.deadline is None:
            self.deadline = self.clock() + self.wall_clock_limit

    def check(self):
        if self.deadline is not None and self.clock() > self.deadline:
            raise BudgetExhausted()


class MatchResult:
    def __init__(self, rows, complete):
        self.rows = rows
        self.complete = complete

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __repr__(self):
        return "MatchResult(%d rows, complete=%s)" % (len(self.rows), self.complete)


class _FoundOne(Exception):
    pass


class _Matcher:
    def __init__(self, graph, budget):
        self.graph = graph
        self.budget = budget
        self.truncated = False
        self._ticks = 0

    def _tick(self):
        self._ticks += 1
        if self._ticks % 512 == 0:
            self.budget.check()

    # -- traversal -------------------------------------------------------

    def _edges(self, node_id, step):
        labels = list(step.labels) if step.labels else None
        if step.direction in (OUT, ANY):
            for e in self.graph.out_edges(node_id, labels):
                if self._edge_ok(e, step):
                    yield e, e.dst
        if step.direction in (IN, ANY):
            for e in self.graph.in_edges(node_id, labels):
                if self._edge_ok(e, step):
                    yield e, e.src

    @staticmethod
    def _edge_ok(edge, step):
        for k, v in step.edge_props.items():
            if edge.properties.get(k) != v:
                return False
        return True

    def _targets(self, src_id, step, unbounded):
        """Yield (node id, edge or None, path nodes or None, path edge labels).

        Reachability (no path var) uses breadth-first search with a
        visited set; correct because every pattern uses min_hops <= 1.
        Path-recording steps enumerate simple paths depth-first and
        carry the label of every traversed edge alongside the nodes.
        """
        lo = step.min_hops
        hi = step.max_hops
        open_ended = hi is None
        if open_ended:
            hi = len(self.graph.nodes) if unbounded else self.budget.hop_cap

        if step.edge_var is not None:
            # edge variables only make sense on single hops
            for e, other in self._edges(src_id, step):
                self._tick()
                yield other, e, [src_id, other], [e.label]
            return

        if step.path_var is None:
            if lo > 1:
                raise ValueError("min_hops > 1 needs a path variable")
            if lo == 0:
                yield src_id, None, None, None
            visited = {src_id}
            frontier = [src_id]
            depth = 0
            while frontier and depth < hi:
                depth += 1
                nxt = []
                for nid in frontier:
                    for e, other in self._edges(nid, step):
                        self._tick()
                        if other not in visited:
                            visited.add(other)
                            nxt.append(other)
                            yield other, None, None, None
                frontier = nxt
            if frontier and open_ended and not unbounded:
                for nid in frontier:
                    for e, other in self._edges(nid, step):
                        if other not in visited:
                            self.truncated = True
                            return
            return

        # simple-path DFS; paths may revisit nodes but never an edge,
        # so that return edges can lead back into an already-seen call
        stack = [(src_id, [src_id], [], frozenset())]
        while stack:
            nid, path, hops, used = stack.pop()
            depth = len(path) - 1
            if depth >= lo and depth > 0:
                yield nid, None, list(path), list(hops)
            elif depth == 0 and lo == 0:
                yield nid, None, list(path), list(hops)
            if depth >= hi:
                if open_ended and not unbounded:
                    for e, other in self._edges(nid, step):
                        if id(e) not in used:
                            self.truncated = True
                            break
                continue
            for e, other in self._edges(nid, step):
                self._tick()
                if id(e) not in used:
                    stack.append((other, path + [other], hops + [e.label],
                                  used | {id(e)}))

    # -- where evaluation --------------------------------------------------

    def _value(self, operand, bindings):
        if isinstance(operand, Const):
            return operand.value
        if isinstance(operand, Prop):
            bound = bindings.get(operand.var)
            if bound is None:
                return None
            if hasattr(bound, "properties") and hasattr(bound, "label"):
                return bound.properties.get(operand.name)  # edge binding
            return self.graph.node(bound).properties.get(operand.name)
        return operand

    def _compare(self, cmp, bindings):
        op = cmp.op
        if op in ("same", "diff"):
            a = bindings.get(cmp.lhs)
            b = bindings.get(cmp.rhs)
            return (a == b) if op == "same" else (a != b)
        a = self._value(cmp.lhs, bindings)
        b = self._value(cmp.rhs, bindings) if cmp.rhs is not None else None
        if op == "eq":
            return a == b
        if op == "neq":
            return a != b
        if op == "is_null":
            return a is None
        if op == "not_null":
            return a is not None
        if op in ("gt", "lt", "ge", "le"):
            if not isinstance(a, (int, float)) or not isinstance(b, (int, float)) \
                    or isinstance(a, bool) or isinstance(b, bool):
                return False
            if op == "gt":
                return a > b
            if op == "lt":
                return a < b
            if op == "ge":
                return a >= b
            return a <= b
        if op == "in":
            return a in b if isinstance(b, (list, tuple, set)) else False
        if op == "in_ci":
            if not isinstance(a, str) or not isinstance(b, (list, tuple, set)):
                return False
            return a.lower() in [x.lower() for x in b]
        if op == "contains":
            return isinstance(a, str) and isinstance(b, str) and b in a
        if op == "split0_contains":
            return isinstance(a, str) and isinstance(b, str) and b in a.split("{")[0]
        raise ValueError("unknown comparison op %r" % op)

    def _eval(self, expr, bindings, paths):
        if expr is None:
            return True
        if isinstance(expr, And):
            return all(self._eval(p, bindings, paths) for p in expr.parts)
        if isinstance(expr, Or):
            return any(self._eval(p, bindings, paths) for p in expr.parts)
        if isinstance(expr, Not):
            return not self._eval(expr.part, bindings, paths)
        if isinstance(expr, Compare):
            return self._compare(expr, bindings)
        if isinstance(expr, HasLabel):
            bound = bindings.get(expr.var)
            return bound is not None and self.graph.node(bound).has_label(expr.label)
        if isinstance(expr, InPath):
            bound = bindings.get(expr.var)
            entry = paths.get(expr.path_var)
            return bound is not None and entry is not None and bound in entry[0]
        if isinstance(expr, SeqInPath):
            entry = paths.get(expr.path_var)
            if entry is None:
                return False
            hops = entry[1]
            return any(a == expr.first and b == expr.second
                       for a, b in zip(hops, hops[1:]))
        if isinstance(expr, Exists):
            return self._sub_match(expr.steps, expr.where, bindings, paths,
                                   unbounded=False, anchors=expr.anchors)
        if isinstance(expr, NotExists):
            return not self._sub_match(expr.steps, expr.where, bindings, paths,
                                       unbounded=True, anchors=expr.anchors)
        raise ValueError("unknown where node %r" % (expr,))

    def _sub_match(self, steps, where, bindings, paths, unbounded, anchors=()):
        try:
            self._enum_anchors(list(anchors), steps, where, dict(bindings),
                               dict(paths), unbounded)
        except _FoundOne:
            return True
        return False

    def _enum_anchors(self, anchors, steps, where, bindings, paths, unbounded):
        if not anchors:
            self._dfs(steps, 0, bindings, paths, where, unbounded,
                      on_row=_raise_found, returns=())
            return
        pred, rest = anchors[0], anchors[1:]
        for nid in self._candidates(pred):
            self._tick()
            node = self.graph.nodes.get(nid)
            if node is None or not pred.matches(node):
                continue
            if pred.var in bindings and bindings[pred.var] != nid:
                continue
            nb = dict(bindings)
            nb[pred.var] = nid
            self._enum_anchors(rest, steps, where, nb, paths, unbounded)

    def _candidates(self, pred):
        """Node ids worth testing against a predicate, via the label index."""
        candidates = None
        for label in pred.labels:
            ids = self.graph._by_label.get(label, [])
            if candidates is None or len(ids) < len(candidates):
                candidates = ids
        if candidates is None and pred.any_labels:
            pool = set()
            for label in pred.any_labels:
                pool.update(self.graph._by_label.get(label, []))
            candidates = pool
        if candidates is None:
            candidates = self.graph.nodes.keys()
        return sorted(candidates)

    # -- search ------------------------------------------------------------

    def _dfs(self, steps, idx, bindings, paths, where, unbounded, on_row, returns):
        self._tick()
        if idx == len(steps):
            if self._eval(where, bindings, paths):
                on_row(bindings, paths)
            return
        step = steps[idx]
        if step.src not in bindings:
            raise ValueError("step source %r is not bound yet" % step.src)
        src_id = bindings[step.src]
        dst_pred = step.dst if isinstance(step.dst, NodePred) else None
        for nid, edge, path_nodes, path_labels in self._targets(src_id, step, unbounded):
            if dst_pred is not None:
                if dst_pred.var in bindings:
                    if bindings[dst_pred.var] != nid:
                        continue
                    if not dst_pred.matches(self.graph.node(nid)):
                        continue
                elif not dst_pred.matches(self.graph.node(nid)):
                    continue
            else:
                if bindings.get(step.dst) != nid:
                    continue
            new_bindings = dict(bindings)
            if dst_pred is not None:
                new_bindings[dst_pred.var] = nid
            if step.edge_var is not None:
                new_bindings[step.edge_var] = edge
            new_paths = paths
            if step.path_var is not None and path_nodes is not None:
                new_paths = dict(paths)
                prev = paths.get(step.path_var)
                if prev and prev[0][-1] == path_nodes[0]:
                    new_paths[step.path_var] = (prev[0] + path_nodes[1:],
                                                prev[1] + path_labels)
                else:
                    new_paths[step.path_var] = (list(path_nodes), list(path_labels))
            self._dfs(steps, idx + 1, new_bindings, new_paths, where, unbounded,
                      on_row, returns)

    def match(self, pattern, find_one=False):
        rows = {}

        def on_row(bindings, paths):
            keys = pattern.returns or tuple(
                sorted(v for v, b in bindings.items() if isinstance(b, int)))
            key = tuple(bindings[v] for v in keys)
            if key not in rows:
                rows[key] = {v: bindings[v] for v in keys}
            if find_one:
                raise _FoundOne()

        anchor = pattern.anchor
        for nid in self._candidates(anchor):
            self.budget.check()
            node = self.graph.nodes.get(nid)
            if node is None or not anchor.matches(node):
                continue
            self._dfs(pattern.steps, 0, {anchor.var: nid}, {}, pattern.where,
                      False, on_row, pattern.returns)
        ordered = [rows[k] for k in sorted(rows)]
        return ordered


def _raise_found(bindings, paths):
    raise _FoundOne()


def run(graph, pattern, budget=None):
    """Match one pattern; returns rows plus a completeness flag."""
    budget = budget or Budget()
    budget.start()
    matcher = _Matcher(graph, budget)
    rows = matcher.match(pattern)
    return MatchResult(rows, complete=not matcher.truncated)


def analyze_with_budget(graph, patterns, ladder=DEFAULT_LADDER,
                        wall_clock_limit=DEFAULT_WALL_CLOCK_LIMIT, clock=None):
    """Run a pattern set under a descending hop-cap ladder.

    Each rung gets an equal slice of the wall-clock allowance; a rung
    that times out is abandoned and the whole set is retried with the
    next smaller cap (cheaper, hence likelier to fit). Returns
    (results by pattern name, completed flag). A ladder that runs dry
    returns whatever the last rung produced, flagged incomplete.
    """
    slice_limit = wall_clock_limit / max(1, len(ladder))
    partial = {p.name: MatchResult([], complete=False) for p in patterns}
    for cap in ladder:
        budget = Budget(hop_cap=cap, wall_clock_limit=slice_limit, clock=clock)
        results = {}
        complete = True
        try:
            for pattern in patterns:
                res = run(graph, pattern, budget)
                results[pattern.name] = res
                complete = complete and res.complete
            return results, complete
        except BudgetExhausted:
            for name, res in results.items():
                partial[name] = MatchResult(res.rows, complete=False)
            continue
    return partial, False
