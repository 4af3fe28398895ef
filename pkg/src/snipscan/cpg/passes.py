"""Graph passes run after structural translation.

Order matters: modifier expansion first (it clones subtrees, which must
happen before any reference or flow edges exist), then name resolution,
then evaluation order, then data flow.
"""

from . import graph as g
from .build import ENV_MEMBER_TYPES

# properties that store node ids and must be remapped when copying
_ID_PROPS = ("thenId", "elseId", "bodyId", "initId", "condId", "updateId", "valueId")

ROLE_EDGE_LABELS = [
    g.AST, g.BODY, g.PARAMETERS, g.FIELDS, g.INITIALIZER, g.CONDITION,
    g.LHS, g.RHS, g.INPUT, g.CALLEE, g.BASE, g.ARGUMENTS, g.SPECIFIERS,
    g.KEY, g.VALUE, g.SUBSCRIPT_EXPRESSION, g.ARRAY_EXPRESSION,
]

ASSIGN_OPS = frozenset(["=", "+=", "-=", "*=", "/=", "%=", "|=", "&=", "^=", "<<=", ">>="])

CONTRACT_KINDS = ("contract", "library", "interface")


def _ast_children(graph, node_id):
    return [e.dst for e in graph.out_edges(node_id, [g.AST])]


def _ast_subtree(graph, root_id):
    """All node ids reachable over AST edges, root included."""
    seen = []
    seen_set = set()
    stack = [root_id]
    while stack:
        nid = stack.pop()
        if nid in seen_set:
            continue
        seen_set.add(nid)
        seen.append(nid)
        stack.extend(_ast_children(graph, nid))
    return seen_set


def _single_target(graph, node_id, label):
    for e in graph.out_edges(node_id, [label]):
        return e.dst
    return None


def copy_subtree(graph, root_id):
    """Deep copy of an AST subtree including parallel role edges.

    Returns (new root id, old id -> new id mapping). Only edges whose
    endpoints both live inside the subtree are replicated, so this must
    run before flow passes introduce cross-tree edges.
    """
    members = _ast_subtree(graph, root_id)
    mapping = {}
    for old_id in sorted(members):
        old = graph.node(old_id)
        props = {}
        for k, v in old.properties.items():
            props[k] = list(v) if isinstance(v, list) else v
        new = graph.new_node(set(old.labels), **props)
        mapping[old_id] = new.id
    for edge in list(graph.edges):
        if edge.src in members and edge.dst in members:
            graph.add_edge(mapping[edge.src], mapping[edge.dst], edge.label,
                           **dict(edge.properties))
    for old_id, new_id in mapping.items():
        props = graph.node(new_id).properties
        for key in _ID_PROPS:
            if key in props and props[key] in mapping:
                props[key] = mapping[props[key]]
    return mapping[root_id], mapping


def _splice(graph, placeholder_id, replacement_id):
    """Rewire every edge touching the placeholder onto the replacement."""
    for edge in [e for e in graph.edges if e.dst == placeholder_id]:
        graph.add_edge(edge.src, replacement_id, edge.label, **dict(edge.properties))
    graph.remove_node(placeholder_id)


def expand_modifiers(graph):
    """Inline modifier bodies around guarded function bodies.

    Declared order is applied outside-in: the first modifier in the
    header ends up outermost. The first `_` occurrence receives the
    original body subtree (ids preserved); later occurrences get fresh
    copies. Unresolvable names produce an UnresolvedModifier diagnostic
    and are skipped.
    """
    mods_by_record = {}
    all_mods = {}
    records = {}
    for rec in sorted(graph.by_label(g.RECORD_DECLARATION), key=lambda n: n.id):
        if rec.prop("name"):
            records.setdefault(rec.prop("name"), rec.id)
        table = {}
        for child_id in _ast_children(graph, rec.id):
            child = graph.node(child_id)
            if child.has_label(g.MODIFIER_DECLARATION) and child.prop("name"):
                table.setdefault(child.prop("name"), child_id)
                all_mods.setdefault(child.prop("name"), child_id)
        mods_by_record[rec.id] = table

    def lookup(record_id, name):
        # own record, then transitively inherited ones, then anywhere
        queue = [record_id] if record_id is not None else []
        seen = set()
        while queue:
            rid = queue.pop(0)
            if rid in seen or rid is None:
                continue
            seen.add(rid)
            if name in mods_by_record.get(rid, {}):
                return mods_by_record[rid][name]
            for base in graph.node(rid).prop("bases", []):
                queue.append(records.get(base))
        return all_mods.get(name)

    record_of = {}
    for rec_id in mods_by_record:
        for child_id in _ast_children(graph, rec_id):
            record_of[child_id] = rec_id

    for fn in sorted(graph.by_label(g.FUNCTION_DECLARATION), key=lambda n: n.id):
        invocations = fn.prop("modifierInvocations") or []
        if not invocations:
            continue
        body_id = _single_target(graph, fn.id, g.BODY)
        if body_id is None:
            continue
        original_body = body_id
        wrapped = body_id
        for name, arg_ids in reversed(invocations):
            mod_id = lookup(record_of.get(fn.id), name)
            if mod_id is None:
                graph.diagnostics.append({"kind": "UnresolvedModifier",
                                          "name": name, "function": fn.id})
                continue
            mod_body = _single_target(graph, mod_id, g.BODY)
            if mod_body is None:
                graph.diagnostics.append({"kind": "UnresolvedModifier",
                                          "name": name, "function": fn.id})
                continue
            copy_root, mapping = copy_subtree(graph, mod_body)

            # substitute modifier parameters with the invocation arguments
            params = sorted(graph.out_edges(mod_id, [g.PARAMETERS]),
                            key=lambda e: e.prop("INDEX", 0))
            for idx, pe in enumerate(params):
                if idx >= len(arg_ids):
                    break
                pname = graph.node(pe.dst).prop("localName")
                if not pname:
                    continue
                for old_id, new_id in sorted(mapping.items()):
                    if new_id not in graph.nodes:
                        continue
                    ref = graph.node(new_id)
                    if (ref.has_label(g.DECLARED_REFERENCE_EXPRESSION)
                            and not ref.has_label(g.MEMBER_EXPRESSION)
                            and ref.prop("localName") == pname):
                        arg_copy, _ = copy_subtree(graph, arg_ids[idx])
                        _splice(graph, new_id, arg_copy)

            # splice the wrapped body into `_` placeholders
            placeholders = sorted(
                nid for nid in mapping.values()
                if nid in graph.nodes and graph.node(nid).prop("placeholder")
            )
            for occurrence, ph in enumerate(placeholders):
                if occurrence == 0:
                    _splice(graph, ph, wrapped)
                else:
                    dup_root, _ = copy_subtree(graph, wrapped)
                    _splice(graph, ph, dup_root)
            wrapped = copy_root

        if wrapped != original_body:
            for e in list(graph.out_edges(fn.id, [g.BODY])):
                graph.remove_edge(e)
            for e in list(graph.out_edges(fn.id, [g.AST])):
                if e.dst == original_body:
                    graph.remove_edge(e)
            graph.add_edge(fn.id, wrapped, g.BODY)
            graph.add_edge(fn.id, wrapped, g.AST)


# ----------------------------------------------------------------------
# name and call resolution

class _Resolver:
    def __init__(self, graph):
        self.graph = graph
        self.records_by_name = {}
        self.fields_of = {}     # record id -> {name: field id}
        self.methods_of = {}    # record id -> {name: [function ids]}
        self.parent = {}        # node id -> AST parent id
        self.type_cache = {}

    def run(self):
        graph = self.graph
        self._index_parents()
        self._index_records()
        self._inherit()
        self._resolve_references()
        self._resolve_calls()
        self._pseudo_declarations()
        self._type_edges()

    # -- indexing ------------------------------------------------------

    def _index_parents(self):
        for edge in self.graph.edges:
            if edge.label == g.AST and edge.dst not in self.parent:
                self.parent[edge.dst] = edge.src

    def _index_records(self):
        for rec in sorted(self.graph.by_label(g.RECORD_DECLARATION), key=lambda n: n.id):
            name = rec.prop("name")
            if name:
                self.records_by_name.setdefault(name, rec.id)
            fields = {}
            for e in self.graph.out_edges(rec.id, [g.FIELDS]):
                f = self.graph.node(e.dst)
                fields.setdefault(f.prop("localName"), e.dst)
            self.fields_of[rec.id] = fields
            methods = {}
            for child_id in _ast_children(self.graph, rec.id):
                child = self.graph.node(child_id)
                if child.has_label(g.FUNCTION_DECLARATION):
                    methods.setdefault(child.prop("localName"), []).append(child_id)
            self.methods_of[rec.id] = methods

    def _bases_of(self, rec_id):
        out = []
        for base in self.graph.node(rec_id).prop("bases", []):
            rid = self.records_by_name.get(base)
            if rid is not None:
                out.append(rid)
        return out

    def _inherit(self):
        """Copy FIELDS edges and method visibility down the hierarchy."""
        order = sorted(rid for rid in self.fields_of
                       if self.graph.node(rid).prop("kind") in CONTRACT_KINDS)
        for rec_id in order:
            seen = set()
            queue = self._bases_of(rec_id)
            while queue:
                base_id = queue.pop(0)
                if base_id in seen or base_id == rec_id:
                    continue
                seen.add(base_id)
                for fname, fid in self.fields_of.get(base_id, {}).items():
                    if fname not in self.fields_of[rec_id]:
                        self.fields_of[rec_id][fname] = fid
                        self.graph.add_edge(rec_id, fid, g.FIELDS)
                for mname, mids in self.methods_of.get(base_id, {}).items():
                    mine = self.methods_of[rec_id].setdefault(mname, [])
                    for mid in mids:
                        if mid not in mine:
                            mine.append(mid)
                queue.extend(self._bases_of(base_id))

    def _record_of(self, node_id):
        cur = node_id
        while cur is not None:
            node = self.graph.node(cur)
            if node.has_label(g.RECORD_DECLARATION):
                return cur
            cur = self.parent.get(cur)
        return None

    # -- reference resolution -------------------------------------------

    def _resolve_references(self):
        graph = self.graph
        callables = [n for n in graph.nodes.values()
                     if n.has_label(g.FUNCTION_DECLARATION)
                     or n.has_label(g.MODIFIER_DECLARATION)]
        for fn in sorted(callables, key=lambda n: n.id):
            scopes = []
            rec_id = self._record_of(self.parent.get(fn.id))
            if rec_id is not None:
                scopes.append(dict(self.fields_of.get(rec_id, {})))
            else:
                scopes.append({})
            params = {}
            for e in graph.out_edges(fn.id, [g.PARAMETERS]):
                params[graph.node(e.dst).prop("localName")] = e.dst
            scopes.append(params)
            body_id = _single_target(graph, fn.id, g.BODY)
            if body_id is not None:
                self._walk_scope(body_id, scopes)
        # field initializers see only the record's fields
        for rec_id in sorted(self.fields_of):
            scope = [dict(self.fields_of[rec_id])]
            for e in self.graph.out_edges(rec_id, [g.FIELDS]):
                init = _single_target(self.graph, e.dst, g.INITIALIZER)
                if init is not None:
                    self._walk_scope(init, scope)

    def _walk_scope(self, node_id, scopes):
        graph = self.graph
        node = graph.node(node_id)
        if (node.has_label(g.FUNCTION_DECLARATION)
                or node.has_label(g.MODIFIER_DECLARATION)
                or node.has_label(g.RECORD_DECLARATION)):
            return
        if node.has_label(g.BLOCK):
            scopes.append({})
            for child in _ast_children(graph, node_id):
                self._walk_scope(child, scopes)
            scopes.pop()
            return
        if node.has_label(g.DECLARED_REFERENCE_EXPRESSION) and not node.has_label(g.MEMBER_EXPRESSION):
            if not (node.prop("builtinPath") or node.prop("typeKeyword")
                    or node.prop("placeholder") or node.prop("keyword")):
                decl = None
                for scope in reversed(scopes):
                    if node.prop("localName") in scope:
                        decl = scope[node.prop("localName")]
                        break
                if decl is not None:
                    graph.add_edge(node_id, decl, g.REFERS_TO)
                else:
                    node.properties["isInferred"] = True
            return
        for child in _ast_children(graph, node_id):
            self._walk_scope(child, scopes)
        if (node.has_label(g.VARIABLE_DECLARATION)
                and not node.has_label(g.FIELD_DECLARATION)
                and not node.has_label(g.PARAM_VARIABLE_DECLARATION)):
            scopes[-1][node.prop("localName")] = node_id

    # -- call resolution -------------------------------------------------

    def _functions_anywhere(self, name):
        return [n.id for n in sorted(self.graph.by_label(g.FUNCTION_DECLARATION),
                                     key=lambda n: n.id)
                if n.prop("localName") == name]

    def _param_count(self, fn_id):
        return len(list(self.graph.out_edges(fn_id, [g.PARAMETERS])))

    def _resolve_calls(self):
        graph = self.graph
        for call in sorted(graph.by_label(g.CALL_EXPRESSION), key=lambda n: n.id):
            if call.prop("rollback"):
                continue
            callee_id = _single_target(graph, call.id, g.CALLEE)
            if callee_id is None:
                continue
            callee = graph.node(callee_id)
            if callee.has_label(g.MEMBER_EXPRESSION) or callee.has_label(g.SPECIFIED_EXPRESSION):
                continue
            if not callee.has_label(g.DECLARED_REFERENCE_EXPRESSION):
                continue
            if callee.prop("builtinPath") or callee.prop("typeKeyword"):
                continue
            if any(True for _ in graph.out_edges(callee_id, [g.REFERS_TO])):
                continue  # resolved to a variable, target unknown statically
            name = callee.prop("localName")
            if not name:
                continue
            argc = len(list(graph.out_edges(call.id, [g.ARGUMENTS])))
            rec_id = self._record_of(call.id)
            candidates = []
            if rec_id is not None:
                candidates.extend(self.methods_of.get(rec_id, {}).get(name, []))
            for fid in self._functions_anywhere(name):
                if fid not in candidates:
                    candidates.append(fid)
            target = None
            for fid in candidates:
                if self._param_count(fid) == argc:
                    target = fid
                    break
            if target is None and len(candidates) == 1:
                # headers parsed without a parameter list lose their arity
                target = candidates[0]
            if target is None:
                callee.properties["isInferred"] = True
                continue
            graph.add_edge(call.id, target, g.INVOKES)
            graph.add_edge(callee_id, target, g.REFERS_TO)
            callee.properties.pop("isInferred", None)
            body_id = _single_target(graph, target, g.BODY)
            if body_id is not None:
                for ret_id in sorted(self._returns_in(body_id)):
                    graph.add_edge(ret_id, call.id, g.RETURNS)

    def _returns_in(self, body_id):
        found = []
        stack = [body_id]
        while stack:
            nid = stack.pop()
            node = self.graph.node(nid)
            if node.has_label(g.FUNCTION_DECLARATION) or node.has_label(g.MODIFIER_DECLARATION):
                continue
            if node.has_label(g.RETURN_STATEMENT):
                found.append(nid)
            stack.extend(_ast_children(self.graph, nid))
        return found

    # -- environment pseudo declarations ---------------------------------

    def _pseudo_declarations(self):
        graph = self.graph
        occurrences = [n for n in sorted(graph.nodes.values(), key=lambda n: n.id)
                       if n.prop("builtinPath") == "msg.data"]
        if not occurrences:
            return
        decl = graph.new_node([g.VARIABLE_DECLARATION],
                              localName="msg.data", name="msg.data",
                              code="msg.data", typeName="bytes", isInferred=True,
                              builtinDecl="msg.data")
        if graph.roots:
            graph.add_edge(graph.roots[0], decl.id, g.AST)

    # -- types -----------------------------------------------------------

    def _canonical_type(self, text):
        if not text:
            return "UNKNOWN"
        text = text.strip()
        if text.startswith("address payable"):
            text = "address" + text[len("address payable"):]
        if text == "var":
            return "UNKNOWN"
        return text or "UNKNOWN"

    def _type_node(self, text):
        name = self._canonical_type(text)
        if name in self.type_cache:
            return self.type_cache[name]
        node = self.graph.new_node([g.TYPE], localName=name, name=name, code=name)
        base_name = name.split("[")[0].strip()
        rec_id = self.records_by_name.get(base_name)
        if rec_id is not None:
            self.graph.add_label(node, g.OBJECT_TYPE)
            self.graph.add_edge(node.id, rec_id, g.RECORD_DECLARATION_EDGE)
        self.type_cache[name] = node.id
        return node.id

    def _type_edges(self):
        graph = self.graph
        for node in sorted(list(graph.nodes.values()), key=lambda n: n.id):
            if node.has_label(g.TYPE):
                continue
            if node.has_label(g.VARIABLE_DECLARATION):
                graph.add_edge(node.id, self._type_node(node.prop("typeName")), g.TYPE_EDGE)
            elif node.has_label(g.LITERAL) and node.prop("typeName"):
                graph.add_edge(node.id, self._type_node(node.prop("typeName")), g.TYPE_EDGE)
            elif node.has_label(g.DECLARED_REFERENCE_EXPRESSION):
                path = node.prop("builtinPath")
                if path is not None:
                    if path == "this":
                        rec_id = self._record_of(node.id)
                        rec = graph.node(rec_id) if rec_id is not None else None
                        tname = rec.prop("name") if rec is not None and rec.prop("name") else "UNKNOWN"
                        graph.add_edge(node.id, self._type_node(tname), g.TYPE_EDGE)
                    else:
                        graph.add_edge(
                            node.id,
                            self._type_node(ENV_MEMBER_TYPES.get(path, "UNKNOWN")),
                            g.TYPE_EDGE)
                    continue
                if node.prop("typeKeyword"):
                    graph.add_edge(node.id, self._type_node(node.prop("localName")), g.TYPE_EDGE)
                    continue
                decl_id = _single_target(graph, node.id, g.REFERS_TO)
                if decl_id is not None:
                    decl = graph.node(decl_id)
                    tname = decl.prop("typeName") if decl.prop("typeName") else "UNKNOWN"
                    graph.add_edge(node.id, self._type_node(tname), g.TYPE_EDGE)
                elif not node.has_label(g.MEMBER_EXPRESSION):
                    graph.add_edge(node.id, self._type_node("UNKNOWN"), g.TYPE_EDGE)


def resolve_refs_and_calls(graph):
    _Resolver(graph).run()


# ----------------------------------------------------------------------
# evaluation order

class _EogWalker:
    def __init__(self, graph):
        self.graph = graph

    def connect(self, frontier, target_id):
        for src in frontier:
            if src != target_id:
                self.graph.add_edge(src, target_id, g.EOG)
        return [target_id]

    def wire(self, frontier, seq):
        """Chain an expression evaluation sequence onto the frontier.

        require/assert fork off a Rollback successor and fall through;
        revert/throw end the path at a Rollback.
        """
        for nid in seq:
            frontier = self.connect(frontier, nid)
            node = self.graph.node(nid)
            if node.prop("rollback"):
                rb = self.graph.new_node([g.ROLLBACK], code="", localName="")
                self.graph.add_edge(nid, rb.id, g.EOG)
                if node.prop("localName") in ("revert", "throw"):
                    frontier = []
        return frontier

    # -- expression sequencing (purely syntactic, no edges) -------------

    def seq(self, node_id):
        graph = self.graph
        node = graph.node(node_id)
        if node.has_label(g.SPECIFIED_EXPRESSION):
            out = self.seq(_single_target(graph, node_id, g.CALLEE))
            for e in graph.out_edges(node_id, [g.SPECIFIERS]):
                value = _single_target(graph, e.dst, g.VALUE)
                if value is not None:
                    out.extend(self.seq(value))
                out.append(e.dst)
            out.append(node_id)
            return out
        if node.has_label(g.CALL_EXPRESSION):
            out = []
            callee = _single_target(graph, node_id, g.CALLEE)
            if callee is not None:
                out.extend(self.seq(callee))
            args = sorted(graph.out_edges(node_id, [g.ARGUMENTS]),
                          key=lambda e: e.prop("INDEX", 0))
            for e in args:
                out.extend(self.seq(e.dst))
            out.append(node_id)
            return out
        if node.has_label(g.MEMBER_EXPRESSION):
            if node.prop("kind") == "subscript":
                out = self.seq(_single_target(graph, node_id, g.ARRAY_EXPRESSION))
                sub = _single_target(graph, node_id, g.SUBSCRIPT_EXPRESSION)
                if sub is not None:
                    out.extend(self.seq(sub))
                out.append(node_id)
                return out
            base = _ast_children(graph, node_id)
            out = self.seq(base[0]) if base else []
            out.append(node_id)
            return out
        if node.has_label(g.BINARY_OPERATOR):
            lhs = _single_target(graph, node_id, g.LHS)
            rhs = _single_target(graph, node_id, g.RHS)
            extras = [c for c in _ast_children(graph, node_id) if c not in (lhs, rhs)]
            if node.prop("operatorCode") in ASSIGN_OPS:
                order = [rhs, lhs]
            else:
                order = [lhs, rhs] + extras
            out = []
            for part in order:
                if part is not None:
                    out.extend(self.seq(part))
            out.append(node_id)
            return out
        if node.has_label(g.UNARY_OPERATOR):
            operand = _single_target(graph, node_id, g.INPUT)
            out = self.seq(operand) if operand is not None else []
            out.append(node_id)
            return out
        if node.has_label(g.VARIABLE_DECLARATION):
            init = _single_target(graph, node_id, g.INITIALIZER)
            out = self.seq(init) if init is not None else []
            out.append(node_id)
            return out
        return [node_id]

    # -- statements ------------------------------------------------------

    def stmt(self, node_id, frontier):
        graph = self.graph
        node = graph.node(node_id)
        if (node.has_label(g.FUNCTION_DECLARATION)
                or node.has_label(g.MODIFIER_DECLARATION)
                or node.has_label(g.RECORD_DECLARATION)):
            return frontier
        if node.has_label(g.BLOCK):
            for child in _ast_children(graph, node_id):
                frontier = self.stmt(child, frontier)
            return self.connect(frontier, node_id)
        if node.has_label(g.IF_STATEMENT):
            cond = _single_target(graph, node_id, g.CONDITION)
            frontier = self.wire(frontier, self.seq(cond))
            frontier = self.connect(frontier, node_id)
            out = []
            then_id = node.prop("thenId")
            else_id = node.prop("elseId")
            if then_id is not None and then_id in graph.nodes:
                out.extend(self.stmt(then_id, [node_id]))
            if else_id is not None and else_id in graph.nodes:
                out.extend(self.stmt(else_id, [node_id]))
            else:
                out.append(node_id)
            return out
        if node.has_label(g.WHILE_STATEMENT) or node.has_label(g.FOR_STATEMENT):
            init_id = node.prop("initId")
            if init_id is not None and init_id in graph.nodes:
                frontier = self.stmt(init_id, frontier)
            cond_id = node.prop("condId") if node.has_label(g.FOR_STATEMENT) \
                else _single_target(graph, node_id, g.CONDITION)
            cond_seq = self.seq(cond_id) if cond_id is not None else []
            if cond_seq:
                frontier = self.wire(frontier, cond_seq)
            frontier = self.connect(frontier, node_id)
            body_id = node.prop("bodyId")
            body_frontier = [node_id]
            if body_id is not None and body_id in graph.nodes:
                body_frontier = self.stmt(body_id, [node_id])
            update_id = node.prop("updateId")
            if update_id is not None and update_id in graph.nodes:
                body_frontier = self.wire(body_frontier, self.seq(update_id))
            back_target = cond_seq[0] if cond_seq else node_id
            for src in body_frontier:
                graph.add_edge(src, back_target, g.EOG)
            return [node_id]
        if node.has_label(g.DO_STATEMENT):
            frontier = self.connect(frontier, node_id)
            body_id = node.prop("bodyId")
            body_frontier = [node_id]
            if body_id is not None and body_id in graph.nodes:
                body_frontier = self.stmt(body_id, [node_id])
            cond = _single_target(graph, node_id, g.CONDITION)
            if cond is not None:
                body_frontier = self.wire(body_frontier, self.seq(cond))
            for src in body_frontier:
                graph.add_edge(src, node_id, g.EOG)
            return [node_id]
        if node.has_label(g.RETURN_STATEMENT):
            value_id = node.prop("valueId")
            if value_id is not None and value_id in graph.nodes:
                frontier = self.wire(frontier, self.seq(value_id))
            self.connect(frontier, node_id)
            return []
        if node.has_label(g.EMIT_STATEMENT):
            children = _ast_children(graph, node_id)
            if children:
                frontier = self.wire(frontier, self.seq(children[0]))
            return self.connect(frontier, node_id)
        return self.wire(frontier, self.seq(node_id))


def pass_eog(graph):
    """Wire intraprocedural evaluation order.

    Functions are entries; a function's body Block node is its exit.
    Modifier declarations get no order of their own (their bodies run
    only where they were expanded).
    """
    walker = _EogWalker(graph)
    for fn in sorted(graph.by_label(g.FUNCTION_DECLARATION), key=lambda n: n.id):
        body_id = _single_target(graph, fn.id, g.BODY)
        if body_id is None:
            continue
        walker.stmt(body_id, [fn.id])


# ----------------------------------------------------------------------
# data flow

def _write_root(graph, node_id):
    """Follow an lvalue to the declaration it ultimately stores into."""
    seen = set()
    cur = node_id
    while cur is not None and cur not in seen:
        seen.add(cur)
        node = graph.node(cur)
        if node.has_label(g.VARIABLE_DECLARATION):
            return cur
        ref = _single_target(graph, cur, g.REFERS_TO)
        if ref is not None:
            return ref
        if node.has_label(g.MEMBER_EXPRESSION):
            if node.prop("kind") == "subscript":
                cur = _single_target(graph, cur, g.ARRAY_EXPRESSION)
            else:
                cur = _single_target(graph, cur, g.BASE)
            continue
        return None
    return None


def pass_dfg(graph):
    adds = []

    def add(src, dst):
        if src is not None and dst is not None and src != dst:
            adds.append((src, dst))

    pseudo = {}
    for node in graph.nodes.values():
        if node.prop("builtinDecl"):
            pseudo[node.prop("builtinDecl")] = node.id

    for edge in list(graph.edges):
        if edge.label == g.REFERS_TO:
            target = graph.node(edge.dst)
            if not (target.has_label(g.FUNCTION_DECLARATION)
                    or target.has_label(g.MODIFIER_DECLARATION)):
                add(edge.dst, edge.src)
        elif edge.label == g.INITIALIZER:
            add(edge.dst, edge.src)
        elif edge.label == g.CONDITION:
            add(edge.dst, edge.src)
        elif edge.label == g.RETURNS:
            add(edge.src, edge.dst)

    for node in sorted(graph.nodes.values(), key=lambda n: n.id):
        nid = node.id
        if node.has_label(g.MEMBER_EXPRESSION):
            if node.prop("kind") == "subscript":
                add(_single_target(graph, nid, g.ARRAY_EXPRESSION), nid)
                add(_single_target(graph, nid, g.SUBSCRIPT_EXPRESSION), nid)
            else:
                add(_single_target(graph, nid, g.BASE), nid)
            path = node.prop("builtinPath")
            if path is not None and path in pseudo:
                add(pseudo[path], nid)
        elif node.has_label(g.BINARY_OPERATOR):
            lhs = _single_target(graph, nid, g.LHS)
            rhs = _single_target(graph, nid, g.RHS)
            op = node.prop("operatorCode")
            if op in ASSIGN_OPS:
                add(rhs, nid)
                add(nid, lhs)
                root = _write_root(graph, lhs)
                add(lhs, root)
                if op != "=":
                    add(lhs, nid)
            else:
                add(lhs, nid)
                add(rhs, nid)
                for extra in _ast_children(graph, nid):
                    if extra not in (lhs, rhs):
                        add(extra, nid)
        elif node.has_label(g.UNARY_OPERATOR):
            operand = _single_target(graph, nid, g.INPUT)
            add(operand, nid)
            if node.prop("operatorCode") in ("++", "--", "delete"):
                add(operand, _write_root(graph, operand))
        elif node.has_label(g.CALL_EXPRESSION):
            if node.prop("rollback"):
                args = sorted(graph.out_edges(nid, [g.ARGUMENTS]),
                              key=lambda e: e.prop("INDEX", 0))
                if args:
                    add(args[0].dst, nid)
                continue
            target = _single_target(graph, nid, g.INVOKES)
            if target is not None:
                params = {e.prop("INDEX", 0): e.dst
                          for e in graph.out_edges(target, [g.PARAMETERS])}
                for e in graph.out_edges(nid, [g.ARGUMENTS]):
                    add(e.dst, params.get(e.prop("INDEX", 0)))
        elif node.has_label(g.SPECIFIED_EXPRESSION):
            add(_single_target(graph, nid, g.CALLEE), nid)
        elif node.has_label(g.KEY_VALUE_EXPRESSION):
            add(_single_target(graph, nid, g.VALUE), nid)
        elif node.has_label(g.RETURN_STATEMENT):
            value_id = node.prop("valueId")
            if value_id is not None and value_id in graph.nodes:
                add(value_id, nid)

    seen = set()
    for src, dst in adds:
        if (src, dst) not in seen:
            seen.add((src, dst))
            graph.add_edge(src, dst, g.DFG)
