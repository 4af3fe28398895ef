"""Translate snippet ASTs into code property graphs.

The translation produces AST edges mirroring the syntax tree plus role
edges (LHS, CALLEE, ARGUMENTS and friends) that queries use to navigate
without caring about child positions. Evaluation-order and data-flow
edges are added afterwards by the passes module.

A few Solidity-specific choices worth knowing about:

* Environment accesses (msg.sender, tx.origin, block.*, now) become
  member expressions that also carry the DeclaredReferenceExpression
  label; their `code` is the literal source text.
* `a.call.value(x)(y)` is wired so the value call keeps a BASE/CALLEE
  chain that reaches both the `call` member and the address-typed
  receiver. Queries rely on both routes.
* Snippets whose top level holds bare functions or statements are
  wrapped in inferred records/functions (isInferred=true, empty name).
"""

from ..parser import ast
from . import graph as g

BUILTIN_BASES = frozenset(["msg", "tx", "block"])

ENV_MEMBER_TYPES = {
    "msg.sender": "address",
    "msg.value": "uint",
    "msg.data": "bytes",
    "msg.gas": "uint",
    "msg.sig": "bytes4",
    "tx.origin": "address",
    "tx.gasprice": "uint",
    "block.timestamp": "uint",
    "block.number": "uint",
    "block.difficulty": "uint",
    "block.coinbase": "address",
    "block.gaslimit": "uint",
    "now": "uint",
    "this.balance": "uint",
    "msg.data.length": "uint",
}

LOW_LEVEL_MEMBERS = frozenset(["call", "callcode", "delegatecall"])
CALL_MODIFIER_MEMBERS = frozenset(["value", "gas"])

UNIT_FACTORS = {
    "wei": 1,
    "gwei": 10**9,
    "szabo": 10**12,
    "finney": 10**15,
    "ether": 10**18,
    "seconds": 1,
    "minutes": 60,
    "hours": 3600,
    "days": 86400,
    "weeks": 604800,
    "years": 31536000,
}


class TranslationError(Exception):
    pass


def infer_wrappers(snippet):
    """Wrap orphan top-level constructs in inferred declarations.

    Bare functions get an inferred contract; bare statements get an
    inferred function inside an inferred contract. When a snippet mixes
    loose variable declarations with loose functions, the variables are
    promoted to fields so that references inside the functions resolve.
    Returns a new SnippetAst sharing the original nodes.
    """
    contracts = []
    functions = []
    statements = []
    var_decls = []
    for root in snippet.roots:
        if root.kind == ast.CONTRACT_DEF:
            contracts.append(root)
        elif root.kind in (ast.FUNCTION_DEF, ast.CONSTRUCTOR_DEF, ast.MODIFIER_DEF,
                           ast.STRUCT_DEF, ast.EVENT_DEF):
            functions.append(root)
        elif root.kind == ast.VAR_DECL:
            var_decls.append(root)
        else:
            statements.append(root)

    new_roots = list(contracts)
    orphan_members = list(functions)

    if functions and var_decls:
        # state-variable intent: `address owner;` next to `function f()...`
        for decl in var_decls:
            field = ast.AstNode(ast.FIELD_DECL)
            field.start, field.end = decl.start, decl.end
            field.line, field.col = decl.line, decl.col
            field.children = decl.children
            field.attrs = dict(decl.attrs)
            orphan_members.append(field)
        var_decls = []

    statements = var_decls + statements
    if statements:
        body = ast.AstNode(ast.BLOCK, attrs={"is_inferred": True})
        body.children = statements
        fn = ast.AstNode(ast.FUNCTION_DEF, attrs={
            "is_inferred": True, "name": "", "params": [], "returns": [],
            "modifiers": [], "body": body,
        })
        fn.add(body)
        orphan_members.append(fn)

    if orphan_members:
        wrapper = ast.AstNode(ast.CONTRACT_DEF, attrs={
            "is_inferred": True, "name": "", "record_kind": "contract", "bases": [],
        })
        wrapper.children = orphan_members
        new_roots.append(wrapper)

    wrapped = ast.SnippetAst(
        roots=new_roots,
        shape=snippet.shape,
        placeholders_skipped=snippet.placeholders_skipped,
        source_id=snippet.source_id,
        source=snippet.source,
        pragmas=list(snippet.pragmas),
        diagnostics=list(snippet.diagnostics),
    )
    return wrapped


class Translator:
    def __init__(self, snippet, graph):
        self.snippet = snippet
        self.graph = graph

    def code(self, node):
        return self.snippet.code_of(node).strip()

    def new(self, labels, astnode=None, **props):
        if astnode is not None:
            props.setdefault("code", self.code(astnode))
            props.setdefault("line", astnode.line)
            props.setdefault("col", astnode.col)
        return self.graph.new_node(labels, **props)

    # ------------------------------------------------------------------

    def translate_unit(self):
        root = self.new([g.BLOCK], kind="translation-unit", code="",
                        localName=self.snippet.source_id, name=self.snippet.source_id)
        self.graph.roots.append(root.id)
        self.graph.pragmas = list(self.snippet.pragmas)
        for r in self.snippet.roots:
            child = self.translate_top(r)
            if child is not None:
                self.graph.add_edge(root, child, g.AST)
        return root

    def translate_top(self, node):
        if node.kind == ast.CONTRACT_DEF:
            return self.translate_contract(node)
        raise TranslationError("unexpected top-level node %s" % node.kind)

    def translate_contract(self, node):
        labels = [g.RECORD_DECLARATION]
        rec = self.new(
            labels,
            node,
            kind=node.attr("record_kind", "contract"),
            localName=node.attr("name", ""),
            name=node.attr("name", ""),
            bases=list(node.attr("bases", [])),
        )
        if node.attr("is_inferred"):
            rec.properties["isInferred"] = True
            rec.properties["code"] = ""
        for member in node.children:
            child = self.translate_member(member, rec)
            if child is not None:
                self.graph.add_edge(rec, child, g.AST)
        return rec

    def translate_member(self, node, rec):
        kind = node.kind
        if kind == ast.FIELD_DECL:
            field = self.new([g.FIELD_DECLARATION, g.VARIABLE_DECLARATION], node,
                             localName=node.attr("name", ""),
                             name=node.attr("name", ""),
                             typeName=node.attr("type", ""))
            self.graph.add_edge(rec, field, g.FIELDS)
            if node.attr("has_init") and node.children:
                init = self.translate_expr(node.children[0])
                self.graph.add_edge(field, init, g.INITIALIZER)
                self.graph.add_edge(field, init, g.AST)
            return field
        if kind in (ast.FUNCTION_DEF, ast.CONSTRUCTOR_DEF):
            return self.translate_function(node, rec)
        if kind == ast.MODIFIER_DEF:
            return self.translate_modifier(node)
        if kind == ast.STRUCT_DEF:
            return self.translate_struct(node)
        if kind == ast.EVENT_DEF:
            return self.translate_event(node)
        # stray statements inside a record body: keep them but do not give
        # them evaluation order (there is no function to anchor them)
        return self.translate_stmt(node)

    def translate_function(self, node, rec):
        is_ctor = node.kind == ast.CONSTRUCTOR_DEF
        labels = [g.FUNCTION_DECLARATION]
        if is_ctor:
            labels.append(g.CONSTRUCTOR_DECLARATION)
        name = "" if node.attr("is_inferred") else (node.attr("name") or "")
        fn = self.new(labels, node, localName=name, name=name,
                      visibility=node.attr("visibility"),
                      mutability=list(node.attr("mutability", [])))
        if node.attr("is_inferred"):
            fn.properties["isInferred"] = True
            fn.properties["code"] = ""
        self._translate_params(fn, node.attr("params", []))
        invocations = []
        for mname, margs in node.attr("modifiers", []):
            arg_ids = []
            for arg in margs:
                arg_node = self.translate_expr(arg)
                self.graph.add_edge(fn, arg_node, g.AST, role="modifier-arg")
                arg_ids.append(arg_node.id)
            invocations.append((mname, arg_ids))
        fn.properties["modifierInvocations"] = invocations
        body = node.attr("body")
        if body is not None:
            block = self.translate_stmt(body)
            self.graph.add_edge(fn, block, g.BODY)
            self.graph.add_edge(fn, block, g.AST)
        return fn

    def translate_modifier(self, node):
        mod = self.new([g.MODIFIER_DECLARATION], node,
                       localName=node.attr("name", ""), name=node.attr("name", ""))
        self._translate_params(mod, node.attr("params", []))
        body = node.attr("body")
        if body is not None:
            block = self.translate_stmt(body)
            self.graph.add_edge(mod, block, g.BODY)
            self.graph.add_edge(mod, block, g.AST)
        return mod

    def _translate_params(self, owner, params):
        for i, p in enumerate(params):
            pv = self.new([g.PARAM_VARIABLE_DECLARATION, g.VARIABLE_DECLARATION], p,
                          localName=p.attr("name", ""), name=p.attr("name", ""),
                          typeName=p.attr("type", ""))
            self.graph.add_edge(owner, pv, g.PARAMETERS, INDEX=i)
            self.graph.add_edge(owner, pv, g.AST)

    def translate_struct(self, node):
        rec = self.new([g.RECORD_DECLARATION], node,
                       kind=node.attr("record_kind", "struct"),
                       localName=node.attr("name", ""), name=node.attr("name", ""))
        for member in node.children:
            field = self.new([g.FIELD_DECLARATION, g.VARIABLE_DECLARATION], member,
                             localName=member.attr("name", ""),
                             name=member.attr("name", ""),
                             typeName=member.attr("type", ""))
            self.graph.add_edge(rec, field, g.FIELDS)
            self.graph.add_edge(rec, field, g.AST)
        return rec

    def translate_event(self, node):
        rec = self.new([g.RECORD_DECLARATION], node, kind="event",
                       localName=node.attr("name", ""), name=node.attr("name", ""))
        for member in node.children:
            if member.kind != ast.PARAM_DECL:
                continue
            field = self.new([g.FIELD_DECLARATION, g.VARIABLE_DECLARATION], member,
                             localName=member.attr("name", ""),
                             name=member.attr("name", ""),
                             typeName=member.attr("type", ""))
            self.graph.add_edge(rec, field, g.FIELDS)
            self.graph.add_edge(rec, field, g.AST)
        return rec

    # ------------------------------------------------------------------
    # statements

    def translate_stmt(self, node):
        kind = node.kind
        if kind == ast.BLOCK:
            block = self.new([g.BLOCK], node)
            if node.attr("assembly"):
                block.properties["assembly"] = True
            for child in node.children:
                sub = self.translate_stmt(child)
                if sub is not None:
                    self.graph.add_edge(block, sub, g.AST)
            return block
        if kind == ast.EXPRESSION_STMT:
            return self.translate_expr(node.children[0])
        if kind == ast.VAR_DECL:
            decl = self.new([g.VARIABLE_DECLARATION], node,
                            localName=node.attr("name", ""), name=node.attr("name", ""),
                            typeName=node.attr("type", ""))
            if node.attr("has_init") and node.children:
                init = self.translate_expr(node.children[0])
                self.graph.add_edge(decl, init, g.INITIALIZER)
                self.graph.add_edge(decl, init, g.AST)
            return decl
        if kind == ast.IF:
            n = self.new([g.IF_STATEMENT], node)
            cond = self.translate_expr(node.children[0])
            self.graph.add_edge(n, cond, g.CONDITION)
            self.graph.add_edge(n, cond, g.AST)
            then = self.translate_stmt(node.children[1])
            if then is not None:
                self.graph.add_edge(n, then, g.AST, role="then")
                n.properties["thenId"] = then.id
            if node.attr("has_else") and len(node.children) > 2:
                els = self.translate_stmt(node.children[2])
                if els is not None:
                    self.graph.add_edge(n, els, g.AST, role="else")
                    n.properties["elseId"] = els.id
            return n
        if kind == ast.FOR:
            n = self.new([g.FOR_STATEMENT], node)
            for role in ("init", "cond", "update"):
                part = node.attr(role)
                if part is None:
                    continue
                sub = self.translate_stmt(part) if role == "init" else self.translate_expr(part)
                self.graph.add_edge(n, sub, g.AST, role=role)
                n.properties[role + "Id"] = sub.id
                if role == "cond":
                    self.graph.add_edge(n, sub, g.CONDITION)
            body = self.translate_stmt(node.attr("body"))
            if body is not None:
                self.graph.add_edge(n, body, g.AST, role="body")
                n.properties["bodyId"] = body.id
            return n
        if kind == ast.WHILE:
            n = self.new([g.WHILE_STATEMENT], node)
            cond = self.translate_expr(node.children[0])
            self.graph.add_edge(n, cond, g.CONDITION)
            self.graph.add_edge(n, cond, g.AST)
            body = self.translate_stmt(node.children[1]) if len(node.children) > 1 else None
            if body is not None:
                self.graph.add_edge(n, body, g.AST, role="body")
                n.properties["bodyId"] = body.id
            return n
        if kind == ast.DO_WHILE:
            n = self.new([g.DO_STATEMENT], node)
            body = self.translate_stmt(node.children[0])
            if body is not None:
                self.graph.add_edge(n, body, g.AST, role="body")
                n.properties["bodyId"] = body.id
            cond = self.translate_expr(node.children[1])
            self.graph.add_edge(n, cond, g.CONDITION)
            self.graph.add_edge(n, cond, g.AST)
            return n
        if kind == ast.RETURN:
            n = self.new([g.RETURN_STATEMENT], node)
            if node.children:
                value = self.translate_expr(node.children[0])
                self.graph.add_edge(n, value, g.AST)
                n.properties["valueId"] = value.id
            return n
        if kind == ast.EMIT_STMT:
            n = self.new([g.EMIT_STATEMENT], node)
            call = self.translate_expr(node.children[0])
            self.graph.add_edge(n, call, g.AST)
            return n
        if kind == ast.PLACEHOLDER_UNDERSCORE:
            return self.new([g.LITERAL], node, localName="_", placeholder=True)
        if kind in (ast.FUNCTION_DEF, ast.CONSTRUCTOR_DEF):
            return self.translate_function(node, None)
        if kind == ast.MODIFIER_DEF:
            return self.translate_modifier(node)
        if kind == ast.STRUCT_DEF:
            return self.translate_struct(node)
        if kind == ast.EVENT_DEF:
            return self.translate_event(node)
        if kind == ast.CONTRACT_DEF:
            return self.translate_contract(node)
        if kind == ast.FIELD_DECL:
            # inside struct bodies this is handled by translate_struct;
            # anywhere else treat it like a variable declaration
            decl = self.new([g.VARIABLE_DECLARATION], node,
                            localName=node.attr("name", ""), name=node.attr("name", ""),
                            typeName=node.attr("type", ""))
            return decl
        # expression used in statement position
        return self.translate_expr(node)

    # ------------------------------------------------------------------
    # expressions

    def translate_expr(self, node):
        kind = node.kind
        if kind == ast.IDENTIFIER:
            props = {"localName": node.attr("name", ""), "name": node.attr("name", "")}
            if node.attr("type_keyword"):
                props["typeKeyword"] = True
            if node.attr("name") in BUILTIN_BASES or node.attr("name") in ("this", "now", "super"):
                props["builtinPath"] = node.attr("name")
            ref = self.new([g.DECLARED_REFERENCE_EXPRESSION], node, **props)
            return ref
        if kind == ast.LITERAL:
            return self._translate_literal(node)
        if kind == ast.MEMBER_ACCESS:
            return self._translate_member_access(node)
        if kind == ast.INDEX:
            base = self.translate_expr(node.children[0])
            n = self.new([g.MEMBER_EXPRESSION], node, kind="subscript", localName="")
            self.graph.add_edge(n, base, g.ARRAY_EXPRESSION)
            self.graph.add_edge(n, base, g.AST)
            if node.attr("has_subscript") and len(node.children) > 1:
                sub = self.translate_expr(node.children[1])
                self.graph.add_edge(n, sub, g.SUBSCRIPT_EXPRESSION)
                self.graph.add_edge(n, sub, g.AST)
            return n
        if kind in (ast.BINARY_OP, ast.ASSIGNMENT):
            op = node.attr("operator")
            n = self.new([g.BINARY_OPERATOR], node, operatorCode=op)
            lhs = self.translate_expr(node.children[0])
            rhs = self.translate_expr(node.children[1])
            self.graph.add_edge(n, lhs, g.LHS)
            self.graph.add_edge(n, rhs, g.RHS)
            self.graph.add_edge(n, lhs, g.AST)
            self.graph.add_edge(n, rhs, g.AST)
            if op == "?:" and len(node.children) > 2:
                third = self.translate_expr(node.children[2])
                self.graph.add_edge(n, third, g.AST)
            return n
        if kind == ast.UNARY_OP:
            n = self.new([g.UNARY_OPERATOR], node,
                         operatorCode=node.attr("operator"),
                         prefix=bool(node.attr("prefix", True)))
            operand = self.translate_expr(node.children[0])
            self.graph.add_edge(n, operand, g.INPUT)
            self.graph.add_edge(n, operand, g.AST)
            return n
        if kind == ast.CALL:
            return self._translate_call(node)
        if kind == ast.CALL_OPTIONS:
            return self._translate_call_options(node)
        if kind in (ast.REQUIRE, ast.ASSERT, ast.REVERT):
            name = {ast.REQUIRE: "require", ast.ASSERT: "assert", ast.REVERT: "revert"}[kind]
            if node.attr("legacy"):
                name = "throw"
            n = self.new([g.CALL_EXPRESSION], node, localName=name, name=name,
                         rollback=True)
            for i, arg in enumerate(node.children):
                a = self.translate_expr(arg)
                self.graph.add_edge(n, a, g.ARGUMENTS, INDEX=i)
                self.graph.add_edge(n, a, g.AST)
            return n
        if kind == ast.PLACEHOLDER_UNDERSCORE:
            return self.new([g.LITERAL], node, localName="_", placeholder=True)
        if kind == ast.BLOCK:
            return self.translate_stmt(node)
        raise TranslationError("unsupported AST kind %s" % kind)

    def _translate_literal(self, node):
        raw = node.attr("value", "")
        lit_kind = node.attr("literal_kind", "number")
        value = raw
        type_name = "uint"
        if lit_kind == "number":
            try:
                if "." in raw or ("e" in raw.lower() and not raw.lower().startswith("0x")):
                    value = float(raw.replace("_", ""))
                else:
                    value = int(raw.replace("_", ""), 0)
                value = value * UNIT_FACTORS.get(node.attr("unit", ""), 1)
                if isinstance(value, float) and value.is_integer():
                    value = int(value)
            except ValueError:
                value = raw
        elif lit_kind == "string":
            value = raw[1:-1] if len(raw) >= 2 else raw
            type_name = "string"
        elif lit_kind == "bool":
            value = raw == "true"
            type_name = "bool"
        return self.new([g.LITERAL], node, value=value, typeName=type_name)

    def _translate_member_access(self, node):
        base = self.translate_expr(node.children[0])
        member = node.attr("member", "")
        labels = [g.MEMBER_EXPRESSION]
        props = {"localName": member, "name": member}
        base_path = base.prop("builtinPath")
        if base_path is not None:
            path = base_path + "." + member
            props["builtinPath"] = path
            labels.append(g.DECLARED_REFERENCE_EXPRESSION)
        n = self.new(labels, node, **props)
        self.graph.add_edge(n, base, g.BASE)
        self.graph.add_edge(n, base, g.AST)
        return n

    def _translate_call_options(self, node):
        wrapped = self.translate_expr(node.children[0])
        spec = self.new([g.SPECIFIED_EXPRESSION], node,
                        localName=wrapped.prop("localName", ""),
                        name=wrapped.prop("localName", ""))
        self.graph.add_edge(spec, wrapped, g.CALLEE)
        self.graph.add_edge(spec, wrapped, g.AST)
        receiver = self._receiver_of(wrapped)
        if receiver is not None:
            self.graph.add_edge(spec, receiver, g.BASE)
        keys = node.attr("keys", [])
        for i, key in enumerate(keys):
            value = self.translate_expr(node.children[1 + i])
            kv = self.new([g.KEY_VALUE_EXPRESSION], node, localName=key, code=key)
            key_node = self.graph.new_node([g.LITERAL], localName=key, name=key,
                                           value=key, code=key)
            self.graph.add_edge(kv, key_node, g.KEY)
            self.graph.add_edge(kv, key_node, g.AST)
            self.graph.add_edge(kv, value, g.VALUE)
            self.graph.add_edge(kv, value, g.AST)
            self.graph.add_edge(spec, kv, g.SPECIFIERS)
            self.graph.add_edge(spec, value, g.VALUE)
            self.graph.add_edge(spec, kv, g.AST)
        return spec

    def _receiver_of(self, node):
        """The object an access chain is applied to (one BASE hop)."""
        for e in self.graph.out_edges(node, [g.BASE]):
            return self.graph.node(e.dst)
        return None

    def _translate_call(self, node):
        callee_ast = node.children[0]
        callee = self.translate_expr(callee_ast)
        local_name = ""
        if callee.has_label(g.DECLARED_REFERENCE_EXPRESSION) and not callee.has_label(g.MEMBER_EXPRESSION):
            local_name = callee.prop("localName", "")
        elif callee.has_label(g.MEMBER_EXPRESSION):
            local_name = callee.prop("localName", "")
        elif callee.has_label(g.SPECIFIED_EXPRESSION):
            local_name = callee.prop("localName", "")
        call = self.new([g.CALL_EXPRESSION], node, localName=local_name, name=local_name)
        self.graph.add_edge(call, callee, g.CALLEE)
        self.graph.add_edge(call, callee, g.AST)

        # receiver wiring; the low-level `.call.value(x)` chain is special
        receiver = None
        if callee.has_label(g.MEMBER_EXPRESSION) and not callee.has_label(g.SPECIFIED_EXPRESSION):
            receiver = self._receiver_of(callee)
            if (
                local_name in CALL_MODIFIER_MEMBERS
                and receiver is not None
                and receiver.has_label(g.MEMBER_EXPRESSION)
                and receiver.prop("localName") in LOW_LEVEL_MEMBERS
            ):
                address_root = self._receiver_of(receiver)
                if address_root is not None:
                    # value/gas member skips to the address; the call keeps
                    # the low-level member reachable via BASE
                    for e in list(self.graph.out_edges(callee, [g.BASE])):
                        self.graph.remove_edge(e)
                    self.graph.add_edge(callee, address_root, g.BASE)
                    self.graph.add_edge(call, receiver, g.BASE)
                    receiver = None
        elif callee.has_label(g.SPECIFIED_EXPRESSION):
            receiver = self._receiver_of(callee)
        if receiver is not None:
            self.graph.add_edge(call, receiver, g.BASE)
        if callee.has_label(g.SPECIFIED_EXPRESSION):
            for e in self.graph.out_edges(callee, [g.SPECIFIERS]):
                self.graph.add_edge(call, e.dst, g.SPECIFIERS)

        for i, arg in enumerate(node.children[1:]):
            a = self.translate_expr(arg)
            self.graph.add_edge(call, a, g.ARGUMENTS, INDEX=i)
            self.graph.add_edge(call, a, g.AST)
        return call


def translate(snippet, source_id=None):
    """AST to property graph, structure only (no EOG/DFG/resolution)."""
    wrapped = infer_wrappers(snippet)
    cpg = g.CpgGraph(source_id or snippet.source_id)
    Translator(wrapped, cpg).translate_unit()
    return cpg
