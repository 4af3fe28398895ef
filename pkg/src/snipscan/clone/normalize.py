"""Identity-erasing source normalization for clone matching.

Rewrites a snippet into a canonical layout where contracts are named
`c`, libraries `l`, functions `f`, modifiers `m`, and every variable
reads as its declared type (`uint` when no type is known). String
literals collapse to `stringLiteral`, numeric literals stay, and
visibility, mutability, and data-location keywords disappear. Two
snippets that differ only in identifier choice normalize to the same
bytes.

State-variable and event declarations are omitted entirely: the token
stage ignores them anyway, and omitting them keeps the output stable
under repeated normalization (a typeless re-parse of `uint uint;`
would not survive a round trip).
"""

import re
from collections import namedtuple

from ..parser import ast, parse_source

# One fingerprintable unit: a contract header or a callable's code.
Segment = namedtuple("Segment", ["kind", "tokens"])

SEGMENT_CONTRACT = "contract"
SEGMENT_FUNCTION = "function"

# Words, the member dot, option colons, and operator runs survive the
# split; brackets, commas, semicolons, and braces do not.
_TOKEN = re.compile(r"[A-Za-z0-9_$]+|\.|:|[+\-*/%=!<>&|^~?]+")


def split_tokens(text):
    return _TOKEN.findall(text)

# Names that keep their meaning across any contract. `stringLiteral` is
# the replacement word this normal form itself introduces.
BUILTINS = frozenset([
    "msg", "tx", "block", "this", "super", "now", "abi",
    "selfdestruct", "suicide", "keccak256", "sha3", "sha256", "ripemd160",
    "ecrecover", "addmod", "mulmod", "blockhash", "gasleft",
    "stringLiteral",
])

_ELEMENTARY = re.compile(
    r"^(address|bool|string|byte|bytes\d*|u?int\d*|u?fixed[\dx]*|mapping)$")

_HEAD = re.compile(r"^[A-Za-z_$][A-Za-z0-9_$]*")

DEFAULT_TYPE = "uint"


def _type_head(type_text):
    m = _HEAD.match(type_text or "")
    return m.group(0) if m else ""


class _Renamer:
    """Scoped identifier renaming collected ahead of printing."""

    def __init__(self):
        self.scopes = [{}]
        self.type_names = {}      # declared record name -> its printed name

    def push(self):
        self.scopes.append({})

    def pop(self):
        self.scopes.pop()

    def declare(self, name, replacement):
        if name:
            self.scopes[-1][name] = replacement

    def declare_type(self, name, replacement):
        if name:
            self.type_names[name] = replacement

    def variable_name(self, type_text):
        """What a variable of this declared type reads as."""
        head = _type_head(type_text)
        if not head:
            return DEFAULT_TYPE
        if head == "address":
            return "address"
        if _ELEMENTARY.match(head):
            return head
        return self.type_names.get(head, DEFAULT_TYPE)

    def resolve(self, name):
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        if name in self.type_names:
            return self.type_names[name]
        if name in BUILTINS:
            return name
        return DEFAULT_TYPE


class _Printer:
    def __init__(self, renamer):
        self.r = renamer
        self.lines = []
        self.segments = []

    def emit(self, indent, text):
        self.lines.append("  " * indent + text)

    def _capture(self, mark, kind):
        tokens = split_tokens("\n".join(self.lines[mark:]))
        self.segments.append(Segment(kind, tuple(tokens)))

    # -- declarations --------------------------------------------------

    def collect_unit(self, roots):
        for root in roots:
            if root.kind == ast.CONTRACT_DEF:
                name = "l" if root.attr("record_kind") == "library" else "c"
                self.r.declare_type(root.attr("name"), name)
            elif root.kind in (ast.FUNCTION_DEF, ast.CONSTRUCTOR_DEF):
                self.r.declare(root.attr("name"), "f")
            elif root.kind == ast.MODIFIER_DEF:
                self.r.declare(root.attr("name"), "m")

    def collect_members(self, contract):
        for member in contract.children:
            if member.kind == ast.FIELD_DECL:
                self.r.declare(member.attr("name"),
                               self.r.variable_name(member.attr("type")))
            elif member.kind in (ast.FUNCTION_DEF, ast.CONSTRUCTOR_DEF):
                self.r.declare(member.attr("name"), "f")
            elif member.kind == ast.MODIFIER_DEF:
                self.r.declare(member.attr("name"), "m")
            elif member.kind == ast.STRUCT_DEF:
                self.r.declare_type(member.attr("name"), member.attr("name"))

    def collect_locals(self, node):
        for decl in node.find(ast.VAR_DECL):
            self.r.declare(decl.attr("name"),
                           self.r.variable_name(decl.attr("type")))
        for decl in node.find(ast.PARAM_DECL):
            self.r.declare(decl.attr("name"),
                           self.r.variable_name(decl.attr("type")))

    # -- structure -----------------------------------------------------

    def unit(self, snippet):
        self.collect_unit(snippet.roots)
        statements = []
        for root in snippet.roots:
            if root.kind == ast.CONTRACT_DEF:
                self.contract(root, 0)
            elif root.kind in (ast.FUNCTION_DEF, ast.CONSTRUCTOR_DEF,
                               ast.MODIFIER_DEF):
                self.callable_def(root, 0)
            elif root.kind in (ast.FIELD_DECL, ast.EVENT_DEF):
                continue
            elif root.kind == ast.STRUCT_DEF:
                self.struct(root, 0)
            else:
                statements.append(root)
        mark = len(self.lines)
        for stmt in statements:
            self.stmt(stmt, 0)
        if statements:
            # Bare statements act as one anonymous function body.
            self._capture(mark, SEGMENT_FUNCTION)
        return "\n".join(self.lines)

    def contract(self, node, indent):
        keyword = "library" if node.attr("record_kind") == "library" else "contract"
        name = self.r.type_names.get(node.attr("name"), "c")
        header = "%s %s" % (keyword, name)
        if node.attr("bases"):
            header += "".join(" is c" for _ in node.attr("bases"))
        self.segments.append(Segment(SEGMENT_CONTRACT, tuple(split_tokens(header))))
        self.r.push()
        self.collect_members(node)
        self.emit(indent, header + " {")
        for member in node.children:
            if member.kind in (ast.FUNCTION_DEF, ast.CONSTRUCTOR_DEF,
                               ast.MODIFIER_DEF):
                self.callable_def(member, indent + 1)
            elif member.kind == ast.STRUCT_DEF:
                self.struct(member, indent + 1)
            # fields and events are dropped
        self.emit(indent, "}")
        self.r.pop()

    def struct(self, node, indent):
        self.emit(indent, "struct %s {}" % node.attr("name"))

    def callable_def(self, node, indent):
        self.r.push()
        self.collect_locals(node)
        params = ", ".join(self.param(p) for p in node.attr("params", []))
        if node.kind == ast.CONSTRUCTOR_DEF:
            header = "constructor(%s)" % params
        elif node.kind == ast.MODIFIER_DEF:
            header = "modifier m(%s)" % params
        else:
            header = "function f(%s)" % params
        for _name, args in node.attr("modifiers", []):
            if args:
                header += " m(%s)" % ", ".join(self.expr(a) for a in args)
            else:
                header += " m"
        returns = node.attr("returns", [])
        if returns:
            header += " returns (%s)" % ", ".join(self.param(p) for p in returns)
        body = node.attr("body")
        if body is None or not body.children:
            self.emit(indent, header + " {}")
            self.segments.append(Segment(SEGMENT_FUNCTION, ()))
        else:
            self.emit(indent, header + " {")
            mark = len(self.lines)
            for child in body.children:
                self.stmt(child, indent + 1)
            self._capture(mark, SEGMENT_FUNCTION)
            self.emit(indent, "}")
        self.r.pop()

    def param(self, node):
        return self.type_text(node.attr("type"))

    def type_text(self, text):
        """Declared type as printed: elementary types verbatim, known
        records by their renamed head, anything else the default."""
        head = _type_head(text or "")
        if not head:
            return DEFAULT_TYPE
        tail = text[len(head):]
        if _ELEMENTARY.match(head):
            return text
        mapped = self.r.type_names.get(head)
        if mapped:
            return mapped + tail
        return DEFAULT_TYPE + tail

    # -- statements ------------------------------------------------------

    def stmt(self, node, indent):
        kind = node.kind
        if kind == ast.BLOCK:
            self.emit(indent, "{")
            for child in node.children:
                self.stmt(child, indent + 1)
            self.emit(indent, "}")
        elif kind == ast.VAR_DECL:
            self.emit(indent, self.var_decl(node) + ";")
        elif kind == ast.EXPRESSION_STMT:
            inner = node.children[0] if node.children else None
            self.emit(indent, (self.expr(inner) if inner else "") + ";")
        elif kind == ast.IF:
            cond = self.expr(node.children[0])
            self.emit(indent, "if (%s) {" % cond)
            self.branch(node.children[1], indent)
            if node.attr("has_else"):
                self.emit(indent, "} else {")
                self.branch(node.children[2], indent)
            self.emit(indent, "}")
        elif kind == ast.FOR:
            init = node.attr("init")
            cond = node.attr("cond")
            update = node.attr("update")
            init_text = ""
            if init is not None:
                if init.kind == ast.VAR_DECL:
                    init_text = self.var_decl(init)
                elif init.kind == ast.EXPRESSION_STMT:
                    init_text = self.expr(init.children[0])
                else:
                    init_text = self.expr(init)
            head = "for (%s; %s; %s)" % (
                init_text,
                self.expr(cond) if cond is not None else "",
                self.expr(update) if update is not None else "")
            self.emit(indent, head + " {")
            self.branch(node.attr("body"), indent)
            self.emit(indent, "}")
        elif kind == ast.WHILE:
            self.emit(indent, "while (%s) {" % self.expr(node.children[0]))
            self.branch(node.children[1], indent)
            self.emit(indent, "}")
        elif kind == ast.DO_WHILE:
            self.emit(indent, "do {")
            self.branch(node.children[0], indent)
            self.emit(indent, "} while (%s);" % self.expr(node.children[1]))
        elif kind == ast.RETURN:
            if node.children:
                self.emit(indent, "return %s;" % self.expr(node.children[0]))
            else:
                self.emit(indent, "return;")
        elif kind == ast.EMIT_STMT:
            inner = node.children[0] if node.children else None
            self.emit(indent, "emit %s;" % (self.expr(inner) if inner else ""))
        elif kind == ast.PLACEHOLDER_UNDERSCORE:
            self.emit(indent, "_;")
        elif kind in (ast.FIELD_DECL, ast.EVENT_DEF, ast.STRUCT_DEF):
            pass
        else:
            self.emit(indent, self.expr(node) + ";")

    def branch(self, node, indent):
        """Body of a control statement, always printed as a block."""
        if node is None:
            return
        if node.kind == ast.BLOCK:
            for child in node.children:
                self.stmt(child, indent + 1)
        else:
            self.stmt(node, indent + 1)

    def var_decl(self, node):
        text = self.type_text(node.attr("type"))
        if node.attr("has_init") and node.children:
            text += " = " + self.expr(node.children[-1])
        return text

    # -- expressions -----------------------------------------------------

    def expr(self, node):
        if node is None:
            return ""
        kind = node.kind
        if kind == ast.IDENTIFIER:
            if node.attr("type_keyword"):
                return node.attr("name")
            return self.r.resolve(node.attr("name"))
        if kind == ast.LITERAL:
            if node.attr("literal_kind") == "string":
                return "stringLiteral"
            text = node.attr("value")
            if node.attr("unit"):
                text += " " + node.attr("unit")
            return text
        if kind == ast.MEMBER_ACCESS:
            return "%s.%s" % (self.expr(node.children[0]), node.attr("member"))
        if kind == ast.INDEX:
            base = self.expr(node.children[0])
            if len(node.children) > 1:
                return "%s[%s]" % (base, self.expr(node.children[1]))
            return base + "[]"
        if kind == ast.CALL:
            nargs = node.attr("nargs", 0)
            callee = self.expr(node.children[0])
            args = ", ".join(self.expr(a) for a in node.children[1:1 + nargs])
            return "%s(%s)" % (callee, args)
        if kind == ast.CALL_OPTIONS:
            base = self.expr(node.children[0])
            keys = node.attr("keys", [])
            pairs = ", ".join("%s: %s" % (k, self.expr(v))
                              for k, v in zip(keys, node.children[1:]))
            return "%s{%s}" % (base, pairs)
        if kind == ast.ASSIGNMENT:
            return "%s %s %s" % (self.expr(node.children[0]),
                                 node.attr("operator"),
                                 self.expr(node.children[1]))
        if kind == ast.BINARY_OP:
            if node.attr("operator") == "?:":
                return "%s ? %s : %s" % tuple(self.expr(c) for c in node.children[:3])
            return "%s %s %s" % (self.expr(node.children[0]),
                                 node.attr("operator"),
                                 self.expr(node.children[1]))
        if kind == ast.UNARY_OP:
            op = node.attr("operator")
            operand = self.expr(node.children[0]) if node.children else ""
            if not node.attr("prefix"):
                return operand + op
            if op and op[-1].isalpha():
                return "%s %s" % (op, operand)
            return op + operand
        if kind == ast.REQUIRE:
            return "require(%s)" % ", ".join(self.expr(c) for c in node.children)
        if kind == ast.ASSERT:
            return "assert(%s)" % ", ".join(self.expr(c) for c in node.children)
        if kind == ast.REVERT:
            return "revert(%s)" % ", ".join(self.expr(c) for c in node.children)
        if kind == ast.PLACEHOLDER_UNDERSCORE:
            return "_"
        if kind == ast.EXPRESSION_STMT:
            return self.expr(node.children[0]) if node.children else ""
        parts = [self.expr(c) for c in node.children]
        return " ".join(p for p in parts if p)


def normalize(snippet):
    """Normalized source text of a snippet (SnippetAst or source string)."""
    if isinstance(snippet, str):
        snippet = parse_source(snippet)
    printer = _Printer(_Renamer())
    return printer.unit(snippet)


def tokenize_for_fingerprint(normalized):
    """Token segments of already-normalized text.

    Contract segments hold the header tokens; function segments hold the
    body tokens, in printed order. State variables, events, and struct
    declarations contribute nothing.
    """
    if isinstance(normalized, str):
        normalized = parse_source(normalized)
    printer = _Printer(_Renamer())
    printer.unit(normalized)
    return printer.segments
