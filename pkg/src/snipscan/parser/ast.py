"""AST node types produced by the tolerant parser."""

from dataclasses import dataclass, field

# Closed vocabulary of node kinds.
CONTRACT_DEF = "ContractDef"
FUNCTION_DEF = "FunctionDef"
MODIFIER_DEF = "ModifierDef"
CONSTRUCTOR_DEF = "ConstructorDef"
PARAM_DECL = "ParamDecl"
VAR_DECL = "VarDecl"
FIELD_DECL = "FieldDecl"
STRUCT_DEF = "StructDef"
EVENT_DEF = "EventDef"
BLOCK = "Block"
IF = "If"
FOR = "For"
WHILE = "While"
DO_WHILE = "DoWhile"
RETURN = "Return"
EMIT_STMT = "EmitStmt"
EXPRESSION_STMT = "ExpressionStmt"
CALL = "Call"
MEMBER_ACCESS = "MemberAccess"
INDEX = "Index"
BINARY_OP = "BinaryOp"
UNARY_OP = "UnaryOp"
IDENTIFIER = "Identifier"
LITERAL = "Literal"
ASSIGNMENT = "Assignment"
CALL_OPTIONS = "CallOptions"
REQUIRE = "Require"
REVERT = "Revert"
ASSERT = "Assert"
PLACEHOLDER_UNDERSCORE = "PlaceholderUnderscore"

# Snippet shapes.
SHAPE_CONTRACT = "Contract"
SHAPE_FUNCTION = "Function"
SHAPE_STATEMENT = "Statement"


@dataclass
class AstNode:
    kind: str
    start: int = 0
    end: int = 0
    line: int = 1
    col: int = 1
    children: list = field(default_factory=list)
    attrs: dict = field(default_factory=dict)

    def add(self, child):
        if child is not None:
            self.children.append(child)
        return child

    def attr(self, name, default=None):
        return self.attrs.get(name, default)

    def find(self, kind):
        """Depth-first search for all descendants (including self) of a kind."""
        hits = []
        stack = [self]
        while stack:
            node = stack.pop()
            if node.kind == kind:
                hits.append(node)
            stack.extend(reversed(node.children))
        return hits

    def __repr__(self):
        bits = [self.kind]
        name = self.attrs.get("name")
        if name:
            bits.append(repr(name))
        op = self.attrs.get("operator")
        if op:
            bits.append(repr(op))
        return "<%s>" % " ".join(bits)


@dataclass
class Diagnostic:
    message: str
    line: int
    col: int

    def __str__(self):
        return "%d:%d: %s" % (self.line, self.col, self.message)


@dataclass
class SnippetAst:
    roots: list
    shape: str
    placeholders_skipped: int = 0
    source_id: str = ""
    source: str = ""
    pragmas: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)

    def code_of(self, node):
        """Source text of a node's span (comments already blanked)."""
        return self.source[node.start : node.end]
