"""Property graph structure for translated snippets.

Nodes carry a set of labels plus a free-form property map; edges carry a
label and optional properties (parameter positions, for example). The
graph keeps adjacency indexes per edge label in both directions because
the query engine spends nearly all of its time walking edges.
"""

from dataclasses import dataclass, field

# Node labels.
FUNCTION_DECLARATION = "FunctionDeclaration"
CONSTRUCTOR_DECLARATION = "ConstructorDeclaration"
MODIFIER_DECLARATION = "ModifierDeclaration"
RECORD_DECLARATION = "RecordDeclaration"
FIELD_DECLARATION = "FieldDeclaration"
VARIABLE_DECLARATION = "VariableDeclaration"
PARAM_VARIABLE_DECLARATION = "ParamVariableDeclaration"
CALL_EXPRESSION = "CallExpression"
MEMBER_EXPRESSION = "MemberExpression"
DECLARED_REFERENCE_EXPRESSION = "DeclaredReferenceExpression"
BINARY_OPERATOR = "BinaryOperator"
UNARY_OPERATOR = "UnaryOperator"
LITERAL = "Literal"
RETURN_STATEMENT = "ReturnStatement"
ROLLBACK = "Rollback"
EMIT_STATEMENT = "EmitStatement"
SPECIFIED_EXPRESSION = "SpecifiedExpression"
KEY_VALUE_EXPRESSION = "KeyValueExpression"
IF_STATEMENT = "IfStatement"
FOR_STATEMENT = "ForStatement"
WHILE_STATEMENT = "WhileStatement"
DO_STATEMENT = "DoStatement"
FOR_EACH_STATEMENT = "ForEachStatement"
BLOCK = "Block"
TYPE = "Type"
OBJECT_TYPE = "ObjectType"

# Edge labels.
AST = "AST"
EOG = "EOG"
DFG = "DFG"
INVOKES = "INVOKES"
RETURNS = "RETURNS"
REFERS_TO = "REFERS_TO"
PARAMETERS = "PARAMETERS"
ARGUMENTS = "ARGUMENTS"
LHS = "LHS"
RHS = "RHS"
BASE = "BASE"
CALLEE = "CALLEE"
TYPE_EDGE = "TYPE"
FIELDS = "FIELDS"
BODY = "BODY"
INITIALIZER = "INITIALIZER"
SPECIFIERS = "SPECIFIERS"
KEY = "KEY"
VALUE = "VALUE"
SUBSCRIPT_EXPRESSION = "SUBSCRIPT_EXPRESSION"
ARRAY_EXPRESSION = "ARRAY_EXPRESSION"
INPUT = "INPUT"
CONDITION = "CONDITION"
RECORD_DECLARATION_EDGE = "RECORD_DECLARATION"


@dataclass
class CpgNode:
    id: int
    labels: set
    properties: dict = field(default_factory=dict)

    def __hash__(self):
        return hash(self.id)

    def has_label(self, label):
        return label in self.labels

    def prop(self, name, default=None):
        return self.properties.get(name, default)

    def __repr__(self):
        name = self.properties.get("localName") or self.properties.get("name") or ""
        return "#%d[%s]%s" % (self.id, "|".join(sorted(self.labels)), " %r" % name if name else "")


@dataclass
class CpgEdge:
    src: int
    dst: int
    label: str
    properties: dict = field(default_factory=dict)

    def prop(self, name, default=None):
        return self.properties.get(name, default)

    def __repr__(self):
        return "#%d-%s->#%d" % (self.src, self.label, self.dst)


class CpgGraph:
    def __init__(self, source_id=""):
        self.source_id = source_id
        self.nodes = {}
        self.edges = []
        self.roots = []
        self.pragmas = []
        self.diagnostics = []
        self._next_id = 0
        self._out = {}  # label -> src -> [edge]
        self._in = {}  # label -> dst -> [edge]
        self._by_label = {}  # label -> [node id]

    # ------------------------------------------------------------------

    def new_node(self, labels, **properties):
        node = CpgNode(self._next_id, set(labels), dict(properties))
        self._next_id += 1
        self.nodes[node.id] = node
        for label in node.labels:
            self._by_label.setdefault(label, []).append(node.id)
        return node

    def insert_node(self, node_id, labels, **properties):
        """Insert a node with a caller-chosen id (graph deserialization)."""
        if node_id in self.nodes:
            raise ValueError("duplicate node id %d" % node_id)
        node = CpgNode(node_id, set(labels), dict(properties))
        self.nodes[node.id] = node
        self._next_id = max(self._next_id, node.id + 1)
        for label in node.labels:
            self._by_label.setdefault(label, []).append(node.id)
        return node

    def add_label(self, node, label):
        if label not in node.labels:
            node.labels.add(label)
            self._by_label.setdefault(label, []).append(node.id)

    def add_edge(self, src, dst, label, **properties):
        if hasattr(src, "id"):
            src = src.id
        if hasattr(dst, "id"):
            dst = dst.id
        edge = CpgEdge(src, dst, label, dict(properties))
        self.edges.append(edge)
        self._out.setdefault(label, {}).setdefault(src, []).append(edge)
        self._in.setdefault(label, {}).setdefault(dst, []).append(edge)
        return edge

    def remove_edge(self, edge):
        self.edges.remove(edge)
        self._out[edge.label][edge.src].remove(edge)
        self._in[edge.label][edge.dst].remove(edge)

    def remove_node(self, node_id):
        if hasattr(node_id, "id"):
            node_id = node_id.id
        for edge in [e for e in self.edges if e.src == node_id or e.dst == node_id]:
            self.remove_edge(edge)
        node = self.nodes.pop(node_id)
        for label in node.labels:
            self._by_label[label].remove(node_id)

    # ------------------------------------------------------------------

    def node(self, node_id):
        return self.nodes[node_id]

    def by_label(self, label):
        return [self.nodes[i] for i in self._by_label.get(label, [])]

    def out_edges(self, node_id, labels=None):
        if hasattr(node_id, "id"):
            node_id = node_id.id
        if labels is None:
            for per_src in self._out.values():
                yield from per_src.get(node_id, [])
        else:
            for label in labels:
                yield from self._out.get(label, {}).get(node_id, [])

    def in_edges(self, node_id, labels=None):
        if hasattr(node_id, "id"):
            node_id = node_id.id
        if labels is None:
            for per_dst in self._in.values():
                yield from per_dst.get(node_id, [])
        else:
            for label in labels:
                yield from self._in.get(label, {}).get(node_id, [])

    def successors(self, node_id, labels=None):
        return [e.dst for e in self.out_edges(node_id, labels)]

    def predecessors(self, node_id, labels=None):
        return [e.src for e in self.in_edges(node_id, labels)]

    def has_edge(self, src, dst, label):
        if hasattr(src, "id"):
            src = src.id
        if hasattr(dst, "id"):
            dst = dst.id
        return any(e.dst == dst for e in self._out.get(label, {}).get(src, []))

    def __len__(self):
        return len(self.nodes)
