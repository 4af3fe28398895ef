"""Pattern algebra for matching against property graphs.

A Pattern is one anchor predicate plus a list of path steps that bind
further variables, filtered by a boolean where-tree. Patterns are plain
data and serialize to JSON, so rule sets can be stored or shipped.

Conventions:
* a step's `dst` is either a NodePred (binds a new variable) or the
  name of an already-bound variable (closes a cycle),
* `max_hops=None` means unbounded; the engine caps such steps with its
  current hop budget except inside NotExists, which always runs to
  exhaustion so negative evidence cannot be an artifact of truncation.
"""

from dataclasses import dataclass, field

OUT = "out"
IN = "in"
ANY = "any"


@dataclass
class NodePred:
    var: str
    labels: tuple = ()
    any_labels: tuple = ()
    not_labels: tuple = ()
    props: dict = field(default_factory=dict)

    def matches(self, node):
        if any(l not in node.labels for l in self.labels):
            return False
        if self.any_labels and not any(l in node.labels for l in self.any_labels):
            return False
        if any(l in node.labels for l in self.not_labels):
            return False
        for key, want in self.props.items():
            if node.properties.get(key) != want:
                return False
        return True

    def to_dict(self):
        d = {"var": self.var}
        if self.labels:
            d["labels"] = list(self.labels)
        if self.any_labels:
            d["anyLabels"] = list(self.any_labels)
        if self.not_labels:
            d["notLabels"] = list(self.not_labels)
        if self.props:
            d["props"] = dict(self.props)
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(d["var"], tuple(d.get("labels", ())), tuple(d.get("anyLabels", ())),
                   tuple(d.get("notLabels", ())), dict(d.get("props", {})))


@dataclass
class PathStep:
    src: str
    dst: object           # NodePred or bound variable name
    labels: tuple = ()    # edge labels; empty means any label
    direction: str = OUT
    min_hops: int = 1
    max_hops: object = 1  # None = unbounded
    edge_var: str = None  # single-hop only
    path_var: str = None
    edge_props: dict = field(default_factory=dict)

    def to_dict(self):
        d = {"src": self.src,
             "dst": self.dst.to_dict() if isinstance(self.dst, NodePred) else self.dst,
             "labels": list(self.labels), "direction": self.direction,
             "minHops": self.min_hops, "maxHops": self.max_hops}
        if self.edge_var:
            d["edgeVar"] = self.edge_var
        if self.path_var:
            d["pathVar"] = self.path_var
        if self.edge_props:
            d["edgeProps"] = dict(self.edge_props)
        return d

    @classmethod
    def from_dict(cls, d):
        dst = d["dst"]
        if isinstance(dst, dict):
            dst = NodePred.from_dict(dst)
        return cls(d["src"], dst, tuple(d.get("labels", ())),
                   d.get("direction", OUT), d.get("minHops", 1), d.get("maxHops", 1),
                   d.get("edgeVar"), d.get("pathVar"), dict(d.get("edgeProps", {})))


# ----------------------------------------------------------------------
# where-tree

@dataclass
class Prop:
    var: str
    name: str

    def to_dict(self):
        return {"prop": [self.var, self.name]}


@dataclass
class Const:
    value: object

    def to_dict(self):
        return {"const": self.value}


def _operand_from_dict(d):
    if "prop" in d:
        return Prop(d["prop"][0], d["prop"][1])
    return Const(d["const"])


@dataclass
class Compare:
    """Binary comparison between property/constant operands.

    Supported ops: eq neq gt lt ge le in in_ci contains split0_contains
    is_null not_null same diff. `same`/`diff` compare node identity and
    take variable names as operands.
    """
    lhs: object
    op: str
    rhs: object = None

    def to_dict(self):
        d = {"op": self.op,
             "lhs": self.lhs.to_dict() if hasattr(self.lhs, "to_dict") else self.lhs}
        if self.rhs is not None:
            d["rhs"] = self.rhs.to_dict() if hasattr(self.rhs, "to_dict") else self.rhs
        return d


@dataclass
class And:
    parts: list

    def to_dict(self):
        return {"and": [p.to_dict() for p in self.parts]}


@dataclass
class Or:
    parts: list

    def to_dict(self):
        return {"or": [p.to_dict() for p in self.parts]}


@dataclass
class Not:
    part: object

    def to_dict(self):
        return {"not": self.part.to_dict()}


@dataclass
class HasLabel:
    var: str
    label: str

    def to_dict(self):
        return {"hasLabel": [self.var, self.label]}


@dataclass
class InPath:
    var: str
    path_var: str

    def to_dict(self):
        return {"inPath": [self.var, self.path_var]}


@dataclass
class SeqInPath:
    """True when a recorded path traverses `first`-labeled and
    `second`-labeled edges back to back, in that order."""
    path_var: str
    first: str
    second: str

    def to_dict(self):
        return {"seqInPath": [self.path_var, self.first, self.second]}


@dataclass
class Exists:
    """Positive sub-match sharing outer bindings; hop caps apply.

    `anchors` introduce extra free variables enumerated over the whole
    graph (for sub-patterns that do not hang off a bound variable).
    """
    steps: list
    where: object = None
    anchors: list = field(default_factory=list)

    def to_dict(self):
        d = {"exists": [s.to_dict() for s in self.steps]}
        if self.where is not None:
            d["where"] = self.where.to_dict()
        if self.anchors:
            d["anchors"] = [a.to_dict() for a in self.anchors]
        return d


@dataclass
class NotExists:
    """Negative sub-match; always evaluated without a hop cap."""
    steps: list
    where: object = None
    anchors: list = field(default_factory=list)

    def to_dict(self):
        d = {"notExists": [s.to_dict() for s in self.steps]}
        if self.where is not None:
            d["where"] = self.where.to_dict()
        if self.anchors:
            d["anchors"] = [a.to_dict() for a in self.anchors]
        return d


def where_from_dict(d):
    if d is None:
        return None
    if "and" in d:
        return And([where_from_dict(p) for p in d["and"]])
    if "or" in d:
        return Or([where_from_dict(p) for p in d["or"]])
    if "not" in d:
        return Not(where_from_dict(d["not"]))
    if "hasLabel" in d:
        return HasLabel(d["hasLabel"][0], d["hasLabel"][1])
    if "inPath" in d:
        return InPath(d["inPath"][0], d["inPath"][1])
    if "seqInPath" in d:
        return SeqInPath(*d["seqInPath"])
    if "exists" in d:
        return Exists([PathStep.from_dict(s) for s in d["exists"]],
                      where_from_dict(d.get("where")),
                      [NodePred.from_dict(a) for a in d.get("anchors", [])])
    if "notExists" in d:
        return NotExists([PathStep.from_dict(s) for s in d["notExists"]],
                         where_from_dict(d.get("where")),
                         [NodePred.from_dict(a) for a in d.get("anchors", [])])
    if "op" in d:
        lhs = d["lhs"]
        rhs = d.get("rhs")
        lhs = _operand_from_dict(lhs) if isinstance(lhs, dict) else lhs
        rhs = _operand_from_dict(rhs) if isinstance(rhs, dict) else rhs
        return Compare(lhs, d["op"], rhs)
    raise ValueError("unknown where node: %r" % (d,))


@dataclass
class Pattern:
    name: str
    anchor: NodePred
    steps: list = field(default_factory=list)
    where: object = None
    returns: tuple = ()

    def to_dict(self):
        d = {"name": self.name, "anchor": self.anchor.to_dict(),
             "steps": [s.to_dict() for s in self.steps],
             "returns": list(self.returns)}
        if self.where is not None:
            d["where"] = self.where.to_dict()
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(d["name"], NodePred.from_dict(d["anchor"]),
                   [PathStep.from_dict(s) for s in d.get("steps", [])],
                   where_from_dict(d.get("where")),
                   tuple(d.get("returns", ())))
