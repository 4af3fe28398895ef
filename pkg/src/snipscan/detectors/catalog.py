"""Vulnerability detector catalog.

Each detector is a declarative pattern family over the program graph
(most are a single pattern; bad randomness needs two because its anchor
accepts two unrelated label sets). The patterns phrase a vulnerability
as: an anchor construct, a reachability/data-flow skeleton, and a where
tree whose negative branches encode recognized mitigations. Detectors
report one graph node per match (the `report` variable), which the
runner turns into findings.

A note on style: the pattern trees below are deliberately literal about
operator lists, label names and property keys, including some arms that
cannot fire on graphs this package builds (for instance an uppercase
'ROLLBACK' label test). They are kept as-is rather than "fixed", since
the mitigation logic holds up without them and silently diverging is
worse than carrying a dead branch.
"""

from ..graphquery import (
    And, Compare, Const, Exists, HasLabel, InPath, NodePred, Not, NotExists,
    Or, PathStep, Pattern, Prop, SeqInPath, ANY, IN, OUT,
)

CONTROL = ("EOG", "INVOKES", "RETURNS")
CALL_FLOW = ("EOG", "INVOKES")
ASSIGN_OPS = ("=", "|=", "^=", "&=", "<<=", ">>=", "+=", "-=", "*=", "/=", "%=")
WRITE_CHAIN = ("BASE", "CALLEE", "LHS", "ARRAY_EXPRESSION")
MONEY_CALLS = ("value", "send", "transfer", "call")
INCREMENT_OPS = ("++", "--")

DEFAULT_LOOP_BOUND = 100


def _n(var, *labels, any_of=(), none_of=(), **props):
    return NodePred(var, labels=tuple(labels), any_labels=tuple(any_of),
                    not_labels=tuple(none_of), props=props)


def _hop(src, dst, *labels, direction=OUT, edge_var=None, path_var=None):
    return PathStep(src, dst, tuple(labels), direction, min_hops=1, max_hops=1,
                    edge_var=edge_var, path_var=path_var)


def _walk(src, dst, *labels, direction=OUT, path_var=None):
    return PathStep(src, dst, tuple(labels), direction, min_hops=1,
                    max_hops=None, path_var=path_var)


def _eq(var, name, value):
    return Compare(Prop(var, name), "eq", Const(value))


def _in(var, name, values):
    return Compare(Prop(var, name), "in", Const(list(values)))


def _in_ci(var, name, values):
    return Compare(Prop(var, name), "in_ci", Const(list(values)))


def _contains(var, name, text):
    return Compare(Prop(var, name), "contains", Const(text))


def _header_contains(var, text):
    """Match against the declaration header (code up to the first brace)."""
    return Compare(Prop(var, "code"), "split0_contains", Const(text))


def _diff(a, b):
    return Compare(a, "diff", b)


def _no_out(var, *labels):
    return NotExists([_hop(var, _n("_sink"), *labels)])


# ---------------------------------------------------------------------------
# access control


def access_control_state_write(options):
    """Unguarded writes to a state variable that gates access via msg.sender."""
    guard_use = Exists([
        _hop("wN", _n("fd", "FieldDeclaration"), "DFG"),
        _hop("fd", _n("ref"), "REFERS_TO", direction=IN),
        _hop("ref", _n("cmp", "BinaryOperator", operatorCode="=="),
             "LHS", "RHS", direction=IN),
        _hop("cmp", _n("ms", code="msg.sender"), "LHS", "RHS"),
    ])
    checked_elsewhere = NotExists(
        anchors=[_n("ms2", code="msg.sender")],
        steps=[
            _walk("ms2", _n("n"), "DFG"),
            _walk("n", _n("fieldW", "FieldDeclaration"), "DFG", direction=IN),
            _walk("n", _n("comp"), "DFG", path_var="alt"),
            _walk("comp", _n("t"), *CONTROL, path_var="alt"),
        ],
        where=And([InPath("comp", "p"),
                   Or([HasLabel("t", "Rollback"), Not(InPath("wN", "alt"))])]))
    return [Pattern(
        name="access-control-state-write",
        anchor=_n("entry", "FunctionDeclaration",
                  none_of=("ConstructorDeclaration",)),
        steps=[_walk("entry", _n("wN"), *CONTROL, path_var="p"),
               _walk("wN", _n("last"), *CONTROL, path_var="p")],
        where=And([Not(_header_contains("entry", " internal ")),
                   _no_out("last", "EOG", "INVOKES"),
                   guard_use,
                   checked_elsewhere]),
        returns=("entry", "wN"),
    )]


def access_control_selfdestruct(options):
    """Contract destruction reachable without a msg.sender check."""
    sender_guard = NotExists(
        anchors=[_n("ms", code="msg.sender")],
        steps=[_walk("ms", _n("n"), "DFG"),
               _walk("n", _n("t"), *CALL_FLOW)],
        where=And([
            InPath("n", "p"),
            _no_out("t", *CALL_FLOW),
            Exists(steps=[_walk("f", "n", *CALL_FLOW, path_var="alt"),
                          _walk("n", "t", *CALL_FLOW, path_var="alt")],
                   where=Or([HasLabel("t", "Rollback"),
                             Not(InPath("c", "alt"))])),
        ]))
    return [Pattern(
        name="access-control-selfdestruct",
        anchor=_n("f", "FunctionDeclaration"),
        steps=[_walk("f", _n("c", "CallExpression"), *CALL_FLOW, path_var="p"),
               _walk("c", _n("last"), *CALL_FLOW, path_var="p")],
        where=And([_in_ci("c", "localName", ["SELFDESTRUCT", "SUICIDE"]),
                   _no_out("last", *CALL_FLOW),
                   Not(HasLabel("last", "Rollback")),
                   sender_guard]),
        returns=("c",),
    )]


# ---------------------------------------------------------------------------
# short addresses


def _is_last_param(edge_var):
    return NotExists([_hop("f", _n("_q"), "PARAMETERS", edge_var="rp")],
                     where=Compare(Prop("rp", "INDEX"), "gt",
                                   Prop(edge_var, "INDEX")))


def _address_before(edge_var):
    return Compare(Prop("adr", "INDEX"), "lt", Prop(edge_var, "INDEX"))


def _data_length_guard(protected_var):
    """The call-data length was checked on some path; `protected_var`
    names the node whose execution the check may gate."""
    return NotExists(
        anchors=[_n("mdl", code="msg.data.length")],
        steps=[_walk("mdl", _n("n"), "DFG")],
        where=And([
            InPath("n", "p"),
            Exists(steps=[_walk("n", _n("t"), *CALL_FLOW, path_var="alt")],
                   where=Or([HasLabel("t", "ROLLBACK"),
                             And([Not(InPath(protected_var, "alt")),
                                  _no_out("t", *CALL_FLOW)])])),
        ]))


def short_address_call(options):
    """Money-moving calls whose amount comes from the last (padding-prone)
    parameter after an address parameter."""
    amount_as_arg = Exists(
        steps=[_hop("f", _n("param", "ParamVariableDeclaration"),
                    "PARAMETERS", edge_var="r"),
               _walk("param", _n("x1"), "DFG"),
               _hop("x1", "c", "ARGUMENTS", direction=IN)],
        where=And([_is_last_param("r"), _address_before("r")]))
    amount_as_option = Exists(
        steps=[_hop("f", _n("param", "ParamVariableDeclaration"),
                    "PARAMETERS", edge_var="r"),
               _walk("param", _n("y1"), "DFG"),
               _hop("y1", _n("s"), "VALUE", direction=IN),
               _hop("s", _n("k", value="value"), "KEY")],
        where=And([Exists([_hop("s", "c", direction=IN)]),
                   _is_last_param("r"), _address_before("r")]))
    amount_via_value_member = Exists(
        steps=[_hop("f", _n("param", "ParamVariableDeclaration"),
                    "PARAMETERS", edge_var="r"),
               _walk("param", _n("z1"), "DFG"),
               _hop("z1", "c", "ARGUMENTS", direction=IN),
               _walk("c", _n("lowc", localName="call"), "BASE", "CALLEE")],
        where=And([_is_last_param("r"), _address_before("r")]))
    param_reaches_receiver = Exists([
        _walk("c", _n("x2"), "BASE", "CALLEE"),
        _walk("x2", _n("pv", "ParamVariableDeclaration"), "DFG", direction=IN),
    ])
    return [Pattern(
        name="short-address-call",
        anchor=_n("type", localName="address"),
        steps=[_hop("type", _n("ad"), "TYPE", direction=IN, path_var="p"),
               _hop("ad", _n("f", "FunctionDeclaration"), "PARAMETERS",
                    direction=IN, edge_var="adr", path_var="p"),
               _walk("f", _n("c", "CallExpression"), *CALL_FLOW, path_var="p"),
               _walk("c", _n("last"), *CALL_FLOW, path_var="p")],
        where=And([
            Or([HasLabel("last", "ReturnStatement"),
                Exists([_hop("f", "last", "BODY")])]),
            Not(_header_contains("f", " internal ")),
            Or([And([_in_ci("c", "localName", ["TRANSFER", "SEND"]),
                     amount_as_arg]),
                amount_as_option,
                And([_in_ci("c", "localName", ["VALUE"]),
                     amount_via_value_member])]),
            _data_length_guard("c"),
            param_reaches_receiver]),
        returns=("c",),
    )]


def short_address_state(options):
    """State writes fed by the last parameter after an address parameter."""
    tainted_write = Exists(
        steps=[_hop("f", _n("vuln"), "PARAMETERS", edge_var="vulna"),
               _walk("vuln", _n("m"), "DFG"),
               _walk("m", _n("state", "FieldDeclaration"), "DFG")],
        where=And([_is_last_param("vulna"), _address_before("vulna"),
                   _data_length_guard("m")]))
    return [Pattern(
        name="short-address-state",
        anchor=_n("type", localName="address"),
        steps=[_hop("type", _n("ad"), "TYPE", direction=IN, path_var="p"),
               _hop("ad", _n("f", "FunctionDeclaration"), "PARAMETERS",
                    direction=IN, edge_var="adr", path_var="p"),
               _walk("f", _n("last"), *CALL_FLOW, path_var="p")],
        where=And([
            Or([HasLabel("last", "ReturnStatement"),
                Exists([_hop("f", "last", "BODY")])]),
            tainted_write]),
        returns=("ad",),
    )]


# ---------------------------------------------------------------------------
# randomness and time


def _branch_gates_money(src_var, int_var, bound_int):
    """`src_var` feeds a branch with an arm that avoids `int_var`."""
    int_step = (_walk("th", int_var, "EOG") if bound_int
                else _walk("th", _n(int_var), "EOG"))
    return Exists(
        steps=[_walk(src_var, _n("branch"), "DFG"),
               _hop("branch", _n("th"), "EOG"),
               int_step],
        where=Exists(
            steps=[_hop("branch", _n("el"), "EOG")],
            where=And([_diff("el", "th"),
                       Or([HasLabel(int_var, "Rollback"),
                           HasLabel(int_var, "CallExpression")]),
                       NotExists([_walk("el", int_var, "EOG")])])))


def bad_randomness(options):
    """Block-derived entropy feeding returns, state, or money transfers."""
    feeds_rand_return = Exists(
        steps=[_walk("r", _n("ret", "ReturnStatement"), "DFG"),
               _walk("ret", _n("containing", "FunctionDeclaration"), "EOG",
                     direction=IN)],
        where=_contains("containing", "code", "rand"))
    feeds_dead_field = Exists(
        steps=[_walk("r", _n("fd", "FieldDeclaration"), "DFG", "ARGUMENTS")],
        where=_no_out("fd", "DFG"))
    feeds_money = Exists(
        anchors=[_n("int", "CallExpression")],
        steps=[],
        where=And([_in("int", "localName", MONEY_CALLS),
                   Or([Exists([_walk("r", _n("q"), "DFG"),
                               _walk("q", "int", "BASE", "CALLEE", "ARGUMENTS",
                                     "SPECIFIERS", "VALUE", direction=IN)]),
                       _branch_gates_money("r", "int", bound_int=True)])]))
    shared = Or([feeds_rand_return, feeds_dead_field, feeds_money])
    return [
        Pattern(
            name="bad-randomness-env",
            anchor=_n("r", any_of=("DeclaredReferenceExpression",
                                   "MemberExpression")),
            steps=[],
            where=And([_in("r", "code", ["block.timestamp", "block.number",
                                         "block.difficulty", "block.coinbase"]),
                       shared]),
            returns=("r",),
        ),
        Pattern(
            name="bad-randomness-blockhash",
            anchor=_n("r", "CallExpression"),
            steps=[],
            where=And([_in("r", "localName", ["blockhash"]), shared]),
            returns=("r",),
        ),
    ]


def time_manipulation(options):
    """Timestamp reads that decide returns, state, or money movement."""
    unresolved_call = Exists(
        steps=[_walk("r", _n("exp", "CallExpression"), "DFG")],
        where=Or([_no_out("exp", "INVOKES"),
                  Exists(steps=[_hop("exp", _n("target"), "INVOKES")],
                         where=_no_out("target", "BODY"))]))
    return [Pattern(
        name="time-manipulation",
        anchor=_n("r", "DeclaredReferenceExpression"),
        steps=[],
        where=And([
            _in("r", "code", ["now", "block.timestamp"]),
            Or([Exists([_walk("r", _n("ret", "ReturnStatement"), "DFG")]),
                unresolved_call,
                Exists([_walk("r", _n("fd", "FieldDeclaration"), "DFG")]),
                _branch_gates_money("r", "int", bound_int=False)])]),
        returns=("r",),
    )]


# ---------------------------------------------------------------------------
# denial of service


def dos_blocking_call(options):
    """A transfer whose failure blocks later money-moving calls."""
    failure_branch = Exists(
        steps=[_hop("c", _n("branchNeg"), "DFG"),
               _hop("branchNeg", _n("nextN"), "EOG")],
        where=NotExists([_walk("nextN", "c2", "EOG")]))
    return [Pattern(
        name="dos-blocking-call",
        anchor=_n("c", "CallExpression"),
        steps=[_walk("c", _n("c2", "CallExpression"), "EOG")],
        where=And([_in("c", "localName", ["transfer", "send", "call"]),
                   _in("c2", "localName", ["transfer", "send", "call"]),
                   Or([Not(_in("c", "localName", ["transfer", "send"])),
                       failure_branch])]),
        returns=("c",),
    )]


def dos_blocking_state(options):
    """A transfer whose failure blocks a later state write."""
    send_checked = Exists(
        steps=[_hop("c", _n("branchNeg"), "DFG"),
               _walk("branchNeg", _n("last2"), "EOG", path_var="avoidingpath")],
        where=And([_no_out("last2", "EOG"),
                   Not(InPath("write1", "avoidingpath"))]))
    write_elsewhere = NotExists(
        steps=[_hop("fd", _n("write2"), "DFG", direction=IN, path_var="alt"),
               _walk("write2", _n("func", "FunctionDeclaration"), "EOG",
                     path_var="alt")],
        where=And([Not(HasLabel("fd", "ConstructorDeclaration")),
                   Not(InPath("c", "alt")),
                   NotExists([_walk("write2", _n("branching"), "EOG"),
                              _walk("branching", "c", "EOG")])]))
    return [Pattern(
        name="dos-blocking-state",
        anchor=_n("c", "CallExpression"),
        steps=[_walk("c", _n("write1"), "EOG"),
               _hop("write1", _n("fd", "FieldDeclaration"), "DFG")],
        where=And([Or([_in("c", "localName", ["transfer"]),
                       And([_eq("c", "localName", "send"), send_checked])]),
                   write_elsewhere]),
        returns=("c",),
    )]


def dos_gas_loop(options):
    """Loops whose trip count is attacker-influencable and whose body
    spends real gas (state touch or external call)."""
    loop_bound = options.get("loop_bound", DEFAULT_LOOP_BOUND)
    body_touches_state = Exists(
        anchors=[_n("exp")],
        steps=[_hop("exp", _n("fd", "FieldDeclaration"))],
        where=InPath("exp", "p"))
    body_calls_out = Exists(
        anchors=[_n("exp", "CallExpression")],
        steps=[],
        where=Or([And([InPath("exp", "p"), _no_out("exp", "INVOKES")]),
                  Exists(steps=[_hop("exp", _n("target"), "INVOKES")],
                         where=_no_out("target", "BODY"))]))
    big_literal_bound = Exists(
        anchors=[_n("l", "Literal")],
        steps=[_hop("l", "cond", "DFG")],
        where=And([HasLabel("cond", "BinaryOperator"),
                   _in("cond", "operatorCode", ["<", "<=", ">", ">="]),
                   Compare(Prop("l", "value"), "gt", Const(loop_bound))]))
    param_bound = Exists(
        steps=[_walk("cond", _n("userC", "ParamVariableDeclaration"), "DFG",
                     direction=IN),
               _hop("userC", _n("f", "FunctionDeclaration"), "PARAMETERS",
                    direction=IN)],
        where=Not(HasLabel("f", "ConstructorDeclaration")))
    return [Pattern(
        name="dos-gas-loop",
        anchor=_n("b", any_of=("ForStatement", "WhileStatement", "DoStatement",
                               "ForEachStatement")),
        steps=[_walk("b", _n("cond"), "EOG", path_var="p"),
               _hop("cond", "b", "EOG")],
        where=And([Or([body_touches_state, body_calls_out]),
                   Or([big_literal_bound, param_bound])]),
        returns=("b",),
    )]


def dos_empty_collection(options):
    """Collections used for transfers that can be cleared after init."""
    used_for_transfer = Exists(
        anchors=[_n("cx", "CallExpression")],
        steps=[_hop("cx", _n("xx"), "BASE", "CALLEE", "ARGUMENTS"),
               _walk("state", "xx", "DFG")],
        where=_in("cx", "localName", ["transfer", "send", "call"]))
    return [Pattern(
        name="dos-empty-collection",
        anchor=_n("b", "BinaryOperator", operatorCode="="),
        steps=[_hop("b", _n("w"), "LHS"),
               _hop("w", _n("state", "FieldDeclaration"), "DFG"),
               _hop("state", _n("t"), "TYPE")],
        where=And([_contains("t", "code", "["),
                   used_for_transfer,
                   NotExists(anchors=[_n("ctor", "ConstructorDeclaration")],
                             steps=[_walk("ctor", "b", "EOG")])]),
        returns=("b",),
    )]


# ---------------------------------------------------------------------------
# unchecked calls


def unchecked_return(options):
    """Low-level calls whose success flag decides nothing."""
    flows_to_return = NotExists(
        steps=[_walk("c", _n("r", "ReturnStatement"), "DFG")],
        where=InPath("r", "p"))
    flows_to_branch = NotExists(
        steps=[_walk("c", _n("n"), "DFG"),
               _hop("n", _n("apath"), "EOG")],
        where=And([InPath("n", "p"),
                   Exists(steps=[_hop("n", _n("otherpath"), "EOG")],
                          where=_diff("apath", "otherpath"))]))
    return [Pattern(
        name="unchecked-return",
        anchor=_n("c", "CallExpression"),
        steps=[_walk("c", _n("last"), "EOG", path_var="p")],
        where=And([
            _no_out("last", "EOG"),
            Not(HasLabel("last", "Rollback")),
            flows_to_return,
            flows_to_branch,
            Or([_in("c", "localName", ["call", "callcode", "delegatecall",
                                       "send"]),
                And([_in("c", "localName", ["value", "gas"]),
                     Exists([_walk("c", _n("lc", localName="call"),
                                   "BASE", "CALLEE")])])])]),
        returns=("c",),
    )]


# ---------------------------------------------------------------------------
# delegation


def default_proxy_delegate(options):
    """Fallback functions delegating with unsanitized call data."""
    data_is_argument = Or([
        Exists(anchors=[_n("md", code="msg.data")],
               steps=[_hop("md", "c", "ARGUMENTS", direction=IN)]),
        Exists(anchors=[_n("md2", code="msg.data")],
               steps=[_walk("md2", _n("q"), "DFG"),
                      _hop("q", "c", "ARGUMENTS", direction=IN)]),
    ])
    data_is_checked = NotExists(
        anchors=[_n("source", code="msg.data")],
        steps=[_walk("source", _n("n"), "DFG", path_var="df"),
               _hop("n", _n("apath"), "EOG", path_var="df")],
        where=And([
            InPath("n", "p"),
            NotExists(anchors=[_n("otherf", any_of=("FunctionDeclaration",
                                                    "CallExpression"))],
                      steps=[], where=InPath("otherf", "df")),
            NotExists([_hop("source", _n("mdl", code="msg.data.length"),
                            "BASE", direction=IN)]),
            Exists(steps=[_walk("f", "n", *CALL_FLOW, path_var="d"),
                          _walk("n", _n("otherpath"), *CALL_FLOW,
                                path_var="d")],
                   where=And([_no_out("otherpath", *CALL_FLOW),
                              Or([Not(InPath("c", "d")),
                                  HasLabel("otherpath", "Rollback")])]))]))
    return [Pattern(
        name="default-proxy-delegate",
        anchor=_n("f", "FunctionDeclaration"),
        steps=[_walk("f", _n("c", "CallExpression"), *CALL_FLOW, path_var="p"),
               _walk("c", _n("last"), *CALL_FLOW, path_var="p")],
        where=And([
            Or([Compare(Prop("f", "localName"), "is_null", None),
                _eq("f", "localName", "")]),
            _in_ci("c", "localName", ["DELEGATECALL", "CALLCODE"]),
            _no_out("last", *CALL_FLOW),
            Not(HasLabel("last", "Rollback")),
            data_is_argument,
            data_is_checked]),
        returns=("c",),
    )]


# ---------------------------------------------------------------------------
# ordering


def front_running(options):
    """State or value changes any sender could claim first."""
    sender_wins_slot = Exists(
        steps=[_hop("int", _n("w"), "LHS"),
               _walk("w", _n("sourcer", code="msg.sender"), "DFG",
                     direction=IN)],
        where=And([HasLabel("int", "BinaryOperator"),
                   _eq("int", "operatorCode", "="),
                   NotExists(steps=[_hop("int", _n("rhs"), "RHS"),
                                    _walk("rhs", _n("source2"), "DFG",
                                          direction=IN)],
                             where=Or([_eq("source2", "code", "msg.sender"),
                                       _eq("source2", "code", "msg.value")]))]))
    sender_gets_paid = Exists(
        steps=[_walk("int", _n("target", code="msg.sender"), "BASE", "CALLEE")],
        where=And([
            HasLabel("int", "CallExpression"),
            Or([And([_in("int", "localName", MONEY_CALLS),
                     NotExists(anchors=[_n("ms3", code="msg.sender")],
                               steps=[_walk("ms3", _n("y2"), "DFG"),
                                      _hop("y2", "int", "ARGUMENTS",
                                           direction=IN)])]),
                Exists(steps=[_walk("int", _n("specx"), "BASE", "CALLEE"),
                              _hop("specx", _n("kv", "KeyValueExpression"),
                                   "SPECIFIERS"),
                              _hop("kv", _n("k2", localName="value"), "KEY")],
                       where=NotExists(
                           anchors=[_n("ms4", code="msg.sender")],
                           steps=[_walk("ms4", _n("z2"), "DFG"),
                                  _hop("z2", "kv", "VALUE",
                                       direction=IN)]))])]))
    sender_gated = NotExists(
        anchors=[_n("source", code="msg.sender")],
        steps=[_walk("f", _n("branch"), "EOG", path_var="alt"),
               _walk("branch", _n("altlast"), "EOG", path_var="alt"),
               _walk("source", "branch", "DFG")],
        where=And([_no_out("altlast", "EOG"),
                   InPath("branch", "p"), InPath("source", "p"),
                   Or([Not(InPath("int", "alt")),
                       HasLabel("altlast", "Rollback")])]))
    return [Pattern(
        name="front-running",
        anchor=_n("f", "FunctionDeclaration"),
        steps=[_walk("f", _n("int"), "EOG", path_var="p"),
               _walk("int", _n("last"), "EOG", path_var="p")],
        where=And([Not(HasLabel("f", "ConstructorDeclaration")),
                   _no_out("last", "EOG"),
                   Or([sender_wins_slot, sender_gets_paid]),
                   sender_gated]),
        returns=("int",),
    )]


# ---------------------------------------------------------------------------
# storage layout


def local_struct_write(options):
    """Writes through uninitialized storage-located locals."""
    storage_located = Or([
        And([HasLabel("v", "ParamVariableDeclaration"),
             _contains("v", "code", " storage ")]),
        And([Not(HasLabel("v", "ParamVariableDeclaration")),
             Not(HasLabel("v", "FieldDeclaration")),
             NotExists(steps=[PathStep("v", _n("dc"), ("AST",), ANY,
                                       min_hops=1, max_hops=1)],
                       where=Or([_contains("dc", "code", " memory "),
                                 _contains("dc", "code", " calldata ")]))])])
    reference_typed = Or([
        _contains("v", "code", "["),
        Exists(steps=[_hop("v", _n("tv"), "TYPE")],
               where=Exists(anchors=[_n("struct", "RecordDeclaration",
                                        kind="struct")],
                            steps=[],
                            where=And([_eq("struct", "kind", "struct"),
                                       Compare(Prop("struct", "localName"),
                                               "eq",
                                               Prop("tv", "localName"))]))),
    ])
    written = Exists(
        anchors=[_n("fx")],
        steps=[],
        where=And([
            Not(HasLabel("fx", "ConstructorDeclaration")),
            Or([Exists([_walk("fx", _n("y1"), "EOG"),
                        _hop("y1", "v", "DFG")]),
                Exists(steps=[_walk("fx", _n("y2"), "EOG"),
                              _hop("y2", _n("bin", "BinaryOperator"), "DFG"),
                              _hop("bin", _n("w2"), "LHS"),
                              _walk("w2", _n("q2"), *WRITE_CHAIN),
                              _walk("v", "q2", "DFG")],
                       where=_in("bin", "operatorCode", ASSIGN_OPS)),
                Exists(steps=[_walk("fx", _n("y3"), "EOG"),
                              _hop("y3", _n("un", "UnaryOperator"), "DFG"),
                              _hop("un", _n("q3"), "INPUT", *WRITE_CHAIN),
                              _walk("v", "q3", "DFG")],
                       where=_in("un", "operatorCode", INCREMENT_OPS))])]))
    return [Pattern(
        name="local-struct-write",
        anchor=_n("v", "VariableDeclaration"),
        steps=[],
        where=And([storage_located,
                   _no_out("v", "INITIALIZER"),
                   reference_typed,
                   written]),
        returns=("v",),
    )]


# ---------------------------------------------------------------------------
# arithmetic


def over_underflow(options):
    """Unchecked add/sub/mul on externally supplied operands that reach
    persistent or money-relevant sinks."""
    external_operand = Exists(
        steps=[_walk("b", _n("param", "ParamVariableDeclaration"), "DFG",
                     direction=IN),
               _hop("param", _n("argf", "FunctionDeclaration"), direction=IN)],
        where=And([Not(HasLabel("f", "ConstructorDeclaration")),
                   Not(_header_contains("argf", " internal "))]))
    sinks = Or([
        Exists([_walk("b", _n("fd1", "FieldDeclaration"), "DFG")]),
        Exists(steps=[_walk("b", _n("bin1", "BinaryOperator"), "DFG"),
                      _hop("bin1", _n("q4"), "DFG"),
                      _hop("q4", _n("rb", "Rollback"), "EOG")],
               where=_in("bin1", "operatorCode", ["<", ">", "<=", ">=", "=="])),
        Exists(steps=[_walk("b", _n("bin2", "BinaryOperator"), "DFG"),
                      _hop("bin2", _n("w3"), "LHS"),
                      _walk("w3", _n("q5"), *WRITE_CHAIN),
                      _walk("q5", _n("fd2", "FieldDeclaration"), "DFG",
                            direction=IN)],
               where=_in("bin2", "operatorCode", ASSIGN_OPS)),
        Exists(steps=[_walk("b", _n("un1", "UnaryOperator"), "DFG"),
                      _hop("un1", _n("q6"), "INPUT", *WRITE_CHAIN),
                      _walk("q6", _n("fd3", "FieldDeclaration"), "DFG",
                            direction=IN)],
               where=_in("un1", "operatorCode", INCREMENT_OPS)),
        Exists(steps=[_walk("b", _n("q7"), "DFG"),
                      _hop("q7", _n("c5", "CallExpression"), "ARGUMENTS",
                           direction=IN)],
               where=NotExists([_hop("c5", _n("t5"), "INVOKES"),
                                _hop("t5", _n("bb5"), "BODY")])),
        Exists(steps=[_hop("b", _n("c6", "CallExpression"), "ARGUMENTS",
                           direction=IN)],
               where=NotExists([_hop("c6", _n("t6"), "INVOKES"),
                                _hop("t6", _n("bb6"), "BODY")])),
        Exists([_walk("b", _n("q8"), "DFG"),
                _hop("q8", _n("spec7", "SpecifiedExpression"), "VALUE",
                     direction=IN)]),
        Exists([_hop("b", _n("spec8", "SpecifiedExpression"), "VALUE",
                     direction=IN)]),
    ])
    independent_origin = NotExists(
        anchors=[_n("dfOrigin")],
        steps=[_walk("dfOrigin", "b", "DFG")],
        where=And([NotExists([_hop("dfOrigin", _n("y4"), "DFG",
                                   direction=IN)]),
                   NotExists([_walk("dfOrigin", "branch", "DFG")])]))
    guard_covers_operands = Or([
        NotExists([_walk("b", "branch", "DFG")]),
        And([Exists([_walk("b", _n("mid1"), "DFG", direction=IN),
                     _walk("mid1", "c1", "DFG")]),
             Exists([_walk("b", _n("mid2"), "DFG", direction=IN),
                     _walk("mid2", "c2", "DFG")])]),
        And([Exists(anchors=[_n("lit1", "Literal")],
                    steps=[_hop("lit1", "cond", "DFG")]),
             Exists(anchors=[_n("lit2", "Literal")],
                    steps=[_hop("lit2", "b", "DFG")])]),
    ])
    guarded = NotExists(
        steps=[_walk("f", _n("cond", "BinaryOperator"), "EOG",
                     path_var="bpath"),
               _hop("cond", _n("branch"), "EOG", path_var="bpath"),
               _walk("branch", _n("l"), "EOG", path_var="bpath"),
               _hop("cond", _n("c1"), "LHS", "RHS"),
               _hop("cond", _n("c2"), "LHS", "RHS")],
        where=And([_diff("c1", "c2"),
                   InPath("branch", "p"),
                   _no_out("l", "EOG"),
                   Or([Not(InPath("b", "bpath")), HasLabel("l", "Rollback")]),
                   independent_origin,
                   guard_covers_operands]))
    return [Pattern(
        name="over-underflow",
        anchor=_n("f", "FunctionDeclaration"),
        steps=[_walk("f", _n("b", "BinaryOperator"), "EOG", path_var="p"),
               _walk("b", _n("last"), "EOG", path_var="p")],
        where=And([_no_out("last", "EOG"),
                   _in("b", "operatorCode", ["+", "+=", "-", "-=", "*", "*="]),
                   external_operand,
                   sinks,
                   guarded]),
        returns=("b",),
    )]


# ---------------------------------------------------------------------------
# reentrancy


def _written_field_in_scope(field_var, rec_var):
    """The written field belongs to the record the call sits in."""
    return Exists([
        _hop(field_var, _n(rec_var, "RecordDeclaration"), "FIELDS",
             direction=IN),
        _walk(rec_var, "c", "AST"),
    ])


def reentrancy(options):
    """External calls followed by state writes on the same control path."""
    write_direct = Exists(
        steps=[_walk("n", _n("field1", "FieldDeclaration"), "DFG")],
        where=_written_field_in_scope("field1", "rec1"))
    write_assign = Exists(
        steps=[_walk("n", _n("bin3", "BinaryOperator"), "DFG"),
               _hop("bin3", _n("w4"), "LHS"),
               _walk("w4", _n("q9"), *WRITE_CHAIN),
               _walk("q9", _n("field2", "FieldDeclaration"), "DFG",
                     direction=IN)],
        where=And([_in("bin3", "operatorCode", ASSIGN_OPS),
                   _written_field_in_scope("field2", "rec2")]))
    write_increment = Exists(
        steps=[_walk("n", _n("un2", "UnaryOperator"), "DFG"),
               _hop("un2", _n("q10"), "INPUT", *WRITE_CHAIN),
               _walk("q10", _n("field3", "FieldDeclaration"), "DFG",
                     direction=IN)],
        where=And([_in("un2", "operatorCode", INCREMENT_OPS),
                   _written_field_in_scope("field3", "rec3")]))
    receiver_untainted = NotExists([
        _walk("c", _n("b1"), "BASE", "CALLEE"),
        _hop("b1", _n("y5"), "DFG", direction=IN),
    ])
    receiver_externally_chosen = Exists(
        steps=[_hop("c", _n("callee2"), "CALLEE", path_var="dflow"),
               _hop("callee2", _n("b2"), "BASE", path_var="dflow"),
               PathStep("b2", _n("s"), ("DFG",), IN, min_hops=1,
                        max_hops=None, path_var="dflow")],
        where=And([
            Or([Exists([_hop("b2", _n("t1", name="address"), "TYPE")]),
                Exists([_hop("b2", _n("t2", "ObjectType"), "TYPE"),
                        _hop("t2", _n("rec4"), "RECORD_DECLARATION")])]),
            NotExists([_hop("s", _n("z5"), "DFG", direction=IN)]),
            Not(HasLabel("s", "Literal")),
            NotExists([_hop("s", _n("ctor2", "ConstructorDeclaration"),
                            "PARAMETERS", direction=IN)]),
            Or([Not(Compare(Prop("s", "isInferred"), "eq", Const(True))),
                _in("s", "localName", ["msg", "tx"])]),
            NotExists(anchors=[_n("sub")],
                      steps=[_hop("sub", _n("array"), "DFG"),
                             _hop("array", "sub", "SUBSCRIPT_EXPRESSION")],
                      where=And([InPath("sub", "dflow"),
                                 InPath("array", "dflow")]))]))
    target_is_account = Or([
        Exists(anchors=[_n("d", "DeclaredReferenceExpression")],
               steps=[_walk("d", "base", "DFG")],
               where=_in("d", "code", ["msg.sender", "tx.origin"])),
        Exists(steps=[_walk("base", _n("root"), "DFG", direction=IN),
                      _hop("root", _n("t3"), "TYPE")],
               where=Or([_eq("t3", "localName", "address"),
                         And([_eq("t3", "localName", "UNKNOWN"),
                              NotExists([_hop("root", _n("y6"), "DFG",
                                              direction=IN)])])])),
    ])
    return [Pattern(
        name="reentrancy",
        anchor=_n("base", "MemberExpression"),
        steps=[PathStep("base", _n("c", "CallExpression"),
                        ("BASE", "CALLEE"), ANY, min_hops=1, max_hops=1,
                        path_var="p"),
               _walk("c", _n("n"), *CONTROL, path_var="p")],
        where=And([
            NotExists([_hop("c", _n("em", "EmitStatement"), direction=IN)]),
            Not(SeqInPath("p", "RETURNS", "INVOKES")),
            Or([write_direct, write_assign, write_increment]),
            Or([receiver_untainted, receiver_externally_chosen]),
            target_is_account]),
        returns=("c",),
    )]


# ---------------------------------------------------------------------------
# tx.origin


def tx_origin(options):
    """tx.origin compared against stored addresses to gate branches."""
    return [Pattern(
        name="tx-origin",
        anchor=_n("occ", "MemberExpression", code="tx.origin"),
        steps=[_walk("occ", _n("n"), "DFG"),
               _walk("n", _n("ref"), "DFG", direction=IN),
               _hop("ref", _n("fd", "FieldDeclaration"), "REFERS_TO"),
               _hop("n", _n("b1"), "EOG"),
               _hop("n", _n("b2"), "EOG")],
        where=_diff("b1", "b2"),
        returns=("n",),
    )]
