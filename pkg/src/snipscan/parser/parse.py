"""Error-tolerant recursive descent parser for Solidity snippets.

Forum snippets are rarely complete programs, so the grammar here differs
from stock Solidity in a few deliberate ways:

* Contracts, functions, and bare statements are all accepted at the top
  level (snippets get "unnested").
* A newline terminates a statement when a semicolon is grammatically
  possible at that point and the next token could begin a new statement.
  Inside parentheses or brackets newlines never terminate anything.
* A statement that cannot be parsed is skipped (scan to the next `;`,
  newline, or `}` at bracket depth zero) and recorded as a diagnostic.
  Only when not a single construct parses does parse_tolerant raise.
* `function name public {` style headers with a missing parameter list are
  accepted, as are old-style constructors (function named like the
  contract).
* Inline assembly blocks are swallowed as opaque nodes.

ParseError carries the first offending token so callers can report where
an unsalvageable snippet went wrong.
"""

from . import ast
from .tokens import (
    ELEMENTARY_TYPES,
    KIND_IDENT,
    KIND_KEYWORD,
    KIND_NEWLINE,
    KIND_NUMBER,
    KIND_STRING,
    KIND_SYMBOL,
    UNIT_SUFFIXES,
    Token,
    tokenize,
)

ASSIGN_OPS = frozenset(["=", "|=", "^=", "&=", "<<=", ">>=", "+=", "-=", "*=", "/=", "%="])

BINARY_LEVELS = [
    ["||"],
    ["&&"],
    ["==", "!="],
    ["<", ">", "<=", ">="],
    ["|"],
    ["^"],
    ["&"],
    ["<<", ">>"],
    ["+", "-"],
    ["*", "/", "%"],
    ["**"],
]

UNARY_OPS = frozenset(["!", "~", "-", "+", "++", "--"])

VISIBILITY = frozenset(["public", "private", "internal", "external"])
MUTABILITY = frozenset(["pure", "view", "payable", "constant"])

# Tokens that can only continue an expression, never begin a statement.
# Everything else ends the current statement when it appears on a fresh
# line outside of brackets.
_CONTINUATION_ONLY = frozenset(
    [".", ")", "]", "}", ",", "?", ":", ";", "=>", "*", "/", "%", "**",
     "&&", "||", "==", "!=", "<=", ">=", "<", ">", "&", "|", "^", "<<", ">>"]
) | ASSIGN_OPS


class ParseError(Exception):
    def __init__(self, message, token=None):
        self.token = token
        if token is not None:
            message = "%d:%d: %s (at %r)" % (token.line, token.col, message, token.text)
        super().__init__(message)


class Parser:
    def __init__(self, tokens):
        self.tokens = list(tokens)
        self.pos = 0
        self.depth = 0  # bracket nesting; newlines are insignificant inside
        self.diagnostics = []
        self.pragmas = []

    # ------------------------------------------------------------------
    # token plumbing

    def _skip_newlines(self, i):
        while i < len(self.tokens) and self.tokens[i].kind == KIND_NEWLINE:
            i += 1
        return i

    def peek(self, ahead=0):
        i = self.pos
        while True:
            i = self._skip_newlines(i)
            if i >= len(self.tokens):
                return None
            if ahead == 0:
                return self.tokens[i]
            ahead -= 1
            i += 1

    def newline_before_next(self):
        # Newline runs are collapsed by the lexer, so a single lookahead
        # tells us whether a line break separates us from the next token.
        if self.pos >= len(self.tokens):
            return True
        return self.tokens[self.pos].kind == KIND_NEWLINE

    def newline_after_next(self):
        """Is there a line break between the next token and the one after?"""
        i = self._skip_newlines(self.pos)
        if i >= len(self.tokens):
            return True
        i += 1
        if i >= len(self.tokens):
            return True
        return self.tokens[i].kind == KIND_NEWLINE

    def advance(self):
        self.pos = self._skip_newlines(self.pos)
        if self.pos >= len(self.tokens):
            raise ParseError("unexpected end of input", self.last_token())
        tok = self.tokens[self.pos]
        self.pos += 1
        if tok.text in "([":
            self.depth += 1
        elif tok.text in ")]":
            self.depth = max(0, self.depth - 1)
        return tok

    def last_token(self):
        i = min(self.pos, len(self.tokens)) - 1
        while i >= 0 and self.tokens[i].kind == KIND_NEWLINE:
            i -= 1
        return self.tokens[i] if i >= 0 else None

    def at(self, text):
        tok = self.peek()
        return tok is not None and tok.text == text

    def at_any(self, texts):
        tok = self.peek()
        return tok is not None and tok.text in texts

    def accept(self, text):
        if self.at(text):
            return self.advance()
        return None

    def expect(self, text):
        tok = self.peek()
        if tok is None or tok.text != text:
            raise ParseError("expected %r" % text, tok or self.last_token())
        return self.advance()

    def expect_ident(self):
        tok = self.peek()
        if tok is None or tok.kind not in (KIND_IDENT, KIND_KEYWORD):
            raise ParseError("expected a name", tok or self.last_token())
        return self.advance()

    def eof(self):
        return self.peek() is None

    def continues_expression(self, tok):
        """May `tok` extend the current expression?

        False when the token sits on a new line at bracket depth zero and
        could begin a statement of its own; that is where a virtual
        semicolon goes.
        """
        if tok is None:
            return False
        if self.depth > 0:
            return True
        if not self.newline_before_next():
            return True
        return tok.text in _CONTINUATION_ONLY

    # ------------------------------------------------------------------
    # statement termination and recovery

    def terminate(self):
        tok = self.peek()
        if tok is None:
            return
        if tok.text == ";":
            self.advance()
            return
        if tok.text == "}":
            return
        if self.newline_before_next():
            return
        raise ParseError("expected end of statement", tok)

    def recover(self):
        """Skip to the next plausible statement boundary."""
        depth = 0
        while not self.eof():
            if depth == 0 and self.newline_before_next():
                return
            tok = self.peek()
            if depth == 0 and tok.text == "}":
                return
            self.pos = self._skip_newlines(self.pos)
            self.pos += 1
            if tok.text in "([{":
                depth += 1
            elif tok.text in ")]}":
                depth = max(0, depth - 1)
            elif tok.text == ";" and depth == 0:
                return

    def diag(self, exc):
        tok = exc.token or self.last_token() or Token("symbol", "", 1, 1, 0, 0)
        self.diagnostics.append(ast.Diagnostic(str(exc), tok.line, tok.col))

    # ------------------------------------------------------------------
    # spans

    def mark(self):
        tok = self.peek()
        if tok is None:
            tok = self.last_token()
        return tok

    def node(self, kind, start_tok, **attrs):
        n = ast.AstNode(kind)
        if start_tok is not None:
            n.start, n.line, n.col = start_tok.start, start_tok.line, start_tok.col
        n.attrs.update(attrs)
        return n

    def close(self, n):
        last = self.last_token()
        if last is not None:
            n.end = max(n.end, last.end)
        return n

    # ------------------------------------------------------------------
    # top level

    def parse_unit(self):
        roots = []
        successes = 0
        first_error = None
        while not self.eof():
            before = self.pos
            tok = self.peek()
            try:
                if tok.text == "pragma":
                    self.parse_pragma()
                    successes += 1
                elif tok.text == "import":
                    self.skip_directive()
                    successes += 1
                elif tok.text == "using":
                    self.skip_directive()
                    successes += 1
                elif tok.text in ("contract", "library", "interface"):
                    roots.append(self.parse_contract())
                    successes += 1
                elif tok.text in ("function", "modifier", "constructor", "struct", "event", "enum"):
                    roots.append(self.parse_member(contract_name=None))
                    successes += 1
                elif tok.text == ";":
                    self.advance()
                else:
                    roots.append(self.parse_statement())
                    successes += 1
            except ParseError as exc:
                self.diag(exc)
                if first_error is None:
                    first_error = exc
                self.depth = 0
                self.recover()
            if self.pos == before:
                self.pos += 1  # always make progress
        if successes == 0 and first_error is not None:
            raise first_error
        return roots

    def parse_pragma(self):
        start = self.expect("pragma")
        words = []
        while not self.eof() and not self.at(";"):
            if self.newline_before_next() and words:
                break
            words.append(self.advance().text)
        self.accept(";")
        self.pragmas.append(" ".join(words))
        return start

    def skip_directive(self):
        self.advance()
        while not self.eof() and not self.at(";"):
            if self.newline_before_next():
                return
            self.advance()
        self.accept(";")

    # ------------------------------------------------------------------
    # contracts and members

    def parse_contract(self):
        start = self.mark()
        kw = self.advance()  # contract | library | interface
        name = self.expect_ident().text
        bases = []
        if self.accept("is"):
            while True:
                bases.append(self.expect_ident().text)
                if self.at("("):  # constructor-style base args
                    self.skip_balanced("(", ")")
                if not self.accept(","):
                    break
        node = self.node(ast.CONTRACT_DEF, start, name=name, record_kind=kw.text, bases=bases)
        self.expect("{")
        while not self.eof() and not self.at("}"):
            before = self.pos
            try:
                member = self.parse_contract_member(name)
                if member is not None:
                    node.add(member)
            except ParseError as exc:
                self.diag(exc)
                self.recover()
            if self.pos == before:
                self.pos += 1
        self.accept("}")
        return self.close(node)

    def parse_contract_member(self, contract_name):
        tok = self.peek()
        if tok.text == ";":
            self.advance()
            return None
        if tok.text == "using":
            self.skip_directive()
            return None
        if tok.text == "pragma":
            self.parse_pragma()
            return None
        if tok.text in ("function", "modifier", "constructor", "struct", "event", "enum"):
            return self.parse_member(contract_name)
        # state variable
        return self.parse_field_decl()

    def parse_member(self, contract_name):
        tok = self.peek()
        if tok.text == "function" or tok.text == "constructor":
            return self.parse_function(contract_name)
        if tok.text == "modifier":
            return self.parse_modifier()
        if tok.text == "struct":
            return self.parse_struct()
        if tok.text == "enum":
            return self.parse_enum()
        if tok.text == "event":
            return self.parse_event()
        raise ParseError("expected a declaration", tok)

    def parse_field_decl(self):
        start = self.mark()
        type_text = self.parse_type_name()
        if type_text is None:
            raise ParseError("expected a type", self.peek())
        mods = []
        while self.at_any(VISIBILITY | MUTABILITY | frozenset(["indexed"])):
            mods.append(self.advance().text)
        name_tok = self.peek()
        if name_tok is None or name_tok.kind != KIND_IDENT:
            raise ParseError("expected a field name", name_tok or self.last_token())
        name = self.advance().text
        node = self.node(ast.FIELD_DECL, start, name=name, type=type_text, modifiers=mods)
        if self.accept("="):
            node.add(self.parse_expression())
            node.attrs["has_init"] = True
        self.terminate()
        return self.close(node)

    def parse_function(self, contract_name):
        start = self.mark()
        kw = self.advance()  # function | constructor
        is_ctor = kw.text == "constructor"
        name = ""
        tok = self.peek()
        if not is_ctor and tok is not None and tok.kind == KIND_IDENT:
            name = self.advance().text
        if contract_name is not None and name == contract_name:
            is_ctor = True

        params = []
        if self.at("("):
            params = self.parse_param_list()
        # else: tolerated header with no parameter list at all

        visibility = None
        mutability = []
        modifiers = []
        returns = []
        while not self.eof():
            tok = self.peek()
            if tok.text in VISIBILITY:
                visibility = self.advance().text
            elif tok.text in MUTABILITY:
                mutability.append(self.advance().text)
            elif tok.text == "returns":
                self.advance()
                returns = self.parse_param_list()
            elif tok.kind == KIND_IDENT and self._looks_like_modifier():
                mname = self.advance().text
                margs = []
                if self.at("("):
                    self.advance()
                    while not self.eof() and not self.at(")"):
                        margs.append(self.parse_expression())
                        if not self.accept(","):
                            break
                    self.expect(")")
                modifiers.append((mname, margs))
            else:
                break

        kind = ast.CONSTRUCTOR_DEF if is_ctor else ast.FUNCTION_DEF
        node = self.node(
            kind,
            start,
            name="" if is_ctor else name,
            visibility=visibility,
            mutability=mutability,
            modifiers=modifiers,
        )
        if is_ctor:
            node.attrs["name"] = name or "constructor"
        for p in params:
            node.add(p)
        node.attrs["params"] = params
        node.attrs["returns"] = returns
        for r in returns:
            node.add(r)
        if self.at("{"):
            body = self.parse_block()
            node.add(body)
            node.attrs["body"] = body
        else:
            self.terminate()
            node.attrs["body"] = None
        return self.close(node)

    def _looks_like_modifier(self):
        # Headers wrap across lines, so a name after a newline still counts
        # as a modifier invocation unless what follows reads like a fresh
        # statement (an assignment or member chain).
        nxt = self.peek(1)
        if nxt is None:
            return True
        if nxt.text in ASSIGN_OPS or nxt.text in (".", "["):
            return False
        return True

    def parse_modifier(self):
        start = self.expect("modifier")
        name = self.expect_ident().text
        params = self.parse_param_list() if self.at("(") else []
        node = self.node(ast.MODIFIER_DEF, start, name=name)
        for p in params:
            node.add(p)
        node.attrs["params"] = params
        if self.at("{"):
            body = self.parse_block()
            node.add(body)
            node.attrs["body"] = body
        else:
            self.terminate()
            node.attrs["body"] = None
        return self.close(node)

    def parse_param_list(self):
        self.expect("(")
        params = []
        while not self.eof() and not self.at(")"):
            start = self.mark()
            type_text = self.parse_type_name()
            if type_text is None:
                raise ParseError("expected a parameter type", self.peek())
            location = None
            if self.at_any(("memory", "storage", "calldata")):
                location = self.advance().text
            if self.accept("indexed"):
                pass
            name = ""
            tok = self.peek()
            if tok is not None and tok.kind == KIND_IDENT:
                name = self.advance().text
            p = self.node(ast.PARAM_DECL, start, name=name, type=type_text, location=location)
            params.append(self.close(p))
            if not self.accept(","):
                break
        self.expect(")")
        return params

    def parse_struct(self):
        start = self.expect("struct")
        name = self.expect_ident().text
        node = self.node(ast.STRUCT_DEF, start, name=name, record_kind="struct")
        self.expect("{")
        while not self.eof() and not self.at("}"):
            before = self.pos
            try:
                node.add(self.parse_field_decl())
            except ParseError as exc:
                self.diag(exc)
                self.recover()
            if self.pos == before:
                self.pos += 1
        self.accept("}")
        return self.close(node)

    def parse_enum(self):
        start = self.expect("enum")
        name = self.expect_ident().text
        node = self.node(ast.STRUCT_DEF, start, name=name, record_kind="enum")
        self.expect("{")
        while not self.eof() and not self.at("}"):
            member_tok = self.peek()
            if member_tok.kind == KIND_IDENT:
                tok = self.advance()
                member = self.node(ast.FIELD_DECL, tok, name=tok.text, type=name)
                node.add(self.close(member))
            if not self.accept(","):
                break
        self.expect("}")
        return self.close(node)

    def parse_event(self):
        start = self.expect("event")
        name = self.expect_ident().text
        params = self.parse_param_list() if self.at("(") else []
        node = self.node(ast.EVENT_DEF, start, name=name)
        for p in params:
            node.add(p)
        self.accept("anonymous")
        self.terminate()
        return self.close(node)

    # ------------------------------------------------------------------
    # types

    def parse_type_name(self):
        """Parse a type, returning its canonical text, or None (restoring
        the position) when the tokens do not look like a type."""
        save = (self.pos, self.depth)
        tok = self.peek()
        if tok is None:
            return None
        if tok.text == "mapping":
            self.advance()
            if not self.at("("):
                self.pos, self.depth = save
                return None
            self.advance()
            key = self.parse_type_name()
            if key is None or not self.accept("=>"):
                self.pos, self.depth = save
                return None
            value = self.parse_type_name()
            if value is None or not self.accept(")"):
                self.pos, self.depth = save
                return None
            text = "mapping(%s=>%s)" % (key, value)
        elif tok.text in ELEMENTARY_TYPES or tok.text == "var":
            text = self.advance().text
            if text == "address" and self.at("payable"):
                self.advance()
                text = "address payable"
        elif tok.kind == KIND_IDENT:
            text = self.advance().text
            while self.at(".") :
                nxt = self.peek(1)
                if nxt is None or nxt.kind != KIND_IDENT:
                    break
                self.advance()
                text += "." + self.advance().text
        else:
            return None

        while self.at("["):
            nxt = self.peek(1)
            if nxt is not None and nxt.text == "]":
                self.advance()
                self.advance()
                text += "[]"
            elif nxt is not None and nxt.kind == KIND_NUMBER:
                after = self.peek(2)
                if after is not None and after.text == "]":
                    self.advance()
                    num = self.advance().text
                    self.advance()
                    text += "[%s]" % num
                else:
                    self.pos, self.depth = save
                    return None
            else:
                break
        return text

    # ------------------------------------------------------------------
    # statements

    def parse_block(self):
        start = self.expect("{")
        node = self.node(ast.BLOCK, start)
        while not self.eof() and not self.at("}"):
            before = self.pos
            try:
                stmt = self.parse_statement()
                if stmt is not None:
                    node.add(stmt)
            except ParseError as exc:
                self.diag(exc)
                self.depth = 0
                self.recover()
            if self.pos == before:
                self.pos += 1
        self.expect("}")
        return self.close(node)

    def parse_statement(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("expected a statement", self.last_token())
        text = tok.text

        if text == "{":
            return self.parse_block()
        if text == ";":
            self.advance()
            return None
        if text == "if":
            return self.parse_if()
        if text == "for":
            return self.parse_for()
        if text == "while":
            return self.parse_while()
        if text == "do":
            return self.parse_do()
        if text == "return":
            return self.parse_return()
        if text == "emit":
            return self.parse_emit()
        if text == "throw":
            start = self.advance()
            node = self.node(ast.REVERT, start, legacy=True)
            self.terminate()
            return self.wrap_stmt(self.close(node))
        if text == "assembly":
            return self.parse_assembly()
        if text == "_" and tok.kind == KIND_IDENT:
            nxt = self.peek(1)
            if nxt is None or nxt.text in (";", "}") or self.newline_after_next():
                start = self.advance()
                node = self.node(ast.PLACEHOLDER_UNDERSCORE, start)
                self.terminate()
                return self.close(node)
        if text in ("break", "continue"):
            start = self.advance()
            node = self.node(ast.IDENTIFIER, start, name=text, keyword=True)
            self.terminate()
            return self.wrap_stmt(self.close(node))
        if text in ("function", "modifier", "struct", "event", "enum", "contract", "library", "interface"):
            # nested declarations happen in mangled snippets; treat the
            # inner declaration as a sibling-level parse and keep it as a
            # statement child so nothing is lost
            if text in ("contract", "library", "interface"):
                return self.parse_contract()
            return self.parse_member(contract_name=None)

        decl = self.try_parse_var_decl()
        if decl is not None:
            return decl

        expr = self.parse_expression()
        self.terminate()
        return self.wrap_stmt(expr)

    def wrap_stmt(self, expr):
        node = ast.AstNode(ast.EXPRESSION_STMT)
        node.start, node.end = expr.start, expr.end
        node.line, node.col = expr.line, expr.col
        node.add(expr)
        return node

    def try_parse_var_decl(self):
        save = (self.pos, self.depth)
        start = self.mark()
        type_text = self.parse_type_name()
        if type_text is None:
            return None
        location = None
        if self.at_any(("memory", "storage", "calldata")):
            location = self.advance().text
        tok = self.peek()
        if tok is None or tok.kind != KIND_IDENT:
            self.pos, self.depth = save
            return None
        name = self.advance().text
        nxt = self.peek()
        if nxt is not None and nxt.text not in ("=", ";", "}") and not self.newline_before_next():
            self.pos, self.depth = save
            return None
        node = self.node(ast.VAR_DECL, start, name=name, type=type_text, location=location)
        if self.accept("="):
            node.add(self.parse_expression())
            node.attrs["has_init"] = True
        self.terminate()
        return self.close(node)

    def parse_if(self):
        start = self.expect("if")
        node = self.node(ast.IF, start)
        self.expect("(")
        node.add(self.parse_expression())
        self.expect(")")
        then = self.parse_statement()
        node.add(then if then is not None else self.node(ast.BLOCK, None))
        node.attrs["has_else"] = False
        if self.at("else"):
            self.advance()
            node.attrs["has_else"] = True
            els = self.parse_statement()
            node.add(els if els is not None else self.node(ast.BLOCK, None))
        return self.close(node)

    def parse_for(self):
        start = self.expect("for")
        node = self.node(ast.FOR, start)
        self.expect("(")
        init = cond = update = None
        if not self.at(";"):
            init = self.try_parse_var_decl_headless() or self.wrap_stmt(self.parse_expression())
        self.accept(";")
        if not self.at(";"):
            cond = self.parse_expression()
        self.accept(";")
        if not self.at(")"):
            update = self.parse_expression()
        self.expect(")")
        node.attrs["init"] = init
        node.attrs["cond"] = cond
        node.attrs["update"] = update
        for part in (init, cond, update):
            if part is not None:
                node.add(part)
        body = self.parse_statement()
        body = body if body is not None else self.node(ast.BLOCK, None)
        node.add(body)
        node.attrs["body"] = body
        return self.close(node)

    def try_parse_var_decl_headless(self):
        """Like try_parse_var_decl but without statement termination (used
        in for-loop headers)."""
        save = (self.pos, self.depth)
        start = self.mark()
        type_text = self.parse_type_name()
        if type_text is None:
            return None
        if self.at_any(("memory", "storage", "calldata")):
            self.advance()
        tok = self.peek()
        if tok is None or tok.kind != KIND_IDENT:
            self.pos, self.depth = save
            return None
        name = self.advance().text
        node = self.node(ast.VAR_DECL, start, name=name, type=type_text)
        if self.accept("="):
            node.add(self.parse_expression())
            node.attrs["has_init"] = True
        return self.close(node)

    def parse_while(self):
        start = self.expect("while")
        node = self.node(ast.WHILE, start)
        self.expect("(")
        node.add(self.parse_expression())
        self.expect(")")
        body = self.parse_statement()
        node.add(body if body is not None else self.node(ast.BLOCK, None))
        return self.close(node)

    def parse_do(self):
        start = self.expect("do")
        node = self.node(ast.DO_WHILE, start)
        body = self.parse_statement()
        node.add(body if body is not None else self.node(ast.BLOCK, None))
        self.expect("while")
        self.expect("(")
        node.add(self.parse_expression())
        self.expect(")")
        self.terminate()
        return self.close(node)

    def parse_return(self):
        start = self.expect("return")
        node = self.node(ast.RETURN, start)
        tok = self.peek()
        if tok is not None and tok.text not in (";", "}") and self.continues_statement_value(tok):
            node.add(self.parse_expression())
        self.terminate()
        return self.close(node)

    def continues_statement_value(self, tok):
        # `return` followed by a newline and a fresh statement means a bare
        # return; otherwise parse the value expression.
        if not self.newline_before_next():
            return True
        return tok.text in _CONTINUATION_ONLY

    def parse_emit(self):
        start = self.expect("emit")
        node = self.node(ast.EMIT_STMT, start)
        node.add(self.parse_expression())
        self.terminate()
        return self.close(node)

    def parse_assembly(self):
        start = self.expect("assembly")
        if self.peek() is not None and self.peek().kind == KIND_STRING:
            self.advance()
        node = self.node(ast.BLOCK, start, assembly=True)
        if self.at("{"):
            self.skip_balanced("{", "}")
        self.accept(";")
        return self.close(node)

    def skip_balanced(self, open_text, close_text):
        self.expect(open_text)
        depth = 1
        while not self.eof() and depth > 0:
            tok = self.advance()
            if tok.text == open_text:
                depth += 1
            elif tok.text == close_text:
                depth -= 1

    # ------------------------------------------------------------------
    # expressions

    def parse_expression(self):
        return self.parse_assignment()

    def parse_assignment(self):
        left = self.parse_ternary()
        tok = self.peek()
        if tok is not None and tok.text in ASSIGN_OPS and self.continues_expression(tok):
            op = self.advance().text
            right = self.parse_assignment()
            node = ast.AstNode(ast.ASSIGNMENT, attrs={"operator": op})
            node.start, node.line, node.col = left.start, left.line, left.col
            node.add(left)
            node.add(right)
            return self.close(node)
        return left

    def parse_ternary(self):
        cond = self.parse_binary(0)
        tok = self.peek()
        if tok is not None and tok.text == "?" and self.continues_expression(tok):
            self.advance()
            a = self.parse_expression()
            self.expect(":")
            b = self.parse_ternary()
            node = ast.AstNode(ast.BINARY_OP, attrs={"operator": "?:"})
            node.start, node.line, node.col = cond.start, cond.line, cond.col
            node.add(cond)
            node.add(a)
            node.add(b)
            return self.close(node)
        return cond

    def parse_binary(self, level):
        if level >= len(BINARY_LEVELS):
            return self.parse_unary()
        ops = BINARY_LEVELS[level]
        left = self.parse_binary(level + 1)
        while True:
            tok = self.peek()
            if tok is None or tok.text not in ops or not self.continues_expression(tok):
                return left
            op = self.advance().text
            if op == "**":
                right = self.parse_binary(level)  # right associative
            else:
                right = self.parse_binary(level + 1)
            node = ast.AstNode(ast.BINARY_OP, attrs={"operator": op})
            node.start, node.line, node.col = left.start, left.line, left.col
            node.add(left)
            node.add(right)
            left = self.close(node)

    def parse_unary(self):
        tok = self.peek()
        if tok is not None and tok.text in UNARY_OPS:
            start = self.advance()
            operand = self.parse_unary()
            node = self.node(ast.UNARY_OP, start, operator=start.text, prefix=True)
            node.add(operand)
            return self.close(node)
        if tok is not None and tok.text == "delete":
            start = self.advance()
            operand = self.parse_unary()
            node = self.node(ast.UNARY_OP, start, operator="delete", prefix=True)
            node.add(operand)
            return self.close(node)
        if tok is not None and tok.text == "new":
            start = self.advance()
            target = self.parse_postfix(self.parse_primary())
            node = self.node(ast.UNARY_OP, start, operator="new", prefix=True)
            node.add(target)
            return self.close(node)
        return self.parse_postfix(self.parse_primary())

    def parse_postfix(self, expr):
        while True:
            tok = self.peek()
            if tok is None or not self.continues_expression(tok):
                return expr
            if tok.text == ".":
                nxt = self.peek(1)
                if nxt is None or nxt.kind not in (KIND_IDENT, KIND_KEYWORD):
                    return expr
                self.advance()
                member = self.advance().text
                node = ast.AstNode(ast.MEMBER_ACCESS, attrs={"member": member})
                node.start, node.line, node.col = expr.start, expr.line, expr.col
                node.add(expr)
                expr = self.close(node)
            elif tok.text == "(":
                self.advance()
                node = ast.AstNode(ast.CALL)
                node.start, node.line, node.col = expr.start, expr.line, expr.col
                node.add(expr)
                args = []
                while not self.eof() and not self.at(")"):
                    args.append(self.parse_expression())
                    if not self.accept(","):
                        break
                self.expect(")")
                for a in args:
                    node.add(a)
                node.attrs["nargs"] = len(args)
                expr = self.close(node)
            elif tok.text == "[":
                self.advance()
                node = ast.AstNode(ast.INDEX)
                node.start, node.line, node.col = expr.start, expr.line, expr.col
                node.add(expr)
                if not self.at("]"):
                    node.add(self.parse_expression())
                    node.attrs["has_subscript"] = True
                self.expect("]")
                expr = self.close(node)
            elif tok.text == "{":
                # call options: base{value: x, gas: y}
                save = (self.pos, self.depth)
                opts = self.try_parse_call_options(expr)
                if opts is None:
                    self.pos, self.depth = save
                    return expr
                expr = opts
            elif tok.text in ("++", "--"):
                self.advance()
                node = ast.AstNode(ast.UNARY_OP, attrs={"operator": tok.text, "prefix": False})
                node.start, node.line, node.col = expr.start, expr.line, expr.col
                node.add(expr)
                expr = self.close(node)
            else:
                return expr

    def try_parse_call_options(self, base):
        try:
            self.expect("{")
            keys = []
            values = []
            while not self.eof() and not self.at("}"):
                key_tok = self.peek()
                if key_tok.kind not in (KIND_IDENT, KIND_KEYWORD):
                    return None
                self.advance()
                if not self.accept(":"):
                    return None
                keys.append(key_tok.text)
                values.append(self.parse_expression())
                if not self.accept(","):
                    break
            if not self.accept("}"):
                return None
        except ParseError:
            return None
        if not keys:
            return None
        node = ast.AstNode(ast.CALL_OPTIONS, attrs={"keys": keys})
        node.start, node.line, node.col = base.start, base.line, base.col
        node.add(base)
        for v in values:
            node.add(v)
        return self.close(node)

    def parse_primary(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("expected an expression", self.last_token())

        if tok.text == "(":
            self.advance()
            expr = self.parse_expression()
            if self.at(","):
                raise ParseError("tuple expressions are not supported", self.peek())
            self.expect(")")
            return expr

        if tok.kind == KIND_NUMBER:
            self.advance()
            node = self.node(ast.LITERAL, tok, value=tok.text, literal_kind="number")
            unit = self.peek()
            if (
                unit is not None
                and unit.text in UNIT_SUFFIXES
                and not self.newline_before_next()
            ):
                self.advance()
                node.attrs["unit"] = unit.text
            return self.close(node)

        if tok.kind == KIND_STRING:
            self.advance()
            node = self.node(ast.LITERAL, tok, value=tok.text, literal_kind="string")
            return self.close(node)

        if tok.text in ("true", "false"):
            self.advance()
            node = self.node(ast.LITERAL, tok, value=tok.text, literal_kind="bool")
            return self.close(node)

        if tok.text in ("require", "assert"):
            self.advance()
            kind = ast.REQUIRE if tok.text == "require" else ast.ASSERT
            node = self.node(kind, tok)
            if self.at("("):
                self.advance()
                while not self.eof() and not self.at(")"):
                    node.add(self.parse_expression())
                    if not self.accept(","):
                        break
                self.expect(")")
            return self.close(node)

        if tok.text == "revert":
            self.advance()
            node = self.node(ast.REVERT, tok)
            if self.at("("):
                self.advance()
                while not self.eof() and not self.at(")"):
                    node.add(self.parse_expression())
                    if not self.accept(","):
                        break
                self.expect(")")
            return self.close(node)

        if tok.text == "mapping":
            nxt = self.peek(1)
            if nxt is None or nxt.text != "(":
                # bare `mapping` used as a value (normalized sources do this)
                self.advance()
                node = self.node(ast.IDENTIFIER, tok, name="mapping", type_keyword=True)
                return self.close(node)
            type_text = self.parse_type_name()
            if type_text is None:
                raise ParseError("malformed mapping type", tok)
            node = ast.AstNode(ast.IDENTIFIER, attrs={"name": type_text, "type_keyword": True})
            node.start, node.line, node.col = tok.start, tok.line, tok.col
            return self.close(node)

        if tok.text in ELEMENTARY_TYPES:
            self.advance()
            text = tok.text
            if text == "address" and self.at("payable"):
                self.advance()
                text = "address payable"
            node = self.node(ast.IDENTIFIER, tok, name=text, type_keyword=True)
            return self.close(node)

        if tok.kind == KIND_IDENT or tok.text in ("this", "super", "now", "var"):
            self.advance()
            node = self.node(ast.IDENTIFIER, tok, name=tok.text)
            return self.close(node)

        raise ParseError("unexpected token", tok)


def parse_tolerant(tokens):
    """Parse a token stream into a SnippetAst.

    Raises ParseError only when not a single tolerant production applies
    (prose mixed into the snippet, for instance). Anything salvageable is
    kept; skipped statements are reported via diagnostics.
    """
    parser = Parser(tokens)
    roots = parser.parse_unit()

    shape = ast.SHAPE_STATEMENT
    kinds = {r.kind for r in roots}
    if ast.CONTRACT_DEF in kinds:
        shape = ast.SHAPE_CONTRACT
    elif kinds & {ast.FUNCTION_DEF, ast.CONSTRUCTOR_DEF, ast.MODIFIER_DEF}:
        shape = ast.SHAPE_FUNCTION

    snippet = ast.SnippetAst(
        roots=roots,
        shape=shape,
        placeholders_skipped=getattr(tokens, "placeholders_skipped", 0),
        pragmas=parser.pragmas,
        diagnostics=parser.diagnostics,
    )
    snippet.source = getattr(tokens, "scrubbed", "")
    return snippet


def parse_source(source, source_id=""):
    """Tokenize and parse in one step."""
    tokens = tokenize(source)
    snippet = parse_tolerant(tokens)
    snippet.source_id = source_id
    return snippet
