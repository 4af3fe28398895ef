"""Lexer for Solidity source fragments.

The lexer is deliberately forgiving: it accepts anything that decodes as
UTF-8, strips comments, and silently drops `...` ellipsis placeholders that
people paste into forum snippets (the number of dropped placeholders is kept
so the parser can report it). Newlines survive as tokens because the parser
uses them to terminate statements whose semicolon was lost in copy-paste.
"""

from dataclasses import dataclass

KEYWORDS = frozenset(
    """
    contract library interface function modifier constructor event struct
    enum mapping if else for while do break continue return returns emit
    require revert assert throw pragma import using is new delete memory
    storage calldata public private internal external pure view payable
    constant anonymous indexed assembly this super now true false var
    """.split()
)

# Elementary type names double as expressions (casts, normalized argument
# slots), so they get their own class on top of KEYWORDS membership.
ELEMENTARY_TYPES = frozenset(
    ["address", "bool", "string", "var", "bytes", "byte", "int", "uint", "fixed", "ufixed"]
    + ["bytes%d" % i for i in range(1, 33)]
    + ["int%d" % i for i in range(8, 257, 8)]
    + ["uint%d" % i for i in range(8, 257, 8)]
)

UNIT_SUFFIXES = frozenset(
    "wei gwei szabo finney ether seconds minutes hours days weeks years".split()
)

# Longest first so the scanner can take the first match.
SYMBOLS = [
    ">>=", "<<=", "**=",
    "=>", "==", "!=", "<=", ">=", "&&", "||", "<<", ">>", "**",
    "+=", "-=", "*=", "/=", "%=", "|=", "&=", "^=", "++", "--",
    "(", ")", "[", "]", "{", "}", ";", ",", ".", "?", ":",
    "=", "<", ">", "+", "-", "*", "/", "%", "!", "~", "&", "|", "^",
]

KIND_KEYWORD = "keyword"
KIND_IDENT = "identifier"
KIND_NUMBER = "number-literal"
KIND_STRING = "string-literal"
KIND_SYMBOL = "symbol"
KIND_NEWLINE = "newline"


class EncodingError(ValueError):
    """Raised when byte input is not valid UTF-8."""


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int
    start: int
    end: int

    def __repr__(self):
        return "Token(%s, %r, %d:%d)" % (self.kind, self.text, self.line, self.col)


class TokenStream(list):
    """A list of tokens that remembers lexer-level statistics.

    ``placeholders_skipped`` counts `...` (or a unicode ellipsis) runs that
    were removed, ``scrubbed`` is the source with comments and placeholders
    blanked out so that token offsets still index into it.
    """

    placeholders_skipped: int = 0
    scrubbed: str = ""


def _decode(source):
    if isinstance(source, bytes):
        try:
            return source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise EncodingError("source is not valid UTF-8: %s" % exc) from exc
    return source


def scrub(source):
    """Blank out comments and ellipsis placeholders, preserving offsets.

    Every character of a comment or placeholder becomes a space (newlines
    inside block comments stay, so line numbers are unaffected). Returns the
    scrubbed text and the number of placeholders removed.
    """
    text = _decode(source)
    out = list(text)
    placeholders = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in "\"'":
            quote = ch
            i += 1
            while i < n:
                if text[i] == "\\":
                    i += 2
                    continue
                if text[i] == quote or text[i] == "\n":
                    i += 1
                    break
                i += 1
            continue
        if ch == "/" and i + 1 < n and text[i + 1] == "/":
            while i < n and text[i] != "\n":
                out[i] = " "
                i += 1
            continue
        if ch == "/" and i + 1 < n and text[i + 1] == "*":
            out[i] = out[i + 1] = " "
            i += 2
            while i < n:
                if text[i] == "*" and i + 1 < n and text[i + 1] == "/":
                    out[i] = out[i + 1] = " "
                    i += 2
                    break
                if text[i] != "\n":
                    out[i] = " "
                i += 1
            continue
        if ch == "." and text[i : i + 3] == "...":
            j = i
            while j < n and text[j] == ".":
                out[j] = " "
                j += 1
            placeholders += 1
            i = j
            continue
        if ch == "…":
            out[i] = " "
            placeholders += 1
            i += 1
            continue
        i += 1
    return "".join(out), placeholders


def strip_comments(source):
    """Remove comment text entirely (used for duplicate-detection hashing).

    Unlike scrub() this splices comments out instead of blanking them, so two
    copies of a snippet that differ only in comments become byte-identical.
    """
    text = _decode(source)
    out = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in "\"'":
            quote = ch
            out.append(ch)
            i += 1
            while i < n:
                out.append(text[i])
                if text[i] == "\\" and i + 1 < n:
                    out.append(text[i + 1])
                    i += 2
                    continue
                if text[i] == quote or text[i] == "\n":
                    i += 1
                    break
                i += 1
            continue
        if ch == "/" and i + 1 < n and text[i + 1] == "/":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "/" and i + 1 < n and text[i + 1] == "*":
            i += 2
            while i < n:
                if text[i] == "*" and i + 1 < n and text[i + 1] == "/":
                    i += 2
                    break
                i += 1
            continue
        out.append(ch)
        i += 1
    return "".join(out)


def _is_ident_start(ch):
    return ch.isalpha() or ch == "_" or ch == "$"


def _is_ident(ch):
    return ch.isalnum() or ch == "_" or ch == "$"


def tokenize(source):
    """Split source into tokens.

    Returns a TokenStream (a list of Token). Comments never appear; `...`
    placeholders are dropped and counted on the stream. One newline token is
    emitted per run of line breaks between two real tokens.
    """
    text, placeholders = scrub(source)
    tokens = TokenStream()
    tokens.placeholders_skipped = placeholders
    tokens.scrubbed = text

    line = 1
    col = 1
    i = 0
    n = len(text)
    pending_newline = False

    def emit(kind, start, end, tok_line, tok_col):
        nonlocal pending_newline
        if pending_newline and tokens:
            tokens.append(Token(KIND_NEWLINE, "\n", tok_line, 1, start, start))
        pending_newline = False
        tokens.append(Token(kind, text[start:end], tok_line, tok_col, start, end))

    while i < n:
        ch = text[i]
        if ch == "\n":
            pending_newline = True
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r\f\v":
            i += 1
            col += 1
            continue

        start, tok_line, tok_col = i, line, col
        if _is_ident_start(ch):
            while i < n and _is_ident(text[i]):
                i += 1
            word = text[start:i]
            kind = KIND_KEYWORD if (word in KEYWORDS or word in ELEMENTARY_TYPES) else KIND_IDENT
            emit(kind, start, i, tok_line, tok_col)
            col += i - start
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            if text[i : i + 2] in ("0x", "0X"):
                i += 2
                while i < n and (text[i] in "abcdefABCDEF_" or text[i].isdigit()):
                    i += 1
            else:
                seen_dot = False
                while i < n:
                    c = text[i]
                    if c.isdigit() or c == "_":
                        i += 1
                    elif c == "." and not seen_dot and i + 1 < n and text[i + 1].isdigit():
                        seen_dot = True
                        i += 1
                    elif c in "eE" and i + 1 < n and (text[i + 1].isdigit() or text[i + 1] in "+-"):
                        i += 2
                    else:
                        break
            emit(KIND_NUMBER, start, i, tok_line, tok_col)
            col += i - start
            continue
        if ch in "\"'":
            quote = ch
            i += 1
            while i < n:
                if text[i] == "\\":
                    i += 2
                    continue
                if text[i] == quote:
                    i += 1
                    break
                if text[i] == "\n":
                    break
                i += 1
            emit(KIND_STRING, start, i, tok_line, tok_col)
            col += i - start
            continue

        for sym in SYMBOLS:
            if text.startswith(sym, i):
                i += len(sym)
                emit(KIND_SYMBOL, start, i, tok_line, tok_col)
                col += len(sym)
                break
        else:
            # Unknown character: skip it rather than fail, snippets contain
            # stray unicode punctuation surprisingly often.
            i += 1
            col += 1

    return tokens
