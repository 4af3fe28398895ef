"""Tolerant lexing and parsing of Solidity snippets."""

from .tokens import EncodingError, Token, TokenStream, scrub, strip_comments, tokenize
from .parse import ParseError, Parser, parse_source, parse_tolerant
from . import ast

__all__ = [
    "EncodingError",
    "ParseError",
    "Parser",
    "Token",
    "TokenStream",
    "ast",
    "parse_source",
    "parse_tolerant",
    "scrub",
    "strip_comments",
    "tokenize",
]
