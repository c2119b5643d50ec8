"""Tokenization for SQL text and for natural-language feedback."""

from __future__ import annotations

import re


class TokenizeError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_SQL_TOKEN = re.compile(
    r"""
    \s+                                   # whitespace (skipped)
  | '(?:[^']|'')*'                        # single-quoted string
  | "(?:[^"]|"")*"                        # double-quoted string
  | \d+\.\d+ | \.\d+ | \d+                # numbers
  | [A-Za-z_][A-Za-z_0-9]*                # identifiers / keywords
  | <> | != | >= | <= | =                 # comparison operators
  | [<>(),.;*+/-]                         # single-char symbols
    """,
    re.VERBOSE,
)

_CAMEL = re.compile(r"(?<=[a-z0-9])(?=[A-Z])")
_FEEDBACK_WORD = re.compile(r"[A-Za-z0-9_]+")


def tokenize(text: str, mode: str = "sql") -> list[str]:
    """Split text into tokens.

    ``sql`` mode lowercases and emits one token per keyword, identifier,
    operator, or literal. ``feedback`` mode lowercases words, strips
    punctuation, and splits identifiers on underscores and camelCase so that
    schema-item mentions like ``first_name`` match ``first name`` in prose.
    """
    if mode == "sql":
        return _tokenize_sql(text)
    if mode == "feedback":
        return _tokenize_feedback(text)
    raise ValueError(f"unknown tokenize mode {mode!r}")


def _tokenize_sql(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _SQL_TOKEN.match(text, pos)
        if match is None:
            raise TokenizeError(f"unexpected character {text[pos]!r}", pos)
        token = match.group(0)
        if token[0] in "'\"":
            if len(token) < 2 or token[-1] != token[0]:
                raise TokenizeError("unterminated string literal", pos)
        pos = match.end()
        if not token.strip():
            continue
        tokens.append(token if token[0] in "'\"" else token.lower())
    return tokens


def _tokenize_feedback(text: str) -> list[str]:
    tokens = []
    for word in _FEEDBACK_WORD.findall(text):
        for piece in word.split("_"):
            for sub in _CAMEL.split(piece):
                if sub:
                    tokens.append(sub.lower())
    return tokens


def feedback_token_count(text: str) -> int:
    return len(_tokenize_feedback(text))


def sql_lex(text: str) -> list[tuple[str, int]]:
    """SQL tokens paired with their character offsets (for parse errors)."""
    tokens = []
    pos = 0
    while pos < len(text):
        match = _SQL_TOKEN.match(text, pos)
        if match is None:
            raise TokenizeError(f"unexpected character {text[pos]!r}", pos)
        token = match.group(0)
        if token[0] in "'\"":
            if len(token) < 2 or token[-1] != token[0]:
                raise TokenizeError("unterminated string literal", pos)
        start = pos
        pos = match.end()
        if not token.strip():
            continue
        tokens.append((token if token[0] in "'\"" else token.lower(), start))
    return tokens
