from __future__ import annotations

from dataclasses import dataclass

from mool.diagnostics import LexError, Span

KEYWORDS = frozenset({
    "class", "usage", "where", "lin", "un", "end", "sync", "spawn", "new",
    "if", "else", "while", "true", "false", "unit", "print", "this", "mu",
    "boolean", "int", "string",
})

# longest first
PUNCT = ("<=", ">=", "==", "!=", ";", "+", "-", "*", "«", "»", "<", ">",
         "{", "}", "[", "]", ".", "=", "(", ")", ",")

ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


@dataclass(frozen=True)
class Token:
    kind: str  # kw | ident | int | str | punct | eof
    value: str
    span: Span

    def is_(self, kind: str, value: str | None = None) -> bool:
        return self.kind == kind and (value is None or self.value == value)

    def __repr__(self) -> str:
        return f"{self.kind}:{self.value}"


def tokenize(source: str, file: str = "<input>") -> list[Token]:
    """Split ``source`` into tokens; the result always ends with an eof token."""
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(source)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = source[i]
        if ch in " \t\r\n":
            advance(1)
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                advance(1)
            continue
        if source.startswith("/*", i):
            start = Span(file, line, col, line, col + 2)
            j = source.find("*/", i + 2)
            if j < 0:
                raise LexError("E-LEX", "unterminated block comment", start)
            advance(j + 2 - i)
            continue
        sl, sc = line, col
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            word = source[i:j]
            advance(j - i)
            kind = "kw" if word in KEYWORDS else "ident"
            toks.append(Token(kind, word, Span(file, sl, sc, line, col)))
            continue
        if ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            text = source[i:j]
            advance(j - i)
            toks.append(Token("int", text, Span(file, sl, sc, line, col)))
            continue
        if ch == '"':
            advance(1)
            buf = []
            while True:
                if i >= n or source[i] == "\n":
                    raise LexError("E-LEX", "unterminated string literal",
                                   Span(file, sl, sc, line, col))
                c = source[i]
                if c == '"':
                    advance(1)
                    break
                if c == "\\" and i + 1 < n and source[i + 1] in ESCAPES:
                    buf.append(ESCAPES[source[i + 1]])
                    advance(2)
                    continue
                buf.append(c)
                advance(1)
            toks.append(Token("str", "".join(buf), Span(file, sl, sc, line, col)))
            continue
        for p in PUNCT:
            if source.startswith(p, i):
                advance(len(p))
                toks.append(Token("punct", p, Span(file, sl, sc, line, col)))
                break
        else:
            raise LexError("E-LEX", f"illegal character {ch!r}",
                           Span(file, sl, sc, sl, sc + 1))
    toks.append(Token("eof", "", Span(file, line, col, line, col)))
    return toks
