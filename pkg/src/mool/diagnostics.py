from __future__ import annotations

import json
from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class Span:
    file: str
    line: int
    col: int
    end_line: int
    end_col: int

    def to(self, other: "Span | None") -> "Span":
        if other is None:
            return self
        return Span(self.file, self.line, self.col, other.end_line, other.end_col)


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    code: str
    message: str
    span: Span | None = None

    def render(self) -> str:
        if self.span is None:
            where = "<unknown>"
        else:
            where = f"{self.span.file}:{self.span.line}:{self.span.col}"
        return f"{where}: {self.severity}[{self.code}]: {self.message}"

    def to_json(self) -> dict:
        return asdict(self)


def render_json(diags: list[Diagnostic]) -> str:
    return json.dumps([d.to_json() for d in diags], indent=2)


class MoolError(Exception):
    """Raised for a single fatal diagnostic."""

    def __init__(self, code: str, message: str, span: Span | None = None):
        super().__init__(message)
        self.diagnostic = Diagnostic("error", code, message, span)

    @property
    def code(self) -> str:
        return self.diagnostic.code


class LexError(MoolError):
    pass


class ParseError(MoolError):
    pass


class UnboundName(MoolError):
    pass


def dedupe(diags: list[Diagnostic]) -> list[Diagnostic]:
    seen = set()
    out = []
    for d in diags:
        if d not in seen:
            seen.add(d)
            out.append(d)
    return out
