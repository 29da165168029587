"""Abstract syntax for MOOL programs, types, usages and runtime expressions.

All nodes are frozen dataclasses. Source spans are carried along for
diagnostics but never take part in equality, so two trees that differ only
in where they came from compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from mool.diagnostics import Span


def _span():
    return field(default=None, compare=False, repr=False, kw_only=True)


LIN = "lin"
UN = "un"


# ---------------------------------------------------------------------------
# usage types


@dataclass(frozen=True)
class Branch:
    qual: str
    entries: tuple[tuple[str, "Usage"], ...] = ()

    def labels(self) -> tuple[str, ...]:
        return tuple(m for m, _ in self.entries)

    def get(self, label: str) -> "Usage | None":
        for m, u in self.entries:
            if m == label:
                return u
        return None


@dataclass(frozen=True)
class Variant:
    on_true: "Usage"
    on_false: "Usage"


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Rec:
    name: str
    body: "Usage"


Usage = Union[Branch, Variant, Var, Rec]

END = Branch(UN, ())


def free_usage_vars(u: Usage) -> frozenset[str]:
    match u:
        case Var(name):
            return frozenset([name])
        case Rec(name, body):
            return free_usage_vars(body) - {name}
        case Branch(_, entries):
            out: frozenset[str] = frozenset()
            for _, cont in entries:
                out |= free_usage_vars(cont)
            return out
        case Variant(t, f):
            return free_usage_vars(t) | free_usage_vars(f)
    raise TypeError(f"not a usage: {u!r}")


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class UnitT:
    pass


@dataclass(frozen=True)
class BoolT:
    pass


@dataclass(frozen=True)
class IntT:
    pass


@dataclass(frozen=True)
class StrT:
    pass


@dataclass(frozen=True)
class ObjT:
    """``C[u]``. A ``None`` usage marks a shorthand local declaration whose
    type is taken from its initialiser."""

    cls: str
    usage: Usage | None


Type = Union[UnitT, BoolT, IntT, StrT, ObjT]

UNIT = UnitT()
BOOL = BoolT()
INT = IntT()
STR = StrT()


# ---------------------------------------------------------------------------
# values


@dataclass(frozen=True)
class UnitV:
    span: Span | None = _span()


@dataclass(frozen=True)
class BoolV:
    value: bool
    span: Span | None = _span()


@dataclass(frozen=True)
class IntV:
    value: int
    span: Span | None = _span()


@dataclass(frozen=True)
class StrV:
    value: str
    span: Span | None = _span()


@dataclass(frozen=True)
class ObjRef:
    oid: int
    span: Span | None = _span()


@dataclass(frozen=True)
class Uninit:
    span: Span | None = _span()


Value = Union[UnitV, BoolV, IntV, StrV, ObjRef, Uninit]
VALUE_TYPES = (UnitV, BoolV, IntV, StrV, ObjRef, Uninit)


_VALUE_SET = frozenset(VALUE_TYPES)


def is_value(e: "Expr") -> bool:
    return type(e) in _VALUE_SET


# ---------------------------------------------------------------------------
# expressions


@dataclass(frozen=True)
class Ident:
    name: str
    span: Span | None = _span()


@dataclass(frozen=True)
class This:
    span: Span | None = _span()


@dataclass(frozen=True)
class FieldAccess:
    """``this.f``; fields of other objects are never accessible."""

    obj: "Expr"
    name: str
    span: Span | None = _span()


@dataclass(frozen=True)
class Seq:
    first: "Expr"
    second: "Expr"
    span: Span | None = _span()


@dataclass(frozen=True)
class Assign:
    target: "Expr"
    value: "Expr"
    span: Span | None = _span()


@dataclass(frozen=True)
class New:
    cls: str
    span: Span | None = _span()


@dataclass(frozen=True)
class Call:
    """Method call. The receiver is a path, never an arbitrary expression:
    ``this`` (self-call), an identifier, or ``this.f``."""

    receiver: "Expr"
    method: str
    args: tuple["Expr", ...] = ()
    span: Span | None = _span()

    @property
    def is_self_call(self) -> bool:
        return isinstance(self.receiver, This)


@dataclass(frozen=True)
class If:
    cond: "Expr"
    then: "Expr"
    orelse: "Expr"
    span: Span | None = _span()


@dataclass(frozen=True)
class While:
    cond: "Expr"
    body: "Expr"
    span: Span | None = _span()


@dataclass(frozen=True)
class Spawn:
    body: "Expr"
    span: Span | None = _span()


@dataclass(frozen=True)
class Print:
    arg: "Expr"
    span: Span | None = _span()


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    span: Span | None = _span()


@dataclass(frozen=True)
class Let:
    """Local declaration ``T x = init;`` scoping over ``body``."""

    name: str
    type: Type
    init: "Expr"
    body: "Expr"
    span: Span | None = _span()


# runtime-only forms


@dataclass(frozen=True)
class InSync:
    oid: int
    body: "Expr"
    span: Span | None = _span()


@dataclass(frozen=True)
class Frame:
    """Activation of a method body; ``fid`` indexes the machine's frame store
    holding the receiver and the parameter/local bindings."""

    fid: int
    body: "Expr"
    span: Span | None = _span()


@dataclass(frozen=True)
class Pending:
    """Result of a call whose continuation is a variant; the receiver's
    record is resolved when the boolean is consumed."""

    oid: int
    body: "Expr"
    span: Span | None = _span()


Expr = Union[
    UnitV, BoolV, IntV, StrV, ObjRef, Uninit,
    Ident, This, FieldAccess, Seq, Assign, New, Call, If, While, Spawn,
    Print, BinOp, Let, InSync, Frame, Pending,
]

RUNTIME_ONLY = (ObjRef, Uninit, InSync, Frame, Pending)

BINOPS = ("+", "-", "*", "<", ">", "<=", ">=", "==", "!=")


# ---------------------------------------------------------------------------
# declarations


@dataclass(frozen=True)
class Param:
    name: str
    type: Type
    span: Span | None = _span()


@dataclass(frozen=True)
class FieldDecl:
    name: str
    type: Type
    span: Span | None = _span()


@dataclass(frozen=True)
class MethodDecl:
    sync: bool
    return_type: Type
    name: str
    params: tuple[Param, ...]
    body: Expr
    span: Span | None = _span()


@dataclass(frozen=True)
class ClassDecl:
    name: str
    usage: Usage
    fields: tuple[FieldDecl, ...]
    methods: tuple[MethodDecl, ...]
    where: tuple[tuple[str, Usage], ...] = field(default=(), compare=False)
    span: Span | None = _span()

    def method(self, name: str) -> MethodDecl | None:
        for m in self.methods:
            if m.name == name:
                return m
        return None

    def field_type(self, name: str) -> Type | None:
        for f in self.fields:
            if f.name == name:
                return f.type
        return None


@dataclass(frozen=True)
class Program:
    classes: tuple[ClassDecl, ...]

    def cls(self, name: str) -> ClassDecl | None:
        for c in self.classes:
            if c.name == name:
                return c
        return None


def children(e: Expr) -> tuple[Expr, ...]:
    match e:
        case FieldAccess(obj, _):
            return (obj,)
        case Seq(a, b):
            return (a, b)
        case Assign(t, v):
            return (t, v)
        case Call(r, _, args):
            return (r, *args)
        case If(c, t, f):
            return (c, t, f)
        case While(c, b):
            return (c, b)
        case Spawn(b) | Print(b):
            return (b,)
        case BinOp(_, a, b):
            return (a, b)
        case Let(_, _, i, b):
            return (i, b)
        case InSync(_, b) | Frame(_, b) | Pending(_, b):
            return (b,)
    return ()


def free_idents(e: Expr) -> frozenset[str]:
    """Identifiers used in ``e`` that are not bound by a ``Let`` inside it."""
    match e:
        case Ident(name):
            return frozenset([name])
        case Let(name, _, init, body):
            return free_idents(init) | (free_idents(body) - {name})
    out: frozenset[str] = frozenset()
    for c in children(e):
        out |= free_idents(c)
    return out
