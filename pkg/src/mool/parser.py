"""Parser for the Java-like MOOL surface syntax.

Besides building the AST this module performs the conveniences the compiler
is expected to apply: usage sugar (``end``, ``;`` sequencing, ``*{...}``,
``where`` bindings) is desugared to core usages, classes without a usage
clause receive the default ``*{m1 + ... + mk}``, and bare field names in
method bodies are rewritten to ``this.f``.
"""

from __future__ import annotations

from dataclasses import replace

from mool.ast import (
    BOOL, END, INT, LIN, STR, UN, UNIT, Assign, BinOp, BoolV, Branch, Call,
    ClassDecl, Expr, FieldAccess, FieldDecl, Ident, If, IntV, Let, MethodDecl,
    New, ObjT, Param, Print, Program, Rec, Seq, Spawn, StrV, This, Type,
    UnitV, Usage, Var, Variant, While, children, free_usage_vars,
)
from mool.diagnostics import Diagnostic, MoolError, ParseError, Span, UnboundName
from mool.lexer import Token, tokenize
from mool.usage import is_contractive

BASE_TYPES = {"unit": UNIT, "boolean": BOOL, "int": INT, "string": STR}
VARIANT_OPEN = ("«", "<")
VARIANT_CLOSE = ("»", ">")
PRECEDENCE = [("==", "!="), ("<", ">", "<=", ">="), ("+", "-"), ("*",)]


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0
        self.diagnostics: list[Diagnostic] = []

    # -- token helpers -----------------------------------------------------

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def next(self) -> Token:
        tok = self.toks[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    @property
    def last(self) -> Token:
        return self.toks[max(self.pos - 1, 0)]

    def at(self, kind: str, value: str | None = None, k: int = 0) -> bool:
        return self.peek(k).is_(kind, value)

    def at_end(self) -> bool:
        return self.at("punct", "}") or self.at("eof")

    def at_punct(self, *values: str) -> bool:
        tok = self.peek()
        return tok.kind == "punct" and tok.value in values

    def accept(self, kind: str, value: str | None = None) -> Token | None:
        if self.at(kind, value):
            return self.next()
        return None

    def expect(self, kind: str, value: str | None = None) -> Token:
        tok = self.peek()
        if not tok.is_(kind, value):
            want = value if value is not None else kind
            got = tok.value or tok.kind
            raise ParseError("E-PARSE", f"expected {want!r}, found {got!r}", tok.span)
        return self.next()

    def ident(self) -> Token:
        return self.expect("ident")

    def span_from(self, start: Token) -> Span:
        return start.span.to(self.last.span)

    # -- usages --------------------------------------------------------------

    def usage(self, where_names=frozenset(), bracket=False, bound=frozenset(),
              variant_child=False) -> Usage:
        tok = self.peek()
        if tok.is_("kw", "end"):
            self.next()
            return END
        if tok.is_("kw", "mu"):
            self.next()
            name = self.ident().value
            self.expect("punct", ".")
            body = self.usage(where_names, bracket, bound | {name})
            return Rec(name, body)
        if tok.is_("punct", "*"):
            self.next()
            return self.star(where_names, bracket, bound)
        if tok.kind == "punct" and tok.value in VARIANT_OPEN:
            self.next()
            left = self.usage(where_names, bracket, bound, variant_child=True)
            self.expect("punct", "+")
            right = self.usage(where_names, bracket, bound, variant_child=True)
            close = self.peek()
            if not (close.kind == "punct" and close.value in VARIANT_CLOSE):
                raise ParseError("E-PARSE", "expected '»' to close variant", close.span)
            self.next()
            return Variant(left, right)
        default = LIN if variant_child else UN
        if tok.kind == "kw" and tok.value in (LIN, UN):
            self.next()
            qual = tok.value
            if self.at("punct", "{"):
                return self.braces(qual, where_names, bracket, bound)
            label = self.ident()
            return self.prefixed(qual, label, where_names, bracket, bound)
        if tok.is_("punct", "{"):
            return self.braces(default, where_names, bracket, bound)
        if tok.kind == "ident":
            name = tok.value
            if (self.at("punct", ";", 1) and name not in where_names
                    and name not in bound):
                self.next()
                return self.prefixed(default, tok, where_names, bracket, bound)
            self.next()
            return Var(name)
        raise ParseError("E-PARSE", f"expected a usage, found {tok.value or tok.kind!r}",
                         tok.span)

    def starts_usage(self, where_names, bracket, bound) -> bool:
        tok = self.peek()
        if tok.kind == "kw":
            return tok.value in ("end", "mu", LIN, UN)
        if tok.kind == "punct":
            return tok.value in ("*", "{") or tok.value in VARIANT_OPEN
        if tok.kind == "ident":
            if bracket or tok.value in where_names or tok.value in bound:
                return True
            # a name closing a usage is a reference; before an identifier or
            # '[' it is the type of the next field declaration
            nxt = self.peek(1)
            return (nxt.kind == "eof" or nxt.is_("kw", "where")
                    or (nxt.kind == "punct" and nxt.value in (";", "+", ",", "}", *VARIANT_CLOSE)))
        return False

    def prefixed(self, qual, label: Token, where_names, bracket, bound) -> Usage:
        self.expect("punct", ";")
        if self.starts_usage(where_names, bracket, bound):
            cont = self.usage(where_names, bracket, bound)
        else:
            cont = END
        return Branch(qual, ((label.value, cont),))

    def choices(self, where_names, bracket, bound, default_cont):
        self.expect("punct", "{")
        entries: list[tuple[str, Usage | None]] = []
        seen = set()
        if not self.at("punct", "}"):
            while True:
                label = self.ident()
                if label.value in seen:
                    raise ParseError("E-PARSE", f"duplicate label {label.value!r} in branch",
                                     label.span)
                seen.add(label.value)
                cont = default_cont
                if self.accept("punct", ";"):
                    cont = self.usage(where_names, bracket, bound)
                entries.append((label.value, cont))
                if not self.accept("punct", "+"):
                    break
        self.expect("punct", "}")
        return entries

    def braces(self, qual, where_names, bracket, bound) -> Usage:
        entries = self.choices(where_names, bracket, bound, END)
        return Branch(qual, tuple(entries))

    def star(self, where_names, bracket, bound) -> Usage:
        entries = self.choices(where_names, bracket, bound, None)
        used: set[str] = set()
        for _, cont in entries:
            if cont is not None:
                used |= free_usage_vars(cont)
        name = fresh_var(used | set(where_names))
        body = Branch(UN, tuple((m, Var(name) if c is None else c) for m, c in entries))
        return Rec(name, body)

    def where_prescan(self) -> frozenset[str]:
        names = set()
        depth = 0
        k = 0
        while True:
            tok = self.peek(k)
            if tok.kind == "eof" or tok.is_("punct", "("):
                break
            if tok.is_("punct", "{"):
                depth += 1
            elif tok.is_("punct", "}"):
                if depth == 0:
                    break
                depth -= 1
            elif tok.kind == "ident" and self.peek(k + 1).is_("punct", "="):
                names.add(tok.value)
            k += 1
        return frozenset(names)

    def usage_clause(self):
        self.expect("kw", "usage")
        where_names = self.where_prescan()
        u = self.usage(where_names)
        bindings: list[tuple[str, Usage]] = []
        if self.accept("kw", "where"):
            while True:
                name = self.ident()
                self.expect("punct", "=")
                bindings.append((name.value, self.usage(where_names)))
                if not self.accept("punct", ","):
                    break
        self.accept("punct", ";")
        return u, tuple(bindings)

    # -- types and declarations -----------------------------------------------

    def type_(self) -> Type:
        tok = self.peek()
        if tok.kind == "kw" and tok.value in BASE_TYPES:
            self.next()
            return BASE_TYPES[tok.value]
        name = self.ident()
        if self.accept("punct", "["):
            u = self.usage(bracket=True)
            self.expect("punct", "]")
            return ObjT(name.value, u)
        return ObjT(name.value, None)

    def at_type(self) -> bool:
        tok = self.peek()
        if tok.kind == "kw" and tok.value in BASE_TYPES:
            return True
        return tok.kind == "ident"

    def class_(self) -> ClassDecl:
        start = self.expect("kw", "class")
        name = self.ident().value
        self.expect("punct", "{")
        usage = None
        where: tuple = ()
        if self.at("kw", "usage"):
            usage, where = self.usage_clause()
        fields: list[FieldDecl] = []
        methods: list[MethodDecl] = []
        while not self.at("punct", "}"):
            if self.at("eof"):
                raise ParseError("E-PARSE", f"unterminated class {name!r}", self.peek().span)
            mstart = self.peek()
            sync = self.accept("kw", "sync") is not None
            t = self.type_()
            member = self.ident()
            if self.accept("punct", "("):
                params = []
                if not self.at("punct", ")"):
                    while True:
                        pstart = self.peek()
                        pt = self.type_()
                        pname = self.ident().value
                        params.append(Param(pname, pt, span=self.span_from(pstart)))
                        if not self.accept("punct", ","):
                            break
                self.expect("punct", ")")
                body = self.block()
                methods.append(MethodDecl(sync, t, member.value, tuple(params), body,
                                          span=member.span))
            else:
                if sync:
                    raise ParseError("E-PARSE", "fields cannot be sync", mstart.span)
                self.expect("punct", ";")
                fields.append(FieldDecl(member.value, t, span=self.span_from(mstart)))
        self.expect("punct", "}")
        return ClassDecl(name, usage, tuple(fields), tuple(methods), where,
                         span=start.span)

    # -- statements ------------------------------------------------------------

    def block(self) -> Expr:
        self.expect("punct", "{")
        e = self.stmts()
        self.expect("punct", "}")
        return e

    def at_decl(self) -> bool:
        tok = self.peek()
        if tok.kind == "kw" and tok.value in BASE_TYPES:
            return self.at("ident", k=1)
        if tok.kind == "ident":
            return self.at("ident", k=1) or self.at("punct", "[", k=1)
        return False

    def stmts(self) -> Expr:
        while self.accept("punct", ";"):
            pass
        if self.at_end():
            return UnitV(span=self.peek().span)
        start = self.peek()
        if self.at_decl():
            t = self.type_()
            name = self.ident().value
            self.expect("punct", "=")
            init = self.expr()
            if not self.at_end():
                self.expect("punct", ";")
            body = self.stmts()
            return Let(name, t, init, body, span=self.span_from(start))
        stmt = self.stmt(top=True)
        while self.accept("punct", ";"):
            pass
        if self.at_end():
            return stmt
        rest = self.stmts()
        return Seq(stmt, rest, span=start.span.to(rest.span))

    def stmt(self, top: bool = False) -> Expr:
        start = self.peek()
        if start.is_("kw", "if"):
            self.next()
            self.expect("punct", "(")
            cond = self.expr()
            self.expect("punct", ")")
            then = self.stmt()
            orelse: Expr = UnitV(span=self.last.span)
            if self.accept("kw", "else"):
                orelse = self.stmt()
            return If(cond, then, orelse, span=self.span_from(start))
        if start.is_("kw", "while"):
            self.next()
            self.expect("punct", "(")
            cond = self.expr()
            self.expect("punct", ")")
            body = self.stmt()
            return While(cond, body, span=self.span_from(start))
        if start.is_("punct", "{"):
            return self.block()
        e = self.expr()
        if top:
            if not self.at_end():
                self.expect("punct", ";")
        elif not self.at_end() and not self.at("kw", "else"):
            self.expect("punct", ";")
        return e

    # -- expressions -----------------------------------------------------------

    def expr(self) -> Expr:
        start = self.peek()
        if self.accept("kw", "spawn"):
            body = self.expr()
            return Spawn(body, span=self.span_from(start))
        lhs = self.binary(0)
        if self.at("punct", "="):
            eq = self.next()
            if not isinstance(lhs, (Ident, FieldAccess)):
                raise ParseError("E-PARSE", "left side of '=' must be a field", eq.span)
            rhs = self.expr()
            return Assign(lhs, rhs, span=self.span_from(start))
        return lhs

    def binary(self, level: int) -> Expr:
        if level == len(PRECEDENCE):
            return self.unary()
        start = self.peek()
        left = self.binary(level + 1)
        ops = PRECEDENCE[level]
        while self.at_punct(*ops):
            op = self.next().value
            right = self.binary(level + 1)
            left = BinOp(op, left, right, span=self.span_from(start))
            if level == 1:
                break  # comparisons do not chain
        return left

    def unary(self) -> Expr:
        start = self.peek()
        if self.accept("punct", "-"):
            operand = self.unary()
            if isinstance(operand, IntV):
                return IntV(-operand.value, span=self.span_from(start))
            return BinOp("-", IntV(0, span=start.span), operand, span=self.span_from(start))
        return self.primary()

    def args(self) -> tuple[Expr, ...]:
        self.expect("punct", "(")
        out = []
        if not self.at("punct", ")"):
            while True:
                out.append(self.expr())
                if not self.accept("punct", ","):
                    break
        self.expect("punct", ")")
        return tuple(out)

    def primary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "int":
            self.next()
            return IntV(int(tok.value), span=tok.span)
        if tok.kind == "str":
            self.next()
            return StrV(tok.value, span=tok.span)
        if tok.kind == "kw":
            match tok.value:
                case "true" | "false":
                    self.next()
                    return BoolV(tok.value == "true", span=tok.span)
                case "unit":
                    self.next()
                    return UnitV(span=tok.span)
                case "new":
                    self.next()
                    name = self.ident().value
                    if self.accept("punct", "("):
                        self.expect("punct", ")")
                    return New(name, span=self.span_from(tok))
                case "print":
                    self.next()
                    self.expect("punct", "(")
                    arg = self.expr()
                    self.expect("punct", ")")
                    return Print(arg, span=self.span_from(tok))
                case "if" | "while":
                    return self.stmt()
                case "this":
                    return self.this_path()
        if tok.is_("punct", "("):
            self.next()
            e = self.expr()
            self.expect("punct", ")")
            return e
        if tok.is_("punct", "{"):
            return self.block()
        if tok.kind == "ident":
            self.next()
            if self.at("punct", "("):
                args = self.args()
                return Call(This(span=tok.span), tok.value, args, span=self.span_from(tok))
            if self.accept("punct", "."):
                m = self.ident()
                if not self.at("punct", "("):
                    raise ParseError("E-PARSE",
                                     f"field {m.value!r} of another object is private",
                                     m.span)
                args = self.args()
                return Call(Ident(tok.value, span=tok.span), m.value, args,
                            span=self.span_from(tok))
            return Ident(tok.value, span=tok.span)
        raise ParseError("E-PARSE", f"unexpected {tok.value or tok.kind!r}", tok.span)

    def this_path(self) -> Expr:
        tok = self.expect("kw", "this")
        this = This(span=tok.span)
        if not self.accept("punct", "."):
            return this
        name = self.ident()
        if self.at("punct", "("):
            args = self.args()
            return Call(this, name.value, args, span=self.span_from(tok))
        field = FieldAccess(this, name.value, span=self.span_from(tok))
        if self.accept("punct", "."):
            m = self.ident()
            args = self.args()
            return Call(field, m.value, args, span=self.span_from(tok))
        return field

    # -- program ----------------------------------------------------------------

    def program(self) -> list[ClassDecl]:
        classes = []
        while not self.at("eof"):
            try:
                classes.append(self.class_())
            except ParseError as err:
                self.diagnostics.append(err.diagnostic)
                self.recover()
        return classes

    def recover(self) -> None:
        self.next()
        while not self.at("eof") and not self.at("kw", "class"):
            self.next()


def fresh_var(used) -> str:
    if "X" not in used:
        return "X"
    i = 1
    while f"X{i}" in used:
        i += 1
    return f"X{i}"


# ---------------------------------------------------------------------------
# public entry points


def parse_usage(source: str | list[Token], where: dict[str, Usage] | None = None) -> Usage:
    """Parse a usage expression and desugar it to a core usage.

    ``where`` supplies named bindings, expanded as a class's ``where`` clause
    would be.
    """
    tokens = tokenize(source) if isinstance(source, str) else source
    p = _Parser(tokens)
    where = dict(where or {})
    names = frozenset(where) | p.where_prescan()
    u = p.usage(names)
    if p.accept("kw", "where"):
        while True:
            name = p.ident()
            p.expect("punct", "=")
            where[name.value] = p.usage(names | {name.value})
            if not p.accept("punct", ","):
                break
    p.accept("punct", ";")
    if not p.at("eof"):
        tok = p.peek()
        raise ParseError("E-PARSE", f"unexpected {tok.value!r} after usage", tok.span)
    return expand_where(u, where, p.peek().span)


def expand_where(u: Usage, bindings: dict[str, Usage], span: Span | None = None) -> Usage:
    """Substitute ``where`` names; self-referential names become ``mu`` binders."""

    def go(u: Usage, bound: frozenset, stack: tuple) -> Usage:
        match u:
            case Var(n):
                if n in bound or n in stack or n not in bindings:
                    return u
                body = go(bindings[n], frozenset(), stack + (n,))
                return Rec(n, body) if n in free_usage_vars(body) else body
            case Rec(n, body):
                return Rec(n, go(body, bound | {n}, stack))
            case Branch(q, entries):
                return Branch(q, tuple((m, go(c, bound, stack)) for m, c in entries))
            case Variant(t, f):
                return Variant(go(t, bound, stack), go(f, bound, stack))
        raise TypeError(u)

    out = go(u, frozenset(), ())
    free = free_usage_vars(out)
    if free:
        name = sorted(free)[0]
        raise UnboundName("E-UNBOUND-NAME", f"usage name {name!r} is not defined", span)
    return out


def default_usage(method_names) -> Usage:
    names = list(method_names)
    if not names:
        return END
    return Rec("X", Branch(UN, tuple((m, Var("X")) for m in names)))


def insert_default_usage(c: ClassDecl) -> ClassDecl:
    if c.usage is not None:
        return c
    return replace(c, usage=default_usage(m.name for m in c.methods))


def insert_this(c: ClassDecl) -> ClassDecl:
    """Rewrite bare field names in method bodies to ``this.f``."""
    fields = {f.name for f in c.fields}

    def as_field(e: Ident, scope) -> Expr:
        if e.name not in scope and e.name in fields:
            return FieldAccess(This(span=e.span), e.name, span=e.span)
        return e

    def go(e: Expr, scope: frozenset) -> Expr:
        match e:
            case Ident():
                return as_field(e, scope)
            case Call(Ident() as r, _, args):
                return replace(e, receiver=as_field(r, scope),
                               args=tuple(go(a, scope) for a in args))
            case Assign(Ident() as t, v):
                return replace(e, target=as_field(t, scope), value=go(v, scope))
            case Let(name, _, init, body):
                return replace(e, init=go(init, scope), body=go(body, scope | {name}))
        return rebuild(e, lambda c: go(c, scope))

    methods = tuple(
        replace(m, body=go(m.body, frozenset(p.name for p in m.params)))
        for m in c.methods
    )
    return replace(c, methods=methods)


def rebuild(e: Expr, f) -> Expr:
    """Apply ``f`` to the direct sub-expressions of ``e``."""
    match e:
        case FieldAccess(obj, _):
            return replace(e, obj=f(obj))
        case Seq(a, b):
            return replace(e, first=f(a), second=f(b))
        case Assign(t, v):
            return replace(e, target=f(t), value=f(v))
        case Call(r, _, args):
            return replace(e, receiver=f(r), args=tuple(f(a) for a in args))
        case If(c, t, o):
            return replace(e, cond=f(c), then=f(t), orelse=f(o))
        case While(c, b):
            return replace(e, cond=f(c), body=f(b))
        case Spawn(b):
            return replace(e, body=f(b))
        case Print(a):
            return replace(e, arg=f(a))
        case BinOp(_, a, b):
            return replace(e, left=f(a), right=f(b))
        case Let(_, _, i, b):
            return replace(e, init=f(i), body=f(b))
    if children(e):
        return replace(e, body=f(e.body))
    return e


# ---------------------------------------------------------------------------
# resolution


class _Resolver:
    def __init__(self, classes: list[ClassDecl]):
        self.classes = classes
        self.by_name: dict[str, ClassDecl] = {}
        self.where: dict[str, dict[str, Usage]] = {}
        self.diagnostics: list[Diagnostic] = []

    def error(self, code: str, message: str, span) -> None:
        self.diagnostics.append(Diagnostic("error", code, message, span))

    def run(self) -> Program:
        for c in self.classes:
            if c.name in self.by_name:
                self.error("E-DUPLICATE", f"class {c.name!r} declared twice", c.span)
                continue
            self.by_name[c.name] = c
            self.where[c.name] = dict(c.where)
        resolved = []
        for c in self.by_name.values():
            c = insert_default_usage(c)
            c = self.resolve_usage(c)
            self.by_name[c.name] = c
        for c in list(self.by_name.values()):
            resolved.append(self.resolve_class(c))
        return Program(tuple(resolved))

    def resolve_usage(self, c: ClassDecl) -> ClassDecl:
        try:
            u = expand_where(c.usage, self.where[c.name], c.span)
        except MoolError as err:
            self.diagnostics.append(err.diagnostic)
            u = END
        where = []
        for name, body in c.where:
            try:
                where.append((name, expand_where(Var(name), self.where[c.name], c.span)))
            except MoolError:
                pass
        if not is_contractive(u):
            self.error("E-NONCONTRACTIVE", f"usage of class {c.name!r} is not contractive",
                       c.span)
            u = END
        return replace(c, usage=u, where=tuple(where))

    def resolve_type(self, t: Type, span, infer: bool = False) -> Type:
        if not isinstance(t, ObjT):
            return t
        target = self.by_name.get(t.cls)
        if target is None:
            self.error("E-UNKNOWN-CLASS", f"class {t.cls!r} is not declared", span)
            return t
        if t.usage is None:
            return t if infer else ObjT(t.cls, target.usage)
        try:
            u = expand_where(t.usage, self.where[t.cls], span)
        except MoolError as err:
            self.diagnostics.append(err.diagnostic)
            return ObjT(t.cls, END)
        if not is_contractive(u):
            self.error("E-NONCONTRACTIVE", f"usage in type {t.cls}[...] is not contractive",
                       span)
            u = END
        for label in sorted(usage_labels(u)):
            if target.method(label) is None:
                self.error("E-UNDECLARED-METHOD",
                           f"method {label} not declared in class {t.cls}", span)
        return ObjT(t.cls, u)

    def resolve_class(self, c: ClassDecl) -> ClassDecl:
        seen = set()
        for f in c.fields:
            if f.name in seen:
                self.error("E-DUPLICATE", f"field {f.name!r} declared twice in {c.name}",
                           f.span)
            seen.add(f.name)
        seen = set()
        for m in c.methods:
            if m.name in seen:
                self.error("E-DUPLICATE", f"method {m.name!r} declared twice in {c.name}",
                           m.span)
            seen.add(m.name)
            pnames = [p.name for p in m.params]
            if len(set(pnames)) != len(pnames):
                self.error("E-DUPLICATE", f"duplicate parameter in method {m.name!r}", m.span)
        for label in sorted(usage_labels(c.usage)):
            if c.method(label) is None:
                self.error("E-UNDECLARED-METHOD", f"method {label} not declared", c.span)
        if not isinstance(c.usage, Branch) and not (
            isinstance(c.usage, Rec) and isinstance(_peel(c.usage), Branch)
        ):
            self.error("E-USAGE-NOT-BRANCH",
                       f"initial usage of class {c.name!r} must be a branch", c.span)
        fields = tuple(replace(f, type=self.resolve_type(f.type, f.span)) for f in c.fields)
        methods = tuple(self.resolve_method(m) for m in c.methods)
        c = replace(c, fields=fields, methods=methods)
        return insert_this(c)

    def resolve_method(self, m: MethodDecl) -> MethodDecl:
        params = tuple(replace(p, type=self.resolve_type(p.type, p.span)) for p in m.params)
        ret = self.resolve_type(m.return_type, m.span)

        def go(e: Expr) -> Expr:
            match e:
                case Let(_, t, init, body):
                    return replace(e, type=self.resolve_type(t, e.span, infer=True),
                                   init=go(init), body=go(body))
                case New(cls):
                    if cls not in self.by_name:
                        self.error("E-UNKNOWN-CLASS", f"class {cls!r} is not declared", e.span)
                    return e
            return rebuild(e, go)

        return replace(m, params=params, return_type=ret, body=go(m.body))


def _peel(u: Usage) -> Usage:
    while isinstance(u, Rec):
        u = u.body
    return u


def usage_labels(u: Usage) -> set[str]:
    match u:
        case Branch(_, entries):
            out = set()
            for m, c in entries:
                out.add(m)
                out |= usage_labels(c)
            return out
        case Variant(t, f):
            return usage_labels(t) | usage_labels(f)
        case Rec(_, body):
            return usage_labels(body)
    return set()


def parse_program(source: str, file: str = "<input>") -> tuple[Program | None, list[Diagnostic]]:
    """Parse and resolve a whole program.

    Returns the program (``None`` when nothing could be parsed) together with
    every diagnostic collected on the way.
    """
    try:
        tokens = tokenize(source, file)
    except MoolError as err:
        return None, [err.diagnostic]
    p = _Parser(tokens)
    classes = p.program()
    resolver = _Resolver(classes)
    program = resolver.run()
    return program, p.diagnostics + resolver.diagnostics


def parse_expr(source: str) -> Expr:
    """Parse a statement sequence (a method body without braces)."""
    p = _Parser(tokenize(source))
    e = p.stmts()
    if not p.at("eof"):
        tok = p.peek()
        raise ParseError("E-PARSE", f"unexpected {tok.value!r}", tok.span)
    return e


def parse_type(source: str) -> Type:
    p = _Parser(tokenize(source))
    return p.type_()
