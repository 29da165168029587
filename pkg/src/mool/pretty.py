"""Source rendering. ``parse(pretty_print(p)) == p`` for every parsed program."""

from __future__ import annotations

from mool.ast import (
    UN, Assign, BinOp, BoolT, BoolV, Branch, Call, ClassDecl, Frame, FieldAccess,
    Ident, If, InSync, IntT, IntV, Let, MethodDecl, New, ObjRef, ObjT, Pending,
    Print, Program, Rec, Seq, Spawn, StrT, StrV, This, Uninit, UnitT, UnitV, Var,
    Variant, While,
)

INDENT = "  "
_PREC = {"==": 1, "!=": 1, "<": 2, ">": 2, "<=": 2, ">=": 2, "+": 3, "-": 3, "*": 4}


def pretty_print(node) -> str:
    match node:
        case Program():
            return "\n\n".join(_class(c) for c in node.classes) + "\n"
        case ClassDecl():
            return _class(node) + "\n"
        case MethodDecl():
            return "\n".join(_method(node, ""))
        case Branch() | Variant() | Var() | Rec():
            return usage_str(node)
        case UnitT() | BoolT() | IntT() | StrT() | ObjT():
            return type_str(node)
    return "\n".join(_stmts(node, ""))


# -- usages -------------------------------------------------------------------


def usage_str(u) -> str:
    match u:
        case Branch(q, ()):
            return "end" if q == UN else f"{q}{{}}"
        case Branch(q, ((m, c),)):
            return f"{q} {m}; {usage_str(c)}"
        case Branch(q, entries):
            inner = " + ".join(f"{m}; {usage_str(c)}" for m, c in entries)
            return f"{q}{{{inner}}}"
        case Variant(t, f):
            return f"«{usage_str(t)} + {usage_str(f)}»"
        case Var(name):
            return name
        case Rec(name, Branch(q, entries)) if (
            name == "X" and q == UN and entries
            and all(c == Var(name) for _, c in entries)
        ):
            return "*{" + " + ".join(m for m, _ in entries) + "}"
        case Rec(name, body):
            return f"mu {name}. {usage_str(body)}"
    raise TypeError(f"not a usage: {u!r}")


def type_str(t) -> str:
    match t:
        case UnitT():
            return "unit"
        case BoolT():
            return "boolean"
        case IntT():
            return "int"
        case StrT():
            return "string"
        case ObjT(cls, None):
            return cls
        case ObjT(cls, u):
            return f"{cls}[{usage_str(u)}]"
    raise TypeError(f"not a type: {t!r}")


# -- declarations ---------------------------------------------------------------


def _class(c: ClassDecl) -> str:
    lines = [f"class {c.name} {{", f"{INDENT}usage {usage_str(c.usage)};"]
    for f in c.fields:
        lines.append(f"{INDENT}{type_str(f.type)} {f.name};")
    for m in c.methods:
        lines.extend(_method(m, INDENT))
    lines.append("}")
    return "\n".join(lines)


def _method(m: MethodDecl, ind: str) -> list[str]:
    params = ", ".join(f"{type_str(p.type)} {p.name}" for p in m.params)
    sync = "sync " if m.sync else ""
    head = f"{ind}{sync}{type_str(m.return_type)} {m.name}({params}) {{"
    return [head, *_stmts(m.body, ind + INDENT), f"{ind}}}"]


# -- statements ---------------------------------------------------------------------


def _stmts(e, ind: str) -> list[str]:
    match e:
        case Seq(a, b):
            return _stmt(a, ind) + _stmts(b, ind)
        case Let(name, t, init, body):
            return [f"{ind}{type_str(t)} {name} = {expr_str(init)};", *_stmts(body, ind)]
    return _stmt(e, ind)


def _stmt(e, ind: str) -> list[str]:
    match e:
        case Seq() | Let():
            return [f"{ind}{{", *_stmts(e, ind + INDENT), f"{ind}}}"]
        case If(c, t, f):
            lines = [f"{ind}if ({expr_str(c)}) {{", *_stmts(t, ind + INDENT)]
            if isinstance(f, UnitV):
                return lines + [f"{ind}}}"]
            return lines + [f"{ind}}} else {{", *_stmts(f, ind + INDENT), f"{ind}}}"]
        case While(c, b):
            return [f"{ind}while ({expr_str(c)}) {{", *_stmts(b, ind + INDENT), f"{ind}}}"]
        case UnitV():
            return [f"{ind}unit;"]
    return [f"{ind}{expr_str(e)};"]


# -- expressions --------------------------------------------------------------------


def _quote(s: str) -> str:
    out = s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{out}"'


def expr_str(e, prec: int = 0) -> str:
    match e:
        case UnitV():
            return "unit"
        case BoolV(v):
            return "true" if v else "false"
        case IntV(v):
            return str(v) if v >= 0 or prec < 5 else f"({v})"
        case StrV(v):
            return _quote(v)
        case Ident(name):
            return name
        case This():
            return "this"
        case FieldAccess(obj, name):
            return f"{expr_str(obj, 5)}.{name}"
        case Call(r, m, args):
            inner = ", ".join(expr_str(a) for a in args)
            return f"{expr_str(r, 5)}.{m}({inner})"
        case New(cls):
            return f"new {cls}()"
        case Print(a):
            return f"print({expr_str(a)})"
        case BinOp(op, a, b):
            p = _PREC[op]
            right = p + 1
            left = p + 1 if p == 2 else p
            s = f"{expr_str(a, left)} {op} {expr_str(b, right)}"
            return f"({s})" if p < prec else s
        case Assign(t, v):
            s = f"{expr_str(t, 5)} = {expr_str(v)}"
            return f"({s})" if prec > 0 else s
        case Spawn(b):
            s = f"spawn {expr_str(b)}"
            return f"({s})" if prec > 0 else s
        case ObjRef(oid):
            return f"#o{oid}"
        case Uninit():
            return "⊥"
        case InSync(oid, b):
            return f"insync(#o{oid}) {{ {expr_str(b)} }}"
        case Frame(fid, b):
            return f"frame(#f{fid}) {{ {expr_str(b)} }}"
        case Pending(oid, b):
            return f"pending(#o{oid}) {{ {expr_str(b)} }}"
        case If() | While() | Seq() | Let():
            lines = [line.strip() for line in _stmt(e, "")]
            s = " ".join(lines)
            if isinstance(e, (Seq, Let)):
                return s
            return f"{{ {s} }}" if prec > 0 else s
    raise TypeError(f"cannot print {e!r}")
