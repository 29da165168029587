"""Usage-type algebra: substitution, equi-recursive unfolding, contractivity,
qualifiers and coinductive subtyping."""

from __future__ import annotations

from functools import lru_cache

from mool.ast import (
    LIN, UN, Branch, ObjT, Rec, Type, Usage, Var, Variant, free_usage_vars,
)

COMPONENTWISE = "componentwise"
VERBATIM = "verbatim"
CONVENTIONAL = "conventional"
VARIANT_MODES = (COMPONENTWISE, VERBATIM, CONVENTIONAL)


def substitute(u: Usage, name: str, repl: Usage) -> Usage:
    """``u[repl/name]``. ``repl`` is expected to be closed."""
    match u:
        case Var(n):
            return repl if n == name else u
        case Rec(n, body):
            if n == name:
                return u
            return Rec(n, substitute(body, name, repl))
        case Branch(q, entries):
            return Branch(q, tuple((m, substitute(c, name, repl)) for m, c in entries))
        case Variant(t, f):
            return Variant(substitute(t, name, repl), substitute(f, name, repl))
    raise TypeError(f"not a usage: {u!r}")


def is_contractive(u: Usage) -> bool:
    match u:
        case Rec():
            chain = set()
            node: Usage = u
            while isinstance(node, Rec):
                chain.add(node.name)
                node = node.body
            if isinstance(node, Var) and node.name in chain:
                return False
            return is_contractive(node)
        case Branch(_, entries):
            return all(is_contractive(c) for _, c in entries)
        case Variant(t, f):
            return is_contractive(t) and is_contractive(f)
    return True


@lru_cache(maxsize=65536)
def unfold(u: Usage) -> Usage:
    """Unroll top-level binders until the head is a branch or a variant.

    A free variable is returned unchanged. Non-contractive input is rejected
    rather than looping.
    """
    seen = 0
    while isinstance(u, Rec):
        u = substitute(u.body, u.name, u)
        seen += 1
        if seen > 10_000:
            raise ValueError("usage is not contractive")
    return u


def qualifier_of(u: Usage) -> str:
    head = unfold(u)
    if isinstance(head, Variant):
        return LIN
    if isinstance(head, Branch):
        return head.qual
    raise ValueError(f"open usage has no qualifier: {u!r}")


@lru_cache(maxsize=65536)
def canonical(u: Usage):
    """Hashable key of ``u`` up to alpha-renaming and branch entry order."""

    def go(u: Usage, env: tuple[str, ...]):
        match u:
            case Var(n):
                for depth in range(len(env) - 1, -1, -1):
                    if env[depth] == n:
                        return ("var", depth)
                return ("free", n)
            case Rec(n, body):
                return ("rec", go(body, env + (n,)))
            case Branch(q, entries):
                return ("branch", q, tuple(sorted((m, go(c, env)) for m, c in entries)))
            case Variant(t, f):
                return ("variant", go(t, env), go(f, env))
        raise TypeError(f"not a usage: {u!r}")

    return go(u, ())


def is_closed(u: Usage) -> bool:
    return not free_usage_vars(u)


def reachable_states(u: Usage) -> list[Usage]:
    """Unfolded heads reachable from a closed usage by calls and variant
    choices, each listed once."""
    out, seen, todo = [], set(), [u]
    while todo:
        head = unfold(todo.pop())
        key = canonical(head)
        if key in seen:
            continue
        seen.add(key)
        out.append(head)
        match head:
            case Branch(_, entries):
                todo.extend(c for _, c in reversed(entries))
            case Variant(t, f):
                todo.extend((f, t))
    return out


def subtype_usage(u: Usage, v: Usage, mode: str = COMPONENTWISE) -> bool:
    """Coinductive ``u <: v``.

    Pairs are assumed along the current derivation path only, so a failed
    disjunct never leaves assumptions behind.
    """
    if mode not in VARIANT_MODES:
        raise ValueError(f"unknown variant subtyping mode {mode!r}")
    return _sub(u, v, frozenset(), mode)


def _sub(u: Usage, v: Usage, assumed: frozenset, mode: str) -> bool:
    u, v = unfold(u), unfold(v)
    key = (canonical(u), canonical(v))
    if key in assumed:
        return True
    assumed = assumed | {key}
    match u, v:
        case Branch(q1, _), Branch(q2, entries2):
            if q1 != q2:
                return False
            for m, c2 in entries2:
                c1 = u.get(m)
                if c1 is None or not _sub(c1, c2, assumed, mode):
                    return False
            return True
        case Variant(t1, f1), Variant(t2, f2):
            return _sub(t1, t2, assumed, mode) and _sub(f1, f2, assumed, mode)
        case Branch(), Variant(t2, f2):
            if mode == VERBATIM:
                return _sub(t2, u, assumed, mode) or _sub(f2, u, assumed, mode)
            if mode == CONVENTIONAL:
                return _sub(u, t2, assumed, mode) or _sub(u, f2, assumed, mode)
            return False
    return False


def equivalent_usage(u: Usage, v: Usage, mode: str = COMPONENTWISE) -> bool:
    return subtype_usage(u, v, mode) and subtype_usage(v, u, mode)


def subtype(t: Type, t2: Type, mode: str = COMPONENTWISE) -> bool:
    if isinstance(t, ObjT) and isinstance(t2, ObjT):
        if t.cls != t2.cls:
            return False
        if t.usage is None or t2.usage is None:
            return t.usage is t2.usage
        return subtype_usage(t.usage, t2.usage, mode)
    return t == t2


def type_qualifier(t: Type) -> str:
    if isinstance(t, ObjT) and t.usage is not None:
        return qualifier_of(t.usage)
    return UN


def is_lin_type(t: Type) -> bool:
    return type_qualifier(t) == LIN
