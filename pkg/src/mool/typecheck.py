"""Static type system: usage-driven class checking with linear environments.

Environments are plain dicts from keys to types. Field keys are written
``this.f``; parameters and locals use their bare name. A key missing from the
dict is unavailable, either never bound or consumed as a linear reference.
The final environment of a boolean method whose usage continues with a
variant is a :class:`Pair` (left for ``true``), and :data:`ANY` is the
unconstrained final environment of a usage that loops forever.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from mool.ast import (
    BOOL, INT, LIN, STR, UN, UNIT, Assign, BinOp, BoolT, BoolV, Branch, Call,
    ClassDecl, Expr, FieldAccess, Frame, Ident, If, InSync, IntT, IntV, Let,
    MethodDecl, New, ObjRef, ObjT, Pending, Print, Program, Rec, Seq, Spawn,
    StrT, StrV, This, Type, Uninit, UnitT, UnitV, Usage, Var, Variant, While,
    free_idents,
)
from mool.diagnostics import Diagnostic, MoolError, dedupe
from mool.parser import usage_labels
from mool.pretty import type_str, usage_str
from mool.usage import (
    COMPONENTWISE, canonical, qualifier_of, reachable_states, subtype, unfold,
)


@dataclass(frozen=True)
class Unassigned:
    """Type of an object field before its first assignment (value ⊥)."""

    declared: Type


@dataclass(frozen=True)
class Pair:
    left: "Env"
    right: "Env"


class _Any:
    def __repr__(self) -> str:
        return "ANY"


ANY = _Any()

Sigma = dict
Env = Union[Sigma, Pair, _Any]


class CheckError(MoolError):
    pass


def field_key(name: str) -> str:
    return f"this.{name}"


def is_lin(t) -> bool:
    if isinstance(t, ObjT) and t.usage is not None:
        return qualifier_of(t.usage) == LIN
    return False


def show(t) -> str:
    if isinstance(t, Unassigned):
        return f"unassigned {type_str(t.declared)}"
    return type_str(t)


@dataclass
class _Theta:
    envs: dict = field(default_factory=dict)
    vars: dict = field(default_factory=dict)

    def extend(self, rec: Rec, env: Env) -> "_Theta":
        key = canonical(rec)
        envs = dict(self.envs)
        envs[key] = env
        vars_ = dict(self.vars)
        vars_[rec.name] = (key, rec.body)
        return _Theta(envs, vars_)


@dataclass
class _Ctx:
    cls: ClassDecl
    method: MethodDecl | None
    bound: set = field(default_factory=set)


class Checker:
    def __init__(self, program: Program, variant_mode: str = COMPONENTWISE,
                 strict_core: bool = False):
        self.program = program
        self.mode = variant_mode
        self.strict_core = strict_core
        self.diagnostics: list[Diagnostic] = []

    # -- reporting ------------------------------------------------------------

    def fail(self, code: str, message: str, node=None):
        span = getattr(node, "span", None)
        raise CheckError(code, message, span)

    def record(self, err: MoolError) -> None:
        self.diagnostics.append(err.diagnostic)

    # -- relations on types and environments -----------------------------------

    def sub(self, t, t2) -> bool:
        return subtype(t, t2, self.mode)

    def type_leq(self, t, t2) -> bool:
        if isinstance(t2, Unassigned):
            return isinstance(t, Unassigned) or not is_lin(t)
        if isinstance(t, Unassigned):
            return False
        return self.sub(t, t2)

    def join_type(self, t, t2):
        if self.type_leq(t, t2):
            return t2
        if self.type_leq(t2, t):
            return t
        return None

    def env_leq(self, a: Sigma, b: Sigma) -> bool:
        for k, t in b.items():
            if k not in a or not self.type_leq(a[k], t):
                return False
        return all(not is_lin(t) for k, t in a.items() if k not in b)

    def env_equiv(self, a: Env, b: Env) -> bool:
        if a is ANY or b is ANY:
            return True
        if isinstance(a, Pair) or isinstance(b, Pair):
            a, b = _as_pair(a), _as_pair(b)
            return self.env_equiv(a.left, b.left) and self.env_equiv(a.right, b.right)
        return self.env_leq(a, b) and self.env_leq(b, a)

    def join_env(self, a: Env, b: Env, code: str, node) -> Env:
        if a is ANY:
            return b
        if b is ANY:
            return a
        if isinstance(a, Pair) or isinstance(b, Pair):
            a, b = _as_pair(a), _as_pair(b)
            return Pair(self.join_env(a.left, b.left, code, node),
                        self.join_env(a.right, b.right, code, node))
        out = {}
        for k in list(a) + [k for k in b if k not in a]:
            if k in a and k in b:
                t = self.join_type(a[k], b[k])
                if t is None:
                    self.fail(code, f"{_key_name(k)} ends as {show(a[k])} on one path and "
                              f"{show(b[k])} on the other", node)
                out[k] = t
            else:
                t = a[k] if k in a else b[k]
                if is_lin(t):
                    self.fail(code, f"linear {_key_name(k)} is consumed on only one path",
                              node)
        return out

    # -- programs and classes ---------------------------------------------------

    def check_program(self) -> list[Diagnostic]:
        main = self.program.cls("Main")
        if main is None or main.method("main") is None:
            self.diagnostics.append(Diagnostic(
                "warning", "W-NO-MAIN", "program has no class Main with a method main"))
        elif main.method("main").params:
            self.diagnostics.append(Diagnostic(
                "error", "E-NO-MAIN", "Main.main must take no parameters",
                main.method("main").span))
        for c in self.program.classes:
            self.check_class(c)
        if self.strict_core:
            self.check_strict_core()
        return dedupe(self.diagnostics)

    def check_class(self, c: ClassDecl) -> list[Diagnostic]:
        start = len(self.diagnostics)
        sigma0 = {}
        for f in c.fields:
            t = Unassigned(f.type) if isinstance(f.type, ObjT) else f.type
            sigma0[field_key(f.name)] = t
        try:
            self.check_monotone(c)
            final = self.check_usage(_Theta(), sigma0, c, c.usage)
            for side in _sides(final):
                for k, t in side.items():
                    if is_lin(t):
                        self.fail("E-LIN-FIELD-AT-END",
                                  f"class {c.name} ends its protocol with linear "
                                  f"{_key_name(k)}: {show(t)}", c)
        except CheckError as err:
            self.record(err)
        in_usage = usage_labels(c.usage)
        declared = {field_key(f.name): f.type for f in c.fields}
        for m in c.methods:
            if m.name in in_usage:
                continue
            try:
                out = self.check_method(c, m, declared, want_pair=False)
                if not self.env_equiv(out, declared):
                    self.fail("E-NONUSAGE-ALTERS",
                              f"method {m.name} is not in the usage of {c.name} "
                              "and must leave field types unchanged", m)
            except CheckError as err:
                self.record(err)
        return self.diagnostics[start:]

    def check_monotone(self, c: ClassDecl) -> None:
        """A shared state may only continue into shared states: once aliased,
        an object can never become linear again."""
        for head in reachable_states(c.usage):
            if isinstance(head, Branch) and head.qual == UN:
                for label, cont in head.entries:
                    if qualifier_of(cont) == LIN:
                        self.fail("E-UN-TO-LIN",
                                  f"shared state {usage_str(head)} of {c.name} continues "
                                  f"after {label} with linear {usage_str(cont)}", c)

    def check_usage(self, theta: _Theta, env: Env, c: ClassDecl, u: Usage) -> Env:
        if env is ANY:
            return ANY
        match u:
            case Branch(q, entries):
                if isinstance(env, Pair):
                    self.fail("E-VARIANT-ENV-MISMATCH",
                              f"branch {usage_str(u)} reached with an untested variant", c)
                if not entries:
                    return env
                if q == UN:
                    for k, t in env.items():
                        if is_lin(t):
                            self.fail("E-UN-BRANCH-LIN-FIELD",
                                      f"shared state of {c.name} holds linear "
                                      f"{_key_name(k)}: {show(t)}", c)
                results = []
                for label, cont in entries:
                    m = c.method(label)
                    if m is None:
                        self.fail("E-UNDECLARED-METHOD", f"method {label} not declared", c)
                    try:
                        want_pair = self.head_is_variant(cont, theta)
                        after = self.check_method(c, m, env, want_pair)
                        results.append((label, self.check_usage(theta, after, c, cont)))
                    except CheckError as err:
                        self.record(err)
                final: Env = ANY
                for label, res in results:
                    if res is ANY:
                        continue
                    if final is not ANY and not self.env_equiv(final, res):
                        self.fail("E-USAGE-ENV-MISMATCH",
                                  f"branches of {c.name}'s usage end in different "
                                  f"field environments (at {label})", c)
                    if final is ANY:
                        final = res
                return final
            case Variant(ut, uf):
                pair = _as_pair(env)
                left = self.check_usage(theta, pair.left, c, ut)
                right = self.check_usage(theta, pair.right, c, uf)
                if left is ANY:
                    return right
                if right is ANY:
                    return left
                if not self.env_equiv(left, right):
                    self.fail("E-VARIANT-ENV-MISMATCH",
                              f"variant {usage_str(u)} of {c.name} ends in different field "
                              "environments", c)
                return left
            case Rec():
                key = canonical(u)
                if key in theta.envs:
                    self.close_loop(theta.envs[key], env, c, u)
                    return ANY
                return self.check_usage(theta.extend(u, env), env, c, u.body)
            case Var(name):
                if name not in theta.vars:
                    self.fail("E-UNBOUND-NAME", f"usage variable {name} is not bound", c)
                key, _ = theta.vars[name]
                self.close_loop(theta.envs[key], env, c, u)
                return ANY
        raise TypeError(u)

    def close_loop(self, stored: Env, env: Env, c: ClassDecl, u: Usage) -> None:
        if not self.env_equiv(env, stored):
            self.fail("E-USAGE-ENV-MISMATCH",
                      f"recursive usage {usage_str(u)} of {c.name} is re-entered with "
                      "different field types", c)

    def head_is_variant(self, u: Usage, theta: _Theta) -> bool:
        seen = set()
        while True:
            match u:
                case Variant():
                    return True
                case Rec(_, body):
                    u = body
                case Var(name) if name in theta.vars and name not in seen:
                    seen.add(name)
                    u = theta.vars[name][1]
                case _:
                    return False

    def check_method(self, c: ClassDecl, m: MethodDecl, sigma: Sigma, want_pair: bool) -> Env:
        env = dict(sigma)
        ctx = _Ctx(c, m, {p.name for p in m.params})
        for p in m.params:
            env[p.name] = p.type
        if want_pair:
            t, out = self.tail(env, m.body, ctx)
        else:
            t, out = self.expr(env, m.body, ctx)
        if not self.sub(t, m.return_type):
            self.fail("E-TYPE-MISMATCH",
                      f"method {m.name} returns {show(t)}, declared {show(m.return_type)}", m)
        if want_pair:
            if m.return_type != BOOL:
                self.fail("E-VARIANT-NON-BOOLEAN",
                          f"method {m.name} is followed by a variant but does not return "
                          "boolean", m)
            out = _as_pair(out)
        for side in _sides(out):
            for p in m.params:
                if p.name in side:
                    if is_lin(side[p.name]):
                        self.fail("E-PARAM-NOT-CONSUMED",
                                  f"parameter {p.name} of {m.name} still has linear type "
                                  f"{show(side[p.name])}", p)
                    del side[p.name]
        return out

    # -- expressions ----------------------------------------------------------------

    def expr(self, env: Sigma, e: Expr, ctx: _Ctx) -> tuple[Type, Sigma]:
        match e:
            case UnitV():
                return UNIT, env
            case BoolV():
                return BOOL, env
            case IntV():
                return INT, env
            case StrV():
                return STR, env
            case ObjRef() | Uninit() | InSync() | Frame() | Pending():
                self.fail("E-RUNTIME-FORM", "runtime-only expression in source", e)
            case This():
                self.fail("E-THIS-VALUE", "this may only be used as a receiver or field base", e)
            case Ident(name):
                if name not in env:
                    if name in ctx.bound:
                        self.fail("E-LINEAR-REUSE",
                                  f"{name} has already been consumed", e)
                    self.fail("E-UNKNOWN-NAME", f"unknown name {name}", e)
                return self.read(env, name)
            case FieldAccess(This(), f):
                key = self.field(ctx, f, e)
                if key not in env:
                    self.fail("E-LINEAR-REUSE", f"field {f} has already been consumed", e)
                if isinstance(env[key], Unassigned):
                    self.fail("E-UNINIT-READ", f"field {f} is read before it is assigned", e)
                return self.read(env, key)
            case Seq(a, b):
                t, env = self.expr(env, a, ctx)
                self.discard(t, a)
                return self.expr(env, b, ctx)
            case Assign(target, value):
                return self.assign(env, target, value, ctx, e)
            case New(cls):
                c = self.program.cls(cls)
                if c is None:
                    self.fail("E-UNKNOWN-CLASS", f"class {cls} is not declared", e)
                return ObjT(cls, c.usage), env
            case Call():
                t, env, variant = self.call(env, e, ctx, allow_variant=False)
                return t, env
            case If(cond, then, orelse):
                left, right = self.condition(env, cond, ctx)
                t1, e1 = self.expr(left, then, ctx)
                t2, e2 = self.expr(right, orelse, ctx)
                return self.join_branches(t1, t2, e1, e2, e)
            case While(cond, body):
                return self.loop(env, cond, body, ctx, e)
            case Spawn(body):
                return self.spawn(env, body, ctx, e)
            case Print(arg):
                t, env = self.expr(env, arg, ctx)
                if is_lin(t) or isinstance(t, ObjT):
                    self.fail("E-TYPE-MISMATCH", f"cannot print a value of type {show(t)}", e)
                return UNIT, env
            case BinOp(op, a, b):
                ta, env = self.expr(env, a, ctx)
                tb, env = self.expr(env, b, ctx)
                return self.binop(op, ta, tb, e), env
            case Let(name, declared, init, body):
                env, ctx = self.bind(env, name, declared, init, ctx, e)
                t, env = self.expr(env, body, ctx)
                return t, self.unbind(env, name, e)
            case FieldAccess():
                self.fail("E-PARSE", "only fields of this can be accessed", e)
        raise TypeError(f"unexpected expression {e!r}")

    def tail(self, env: Sigma, e: Expr, ctx: _Ctx) -> tuple[Type, Env]:
        """Check a boolean tail position, injecting the environment on the side
        selected by the returned value."""
        match e:
            case BoolV(True):
                return BOOL, Pair(env, ANY)
            case BoolV(False):
                return BOOL, Pair(ANY, env)
            case Seq(a, b):
                t, env = self.expr(env, a, ctx)
                self.discard(t, a)
                return self.tail(env, b, ctx)
            case Let(name, declared, init, body):
                env, ctx = self.bind(env, name, declared, init, ctx, e)
                t, out = self.tail(env, body, ctx)
                pair = _as_pair(out)
                return t, Pair(self.unbind(pair.left, name, e), self.unbind(pair.right, name, e))
            case If(cond, then, orelse):
                left, right = self.condition(env, cond, ctx)
                t1, e1 = self.tail(left, then, ctx)
                t2, e2 = self.tail(right, orelse, ctx)
                return self.join_branches(t1, t2, e1, e2, e)
        t, out = self.expr(env, e, ctx)
        if t == BOOL:
            return t, Pair(out, out)
        return t, out

    # -- helpers for the individual rules --------------------------------------------

    def read(self, env: Sigma, key: str):
        t = env[key]
        if is_lin(t):
            env = dict(env)
            del env[key]
        return t, env

    def field(self, ctx: _Ctx, name: str, node) -> str:
        if ctx.cls.field_type(name) is None:
            self.fail("E-UNKNOWN-FIELD", f"class {ctx.cls.name} has no field {name}", node)
        return field_key(name)

    def discard(self, t, node) -> None:
        if is_lin(t):
            self.fail("E-LINEAR-DISCARD", f"a value of linear type {show(t)} is dropped", node)

    def unbind(self, env: Env, name: str, node) -> Env:
        if env is ANY or name not in env:
            return env
        if is_lin(env[name]):
            self.fail("E-LOCAL-NOT-CONSUMED",
                      f"local {name} goes out of scope with linear type {show(env[name])}",
                      node)
        env = dict(env)
        del env[name]
        return env

    def bind(self, env: Sigma, name, declared, init, ctx: _Ctx, node):
        if name in env or name in (p.name for p in ctx.method.params):
            self.fail("E-SHADOW", f"local {name} shadows another local or parameter", node)
        t, env = self.expr(env, init, ctx)
        if isinstance(declared, ObjT) and declared.usage is None:
            if not (isinstance(t, ObjT) and t.cls == declared.cls):
                self.fail("E-TYPE-MISMATCH",
                          f"cannot initialise {declared.cls} {name} with {show(t)}", node)
            bound = t
        else:
            if not self.sub(t, declared):
                self.fail("E-TYPE-MISMATCH",
                          f"cannot initialise {show(declared)} {name} with {show(t)}", node)
            bound = declared
        env = dict(env)
        env[name] = bound
        ctx = _Ctx(ctx.cls, ctx.method, ctx.bound | {name})
        return env, ctx

    def assign(self, env: Sigma, target, value, ctx: _Ctx, node):
        if not isinstance(target, FieldAccess):
            self.fail("E-ASSIGN-NON-FIELD",
                      f"only fields can be assigned, not {getattr(target, 'name', target)}",
                      node)
        key = self.field(ctx, target.name, target)
        declared = ctx.cls.field_type(target.name)
        t, env = self.expr(env, value, ctx)
        prev = env.get(key)
        if prev is not None and is_lin(prev):
            self.fail("E-ASSIGN-OVER-LINEAR",
                      f"field {target.name} still holds a linear value of type {show(prev)}",
                      node)
        if not self.sub(t, declared):
            self.fail("E-TYPE-MISMATCH",
                      f"cannot assign {show(t)} to field {target.name} of type "
                      f"{show(declared)}", node)
        env = dict(env)
        env[key] = t
        return UNIT, env

    def call(self, env: Sigma, e: Call, ctx: _Ctx, allow_variant: bool):
        arg_types = []
        for a in e.args:
            t, env = self.expr(env, a, ctx)
            arg_types.append(t)
        if e.is_self_call:
            m = ctx.cls.method(e.method)
            if m is None:
                self.fail("E-UNKNOWN-METHOD", f"class {ctx.cls.name} has no method {e.method}", e)
            self.check_args(m, arg_types, e)
            return m.return_type, env, None
        match e.receiver:
            case Ident(name):
                key = name
                if key not in env:
                    code = "E-LINEAR-REUSE" if name in ctx.bound else "E-UNKNOWN-NAME"
                    self.fail(code, f"{name} is not available", e.receiver)
            case FieldAccess(This(), f):
                key = self.field(ctx, f, e.receiver)
                if key not in env:
                    self.fail("E-LINEAR-REUSE", f"field {f} has already been consumed", e.receiver)
            case _:
                self.fail("E-PARSE", "invalid call receiver", e)
        rt = env[key]
        if isinstance(rt, Unassigned):
            self.fail("E-UNINIT-READ", f"{_key_name(key)} is used before it is assigned", e)
        if not isinstance(rt, ObjT):
            self.fail("E-TYPE-MISMATCH", f"cannot call {e.method} on {show(rt)}", e)
        head = unfold(rt.usage)
        if isinstance(head, Variant):
            self.fail("E-T-CALL-UNAVAILABLE",
                      f"{e.method} called on {_key_name(key)} before testing the result that "
                      f"selects its state {usage_str(rt.usage)}", e)
        cont = head.get(e.method)
        if cont is None:
            self.fail("E-T-CALL-UNAVAILABLE",
                      f"method {e.method} is not available on {_key_name(key)}: "
                      f"{show(rt)}", e)
        target = self.program.cls(rt.cls)
        m = target.method(e.method)
        if m is None:
            self.fail("E-UNKNOWN-METHOD", f"class {rt.cls} has no method {e.method}", e)
        self.check_args(m, arg_types, e)
        env = dict(env)
        env[key] = ObjT(rt.cls, cont)
        variant = None
        vhead = unfold(cont)
        if isinstance(vhead, Variant):
            if m.return_type != BOOL:
                self.fail("E-VARIANT-NON-BOOLEAN",
                          f"variant after {rt.cls}.{m.name}, which does not return boolean", e)
            if not allow_variant:
                self.fail("E-VARIANT-OUTSIDE-CONDITION",
                          f"the result of {e.method} selects a variant and must be tested by "
                          "an if or while condition", e)
            variant = (key, rt.cls, vhead.on_true, vhead.on_false)
        return m.return_type, env, variant

    def check_args(self, m: MethodDecl, arg_types, node) -> None:
        if len(arg_types) != len(m.params):
            self.fail("E-ARITY", f"{m.name} expects {len(m.params)} arguments, "
                      f"got {len(arg_types)}", node)
        for p, t in zip(m.params, arg_types):
            if not self.sub(t, p.type):
                self.fail("E-TYPE-MISMATCH",
                          f"argument {p.name} of {m.name} expects {show(p.type)}, "
                          f"got {show(t)}", node)

    def condition(self, env: Sigma, cond: Expr, ctx: _Ctx):
        """Environments for the true and false continuations of a test."""
        if isinstance(cond, Call) and not cond.is_self_call:
            t, env, variant = self.call(env, cond, ctx, allow_variant=True)
            if variant is not None:
                key, cls, ut, uf = variant
                left, right = dict(env), dict(env)
                left[key] = ObjT(cls, ut)
                right[key] = ObjT(cls, uf)
                return left, right
        else:
            t, env = self.expr(env, cond, ctx)
        if t != BOOL:
            self.fail("E-TYPE-MISMATCH", f"condition has type {show(t)}, expected boolean", cond)
        return env, env

    def join_branches(self, t1, t2, e1, e2, node):
        t = self.join_type(t1, t2)
        if t is None:
            self.fail("E-BRANCH-TYPE-MISMATCH",
                      f"branches have types {show(t1)} and {show(t2)}", node)
        return t, self.join_env(e1, e2, "E-BRANCH-ENV-MISMATCH", node)

    def loop(self, env: Sigma, cond, body, ctx: _Ctx, node):
        left, right = self.condition(env, cond, ctx)
        t, after = self.expr(left, body, ctx)
        self.discard(t, body)
        if not self.env_leq(after, env):
            self.fail("E-LOOP-ENV-MISMATCH",
                      "loop body does not restore the types its condition expects", node)
        return UNIT, right

    def spawn(self, env: Sigma, body, ctx: _Ctx, node):
        before = env
        t, env = self.expr(env, body, ctx)
        if is_lin(t):
            self.fail("E-SPAWN-LINEAR", f"spawned expression has linear type {show(t)}", node)
        for key in _field_keys(body):
            if key in before and is_lin(before[key]):
                self.fail("E-SPAWN-LINEAR",
                          f"spawned thread would share linear {_key_name(key)}", node)
        env = dict(env)
        for name in free_idents(body):
            if name in before and is_lin(before[name]):
                env.pop(name, None)
        return UNIT, env

    def binop(self, op: str, ta, tb, node):
        if op == "+" and (ta == STR or tb == STR):
            for t in (ta, tb):
                if not isinstance(t, (StrT, IntT, BoolT, UnitT)):
                    self.fail("E-TYPE-MISMATCH", f"cannot concatenate {show(t)}", node)
            return STR
        if op in ("+", "-", "*"):
            if ta == INT and tb == INT:
                return INT
        elif op in ("<", ">", "<=", ">="):
            if ta == INT and tb == INT:
                return BOOL
        elif op in ("==", "!="):
            if ta == tb and not isinstance(ta, ObjT):
                return BOOL
        self.fail("E-TYPE-MISMATCH", f"operator {op} does not apply to {show(ta)} and "
                  f"{show(tb)}", node)

    # -- strict core ---------------------------------------------------------------

    def check_strict_core(self) -> None:
        def bad(msg, node):
            self.diagnostics.append(Diagnostic("error", "E-STRICT-CORE", msg,
                                               getattr(node, "span", None)))

        def check_type(t, node):
            if isinstance(t, (IntT, StrT)):
                bad(f"type {show(t)} is not part of the core language", node)

        def walk(e):
            match e:
                case IntV() | StrV() | BinOp() | Print():
                    bad("integers, strings, operators and print are not core", e)
                case Let():
                    bad("local declarations are not core", e)
                case Call(Ident(), _, _):
                    bad("calls on identifiers are not core", e)
            from mool.ast import children
            for c in children(e):
                walk(c)

        for c in self.program.classes:
            for f in c.fields:
                check_type(f.type, f)
            for m in c.methods:
                check_type(m.return_type, m)
                for p in m.params:
                    check_type(p.type, p)
                if len(m.params) != 1 and not (c.name == "Main" and m.name == "main"):
                    bad(f"method {m.name} must take exactly one parameter", m)
                walk(m.body)


def _as_pair(env: Env) -> Pair:
    if isinstance(env, Pair):
        return env
    return Pair(env, env)


def _sides(env: Env) -> list[Sigma]:
    if env is ANY:
        return []
    if isinstance(env, Pair):
        return _sides(env.left) + _sides(env.right)
    return [env]


def _key_name(key: str) -> str:
    return key if key.startswith("this.") else f"local {key}"


def _field_keys(e: Expr) -> set[str]:
    from mool.ast import children

    out = set()
    if isinstance(e, FieldAccess) and isinstance(e.obj, This):
        out.add(field_key(e.name))
    for c in children(e):
        out |= _field_keys(c)
    return out


def check_program(program: Program, variant_mode: str = COMPONENTWISE,
                  strict_core: bool = False) -> list[Diagnostic]:
    return Checker(program, variant_mode, strict_core).check_program()


def check_class(program: Program, name: str, variant_mode: str = COMPONENTWISE) -> list[Diagnostic]:
    c = program.cls(name)
    return dedupe(Checker(program, variant_mode).check_class(c))


def errors(diags: list[Diagnostic]) -> list[Diagnostic]:
    return [d for d in diags if d.severity == "error"]
