"""Small-step interpreter with a heap, a thread pool and per-object locks.

Method activations are ``Frame(fid, body)`` nodes whose bindings (receiver,
parameters, locals) live in the machine's frame store rather than being
substituted into the body. This keeps every reference to an object in one
countable place, which the explorer relies on.
"""

from __future__ import annotations

import copy
import random
from dataclasses import dataclass, field, fields
from typing import Callable

from mool.ast import (
    END, LIN, Assign, BinOp, BoolT, BoolV, Branch, Call, Expr, FieldAccess, Frame,
    Ident, If, InSync, IntT, IntV, Let, New, ObjRef, ObjT, Pending, Print, Program,
    Seq, Spawn, StrT, StrV, This, Type, Uninit, UnitT, UnitV, Usage, Variant, While,
    children, free_idents, is_value,
)
from mool.pretty import expr_str, usage_str
from mool.usage import qualifier_of, unfold

DEFAULT_MAX_STEPS = 1_000_000


class RuntimeFault(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


class Stuck(RuntimeFault):
    def __init__(self, message: str):
        super().__init__("E-RT-STUCK", message)


def init_value(t: Type):
    match t:
        case UnitT():
            return UnitV()
        case BoolT():
            return BoolV(False)
        case IntT():
            return IntV(0)
        case StrT():
            return StrV("")
        case ObjT():
            return Uninit()
    raise TypeError(f"not a type: {t!r}")


@dataclass
class ObjectRecord:
    cls: str
    usage: Usage
    lock: int = 0
    fields: dict = field(default_factory=dict)

    @property
    def type(self) -> ObjT:
        return ObjT(self.cls, self.usage)

    def is_lin(self) -> bool:
        return qualifier_of(self.usage) == LIN

    def collectible(self) -> bool:
        """Protocol finished: no method can ever be called again."""
        return unfold(self.usage) == END


@dataclass
class FrameData:
    self_oid: int
    cls: str
    method: str
    locals: dict = field(default_factory=dict)


@dataclass
class Thread:
    tid: int
    expr: Expr
    # decomposition of ``expr``, reused while the thread is not stepped
    cache: tuple | None = field(default=None, compare=False, repr=False)

    def decomposed(self) -> tuple["Context", Expr]:
        if self.cache is None or self.cache[0] is not self.expr:
            self.cache = (self.expr, *decompose(self.expr))
        return self.cache[1], self.cache[2]

    @property
    def finished(self) -> bool:
        return is_value(self.expr)


@dataclass(frozen=True)
class TraceEvent:
    step: int
    tid: int
    rule: str
    detail: str

    def __str__(self) -> str:
        return f"#{self.step} T{self.tid} {self.rule} {self.detail}"


@dataclass
class MachineState:
    program: Program
    heap: dict = field(default_factory=dict)
    threads: list = field(default_factory=list)
    frames: dict = field(default_factory=dict)
    next_oid: int = 0
    next_fid: int = 0
    steps: int = 0
    trace: list = field(default_factory=list)
    output: list = field(default_factory=list)

    def clone(self) -> "MachineState":
        return MachineState(
            self.program,
            {o: ObjectRecord(r.cls, r.usage, r.lock, dict(r.fields))
             for o, r in self.heap.items()},
            [Thread(t.tid, t.expr, t.cache) for t in self.threads],
            {f: FrameData(d.self_oid, d.cls, d.method, dict(d.locals))
             for f, d in self.frames.items()},
            self.next_oid, self.next_fid, self.steps, list(self.trace), list(self.output),
        )

    def alloc(self, cls: str) -> int:
        c = self.program.cls(cls)
        if c is None:
            raise RuntimeFault("E-RT-UNKNOWN-CLASS", f"class {cls} is not declared")
        oid = self.next_oid
        self.next_oid += 1
        self.heap[oid] = ObjectRecord(cls, c.usage, 0, {f.name: init_value(f.type)
                                                       for f in c.fields})
        return oid

    def push_frame(self, oid: int, cls: str, method: str, bindings: dict) -> int:
        fid = self.next_fid
        self.next_fid += 1
        self.frames[fid] = FrameData(oid, cls, method, dict(bindings))
        return fid

    def thread(self, tid: int) -> Thread:
        for t in self.threads:
            if t.tid == tid:
                return t
        raise KeyError(tid)


def initial_state(p: Program) -> MachineState:
    """Thread 0 runs ``Main.main`` on a fresh ``Main`` instance."""
    main = p.cls("Main")
    if main is None or main.method("main") is None:
        raise RuntimeFault("E-NO-MAIN", "program has no class Main with a method main")
    s = MachineState(p)
    oid = s.alloc("Main")
    fid = s.push_frame(oid, "Main", "main", {})
    s.threads.append(Thread(0, Frame(fid, main.method("main").body)))
    return s


# ---------------------------------------------------------------------------
# evaluation contexts


@dataclass(frozen=True)
class Context:
    """A one-hole context, stored as the path of (node, slot) pairs from the
    root down to the hole. ``slot`` is a field name or ``("args", i)``."""

    path: tuple = ()

    def plug(self, e: Expr) -> Expr:
        for node, slot in reversed(self.path):
            e = _with_child(node, slot, e)
        return e

    def frame(self) -> int | None:
        for node, _ in reversed(self.path):
            if isinstance(node, Frame):
                return node.fid
        return None


def _with_child(node: Expr, slot, e: Expr) -> Expr:
    # shallow copy then patch one slot; much cheaper than dataclasses.replace
    out = copy.copy(node)
    if isinstance(slot, tuple):
        args = list(node.args)
        args[slot[1]] = e
        object.__setattr__(out, "args", tuple(args))
    else:
        object.__setattr__(out, slot, e)
    return out


def _resolved(e: Expr) -> bool:
    return isinstance(e, Pending) and is_value(e.body)


def decompose(e: Expr) -> tuple[Context, Expr]:
    """Split ``e`` into an evaluation context and the redex in its hole.
    Evaluation is left to right, innermost first."""
    path = []
    while True:
        if is_value(e):
            raise Stuck(f"no redex in value {expr_str(e)}")
        slot = _next_slot(e)
        if slot is None:
            return Context(tuple(path)), e
        path.append((e, slot))
        e = e.args[slot[1]] if isinstance(slot, tuple) else getattr(e, slot)


def _next_slot(e: Expr):
    match e:
        case Seq(a, _):
            return None if is_value(a) else "first"
        case Assign(_, v):
            return None if is_value(v) else "value"
        case Call(_, _, args):
            for i, a in enumerate(args):
                if not is_value(a):
                    return ("args", i)
            return None
        case If(c, _, _):
            return None if is_value(c) or _resolved(c) else "cond"
        case Print(a):
            return None if is_value(a) else "arg"
        case BinOp(_, a, b):
            if not is_value(a):
                return "left"
            return None if is_value(b) else "right"
        case Let(_, _, init, _):
            return None if is_value(init) else "init"
        case InSync(_, b) | Frame(_, b) | Pending(_, b):
            return None if is_value(b) else "body"
    return None


# ---------------------------------------------------------------------------
# reduction


def _show(v) -> str:
    match v:
        case UnitV():
            return "unit"
        case BoolV(b):
            return "true" if b else "false"
        case IntV(n):
            return str(n)
        case StrV(s):
            return s
        case ObjRef(o):
            return f"#o{o}"
        case Uninit():
            return "⊥"
    raise TypeError(v)


def _op(op: str, a, b):
    if op == "+" and (isinstance(a, StrV) or isinstance(b, StrV)):
        return StrV(_show(a) + _show(b))
    match op:
        case "+":
            return IntV(a.value + b.value)
        case "-":
            return IntV(a.value - b.value)
        case "*":
            return IntV(a.value * b.value)
        case "<":
            return BoolV(a.value < b.value)
        case ">":
            return BoolV(a.value > b.value)
        case "<=":
            return BoolV(a.value <= b.value)
        case ">=":
            return BoolV(a.value >= b.value)
        case "==":
            return BoolV(a == b)
        case "!=":
            return BoolV(a != b)
    raise Stuck(f"unknown operator {op}")


def _is_lin_value(s: MachineState, v) -> bool:
    return isinstance(v, ObjRef) and v.oid in s.heap and s.heap[v.oid].is_lin()


def _receiver(s: MachineState, fid: int, r: Expr):
    frame = s.frames[fid]
    match r:
        case Ident(x):
            if x not in frame.locals:
                raise Stuck(f"unbound identifier {x}")
            return frame.locals[x]
        case FieldAccess(This(), f):
            return s.heap[frame.self_oid].fields[f]
    raise Stuck(f"bad receiver {expr_str(r)}")


def blocked(s: MachineState, tid: int) -> bool:
    """True when the thread's next step is a sync call on a locked object."""
    t = s.thread(tid)
    if t.finished:
        return False
    ctx, redex = t.decomposed()
    if isinstance(redex, Call) and not redex.is_self_call:
        fid = ctx.frame()
        v = _receiver(s, fid, redex.receiver)
        if isinstance(v, ObjRef):
            rec = s.heap[v.oid]
            m = s.program.cls(rec.cls).method(redex.method)
            return m is not None and m.sync and rec.lock == 1
    return False


def enabled(s: MachineState) -> list[int]:
    return [t.tid for t in s.threads if not t.finished and not blocked(s, t.tid)]


def step_thread(s: MachineState, tid: int) -> TraceEvent:
    """Apply one reduction to thread ``tid`` in place and return its trace event."""
    t = s.thread(tid)
    ctx, redex = t.decomposed()
    fid = ctx.frame()
    rule, detail, result = _reduce(s, tid, fid, redex)
    t.expr = ctx.plug(result)
    s.steps += 1
    ev = TraceEvent(s.steps, tid, rule, detail)
    s.trace.append(ev)
    return ev


def _reduce(s: MachineState, tid: int, fid: int | None, e: Expr):
    frame = s.frames.get(fid) if fid is not None else None
    match e:
        case Seq(v, rest):
            return "R-Seq", expr_str(v), rest
        case Ident(x):
            if frame is None or x not in frame.locals:
                raise Stuck(f"unbound identifier {x}")
            v = frame.locals[x]
            if _is_lin_value(s, v):
                del frame.locals[x]
                return "R-LinVar", f"{x} -> {expr_str(v)}", v
            return "R-UnVar", f"{x} -> {expr_str(v)}", v
        case FieldAccess(This(), f):
            rec = s.heap[frame.self_oid]
            v = rec.fields[f]
            where = f"#o{frame.self_oid}.{f}"
            if isinstance(v, Uninit):
                raise RuntimeFault("E-RT-UNINIT", f"read of uninitialised field {where}")
            if _is_lin_value(s, v):
                rec.fields[f] = UnitV()
                return "R-LinField", f"{where} -> {expr_str(v)}", v
            return "R-UnField", f"{where} -> {expr_str(v)}", v
        case Assign(FieldAccess(This(), f), v):
            s.heap[frame.self_oid].fields[f] = v
            return "R-Assign", f"#o{frame.self_oid}.{f} := {expr_str(v)}", UnitV()
        case New(cls):
            oid = s.alloc(cls)
            return "R-New", f"{cls} -> #o{oid}", ObjRef(oid)
        case Call():
            return _call(s, fid, e)
        case If(c, then, orelse):
            if isinstance(c, Pending):
                b = c.body
                rec = s.heap[c.oid]
                head = unfold(rec.usage)
                if not isinstance(head, Variant):
                    raise Stuck(f"#o{c.oid} has no pending variant")
                rec.usage = head.on_true if b.value else head.on_false
                note = f" #o{c.oid} -> {usage_str(rec.usage)}"
            else:
                b, note = c, ""
            if not isinstance(b, BoolV):
                raise Stuck(f"condition {expr_str(b)} is not a boolean")
            if b.value:
                return "R-IfTrue", "true" + note, then
            return "R-IfFalse", "false" + note, orelse
        case While(c, body):
            return "R-While", "unroll", If(c, Seq(body, e), UnitV())
        case Spawn(body):
            bindings = {}
            for x in sorted(free_idents(body)):
                if x in frame.locals:
                    v = frame.locals[x]
                    bindings[x] = v
                    if _is_lin_value(s, v):
                        del frame.locals[x]
            nf = s.push_frame(frame.self_oid, frame.cls, frame.method, bindings)
            new_tid = max(t.tid for t in s.threads) + 1
            s.threads.append(Thread(new_tid, Frame(nf, body)))
            return "R-Spawn", f"T{new_tid}", UnitV()
        case InSync(oid, v):
            s.heap[oid].lock = 0
            return "R-InSync", f"release #o{oid}", v
        case Frame(f, v):
            d = s.frames.pop(f)
            return "R-Return", f"{d.cls}.{d.method} -> {expr_str(v)}", v
        case Pending(oid, v):
            rec = s.heap[oid]
            head = unfold(rec.usage)
            if isinstance(head, Variant) and isinstance(v, BoolV):
                rec.usage = head.on_true if v.value else head.on_false
            return "R-Variant", f"#o{oid} -> {usage_str(rec.usage)}", v
        case Print(v):
            text = _show(v)
            s.output.append(text)
            return "R-Print", repr(text), UnitV()
        case BinOp(op, a, b):
            r = _op(op, a, b)
            return "R-Op", f"{expr_str(a)} {op} {expr_str(b)} = {expr_str(r)}", r
        case Let(x, _, v, body):
            frame.locals[x] = v
            return "R-Let", f"{x} = {expr_str(v)}", body
    raise Stuck(f"no rule applies to {expr_str(e)}")


def _call(s: MachineState, fid: int, e: Call):
    frame = s.frames[fid]
    if e.is_self_call:
        oid = frame.self_oid
        rule = "R-SelfCall"
    else:
        v = _receiver(s, fid, e.receiver)
        if isinstance(v, Uninit):
            raise RuntimeFault("E-RT-UNINIT",
                               f"call {e.method} on uninitialised {expr_str(e.receiver)}")
        if not isinstance(v, ObjRef):
            raise Stuck(f"call {e.method} on non-object {expr_str(v)}")
        oid = v.oid
        rule = "R-Call"
    rec = s.heap[oid]
    c = s.program.cls(rec.cls)
    m = c.method(e.method)
    if m is None:
        raise Stuck(f"class {rec.cls} has no method {e.method}")
    if len(m.params) != len(e.args):
        raise Stuck(f"arity mismatch calling {rec.cls}.{m.name}")
    variant = False
    if rule == "R-Call":
        head = unfold(rec.usage)
        cont = head.get(e.method) if isinstance(head, Branch) else None
        if cont is None:
            raise RuntimeFault("E-RT-UNAVAILABLE",
                               f"method {e.method} not available on #o{oid}: "
                               f"{rec.cls}[{usage_str(rec.usage)}]")
        if m.sync:
            if rec.lock:
                raise Stuck(f"#o{oid} is locked")
            rec.lock = 1
            rule = "R-SCall"
        rec.usage = cont
        variant = isinstance(unfold(cont), Variant)
    nf = s.push_frame(oid, rec.cls, m.name, {p.name: a for p, a in zip(m.params, e.args)})
    body: Expr = Frame(nf, m.body)
    if rule == "R-SCall":
        body = InSync(oid, body)
    if variant:
        body = Pending(oid, body)
    args = ", ".join(expr_str(a) for a in e.args)
    return rule, f"#o{oid}.{m.name}({args}) {rec.cls}[{usage_str(rec.usage)}]", body


# ---------------------------------------------------------------------------
# scheduling


@dataclass
class RunResult:
    state: MachineState
    status: str  # ok | fault | deadlock | step-limit
    code: str | None = None
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    @property
    def output(self) -> list[str]:
        return self.state.output

    def trace_text(self) -> str:
        return "".join(f"{ev}\n" for ev in self.state.trace)


def run(p: Program, seed: int = 0, max_steps: int = DEFAULT_MAX_STEPS,
        on_event: Callable[[TraceEvent], None] | None = None,
        on_print: Callable[[str], None] | None = None) -> RunResult:
    """Run ``p`` to completion under a scheduler seeded with ``seed``."""
    rng = random.Random(seed)
    try:
        s = initial_state(p)
    except RuntimeFault as err:
        return RunResult(MachineState(p), "fault", err.code, err.message)
    while True:
        live = [t for t in s.threads if not t.finished]
        if not live:
            return RunResult(s, "ok")
        if s.steps >= max_steps:
            return RunResult(s, "step-limit", "E-RT-STEP-LIMIT",
                             f"stopped after {max_steps} steps")
        try:
            ready = enabled(s)
            if not ready:
                held = ", ".join(f"T{t.tid}" for t in live)
                return RunResult(s, "deadlock", "E-RT-DEADLOCK",
                                 f"every live thread is blocked on a lock ({held})")
            tid = rng.choice(ready)
            printed = len(s.output)
            ev = step_thread(s, tid)
        except RuntimeFault as err:
            return RunResult(s, "fault", err.code, err.message)
        if on_event is not None:
            on_event(ev)
        if on_print is not None and len(s.output) > printed:
            on_print(s.output[-1])


def referenced_oids(e: Expr):
    """Object references occurring as values in ``e``."""
    if isinstance(e, ObjRef):
        yield e.oid
        return
    for c in children(e):
        yield from referenced_oids(c)


def frame_ids(e: Expr):
    if isinstance(e, Frame):
        yield e.fid
    for c in children(e):
        yield from frame_ids(c)


def insync_oids(e: Expr):
    if isinstance(e, InSync):
        yield e.oid
    for c in children(e):
        yield from insync_oids(c)


def node_key(e: Expr, frames: dict):
    """Structural key of ``e`` with frame ids replaced by frame contents, so
    states that differ only in frame numbering compare equal."""
    if isinstance(e, Frame):
        d = frames[e.fid]
        return ("Frame", d.self_oid, d.method, tuple(sorted(d.locals.items(), key=lambda kv: kv[0])),
                node_key(e.body, frames))
    if not children(e):
        return e
    out = [type(e).__name__]
    for f in fields(e):
        if f.compare:
            v = getattr(e, f.name)
            if isinstance(v, tuple):
                out.append(tuple(node_key(x, frames) if not isinstance(x, str) else x for x in v))
            elif hasattr(v, "__dataclass_fields__") and not isinstance(v, (ObjT,)):
                out.append(node_key(v, frames))
            else:
                out.append(v)
    return tuple(out)


def state_key(s: MachineState):
    heap = tuple((o, r.cls, r.usage, r.lock, tuple(r.fields.items()))
                 for o, r in sorted(s.heap.items()))
    threads = tuple((t.tid, node_key(t.expr, s.frames)) for t in s.threads)
    return heap, threads, tuple(s.output)
