"""Exhaustive interleaving explorer.

Walks every scheduler choice depth first, merging states that are equal up
to frame numbering, and checks each reachable state for lock, availability
and aliasing violations.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from mool.ast import Assign, FieldAccess, IntV, BoolV, StrV, UnitV, ObjRef, Program, This, children
from mool.runtime import (
    MachineState, RuntimeFault, enabled, frame_ids, initial_state, insync_oids,
    referenced_oids, state_key, step_thread,
)

DEFAULT_MAX_STATES = 200_000


@dataclass
class Violation:
    kind: str
    message: str
    trace: list[str] = field(default_factory=list)

    def render(self) -> str:
        return f"{self.kind}: {self.message}"


@dataclass
class ExploreReport:
    states: int = 0
    terminals: int = 0
    violations: list[Violation] = field(default_factory=list)
    blowup: bool = False
    truncated: bool = False
    outputs: set = field(default_factory=set)
    final_fields: set = field(default_factory=set)

    @property
    def ok(self) -> bool:
        return not self.violations and not self.blowup

    def kinds(self) -> Counter:
        return Counter(v.kind for v in self.violations)


def critical_methods(p: Program) -> set[tuple[str, str]]:
    """Methods that read and write the same field of ``this``. Two threads
    inside such methods on one object at once is a read-modify-write race."""
    out = set()
    for c in p.classes:
        for m in c.methods:
            reads, writes = _field_uses(m.body)
            if reads & writes:
                out.add((c.name, m.name))
    return out


def _field_uses(e) -> tuple[set, set]:
    reads, writes = set(), set()

    def walk(e, target=False):
        if isinstance(e, FieldAccess) and isinstance(e.obj, This):
            (writes if target else reads).add(e.name)
            return
        if isinstance(e, Assign):
            walk(e.target, True)
            walk(e.value)
            return
        for c in children(e):
            walk(c)

    walk(e)
    return reads, writes


def check_state(s: MachineState, critical: set) -> list[tuple[str, str]]:
    found = []
    # lock safety: active insync frames per object match its lock flag
    holders: dict[int, int] = Counter()
    for t in s.threads:
        for oid in set(insync_oids(t.expr)):
            holders[oid] += 1
    for oid, rec in s.heap.items():
        n = holders.get(oid, 0)
        if n > 1:
            found.append(("lock-overlap", f"{n} threads inside synchronized code on #o{oid}"))
        elif n != rec.lock:
            found.append(("lock-mismatch", f"#o{oid} has lock {rec.lock} with {n} holders"))
    # linear uniqueness across thread expressions, heap fields and frames
    refs: Counter = Counter()
    for t in s.threads:
        refs.update(referenced_oids(t.expr))
    for rec in s.heap.values():
        refs.update(v.oid for v in rec.fields.values() if isinstance(v, ObjRef))
    for d in s.frames.values():
        refs.update(v.oid for v in d.locals.values() if isinstance(v, ObjRef))
    for oid, n in sorted(refs.items()):
        if n > 1 and s.heap[oid].is_lin():
            found.append(("linear-alias", f"linear #o{oid} ({s.heap[oid].cls}) has {n} references"))
    # read-modify-write sections running concurrently on one object
    if critical:
        inside: dict[int, set] = {}
        for t in s.threads:
            for fid in frame_ids(t.expr):
                d = s.frames[fid]
                if (d.cls, d.method) in critical:
                    inside.setdefault(d.self_oid, set()).add((t.tid, d.method))
        for oid, entries in sorted(inside.items()):
            tids = {tid for tid, _ in entries}
            if len(tids) > 1:
                names = ", ".join(f"T{tid}:{m}" for tid, m in sorted(entries))
                found.append(("critical-overlap",
                              f"threads overlap in read-modify-write on #o{oid} ({names})"))
    return found


def _plain(v):
    match v:
        case IntV(n) | BoolV(n) | StrV(n):
            return n
        case UnitV():
            return None
    return repr(v)


def explore(p: Program, max_states: int = DEFAULT_MAX_STATES, max_depth: int | None = None,
            critical: set | None = None) -> ExploreReport:
    if critical is None:
        critical = critical_methods(p)
    report = ExploreReport()
    s0 = initial_state(p)
    k0 = state_key(s0)
    parent = {k0: None}
    seen_kinds: set = set()
    stack = [(s0, k0, 0)]

    def path(key) -> list[str]:
        out = []
        while parent[key] is not None:
            key, ev = parent[key]
            out.append(ev)
        return out[::-1]

    def flag(kind, message, key, extra=None):
        # one witness per distinct problem keeps reports readable
        if (kind, message) in seen_kinds:
            return
        seen_kinds.add((kind, message))
        trace = path(key) + ([extra] if extra else [])
        report.violations.append(Violation(kind, message, trace))

    while stack:
        s, key, depth = stack.pop()
        report.states += 1
        for kind, msg in check_state(s, critical):
            flag(kind, msg, key)
        live = [t for t in s.threads if not t.finished]
        if not live:
            report.terminals += 1
            report.outputs.add(tuple(s.output))
            report.final_fields.add(tuple(
                (oid, r.cls, tuple((f, _plain(v)) for f, v in r.fields.items()))
                for oid, r in sorted(s.heap.items())))
            continue
        try:
            ready = enabled(s)
        except RuntimeFault as err:
            flag(err.code, err.message, key)
            continue
        if not ready:
            flag("E-RT-DEADLOCK", "every live thread is blocked on a lock", key)
            continue
        if max_depth is not None and depth >= max_depth:
            report.truncated = True
            continue
        for tid in reversed(ready):
            child = s.clone()
            child.trace = []
            try:
                ev = step_thread(child, tid)
            except RuntimeFault as err:
                flag(err.code, err.message, key, f"T{tid} {err.code}")
                continue
            ck = state_key(child)
            if ck in parent:
                continue
            parent[ck] = (key, f"T{ev.tid} {ev.rule} {ev.detail}")
            if len(parent) > max_states:
                report.blowup = True
                report.violations.append(Violation(
                    "E-EXPLORE-BLOWUP", f"more than {max_states} states"))
                return report
            stack.append((child, ck, depth + 1))
    return report
