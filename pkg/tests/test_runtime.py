import pytest

from conftest import parse_ok
from mool import corpus
from mool.ast import (
    Assign, BoolT, BoolV, Call, FieldAccess, Frame, Ident, If, InSync, IntT, IntV,
    ObjT, Seq, StrT, StrV, This, Uninit, UNIT, UnitV, END,
)
from mool.parser import parse_usage
from mool.runtime import (
    RuntimeFault, decompose, enabled, init_value, initial_state, run, step_thread,
)
from mool.usage import unfold

COUNTER = corpus.read("sync_counter.mool")


def test_decompose_sequence_head_value():
    e = Seq(UnitV(), Ident("x"))
    ctx, redex = decompose(e)
    assert ctx.path == () and redex == e


def test_decompose_assignment_argument():
    call = Call(Ident("o"), "m", (IntV(1),))
    ctx, redex = decompose(Assign(FieldAccess(This(), "f"), call))
    assert redex == call
    assert ctx.plug(UnitV()) == Assign(FieldAccess(This(), "f"), UnitV())


def test_decompose_if_condition():
    call = Call(FieldAccess(This(), "s"), "sold", ())
    _, redex = decompose(If(call, UnitV(), UnitV()))
    assert redex == call


def test_decompose_innermost_frame():
    e = Frame(1, Seq(InSync(3, Frame(2, Ident("x"))), UnitV()))
    ctx, redex = decompose(e)
    assert redex == Ident("x") and ctx.frame() == 2


def test_value_has_no_redex():
    with pytest.raises(RuntimeFault):
        decompose(BoolV(True))


def test_init_values():
    assert init_value(ObjT("C", END)) == Uninit()
    assert init_value(UNIT) == UnitV()
    assert init_value(BoolT()) == BoolV(False)
    assert init_value(IntT()) == IntV(0)
    assert init_value(StrT()) == StrV("")


def test_new_object_record():
    p = parse_ok("class C { usage end; boolean f; } class Main { unit main() { C c = new C(); unit; } }")
    s = initial_state(p)
    step_thread(s, 0)
    rec = s.heap[1]
    assert (rec.cls, rec.lock, rec.fields) == ("C", 0, {"f": BoolV(False)})


def test_linear_field_read_is_destructive():
    src = """
class File { usage lin open; end; unit open() { unit; } }
class Box {
  usage lin fill; lin take; end;
  File[lin open; end] f;
  unit fill() { f = new File(); }
  File[lin open; end] take() { f; }
}
class Main {
  unit main() {
    Box b = new Box();
    b.fill();
    File g = b.take();
    g.open();
  }
}"""
    p = parse_ok(src)
    s = initial_state(p)
    while s.trace == [] or s.trace[-1].rule != "R-LinField":
        step_thread(s, 0)
    assert s.trace[-1].detail.endswith("#o2")
    assert s.heap[1].fields["f"] == UnitV()


def test_main_unit_finishes_in_one_step():
    r = run(parse_ok("class Main { unit main() { unit; } }"), seed=0)
    assert r.ok and r.state.steps == 1


def test_sync_call_blocks_while_locked():
    p = parse_ok(COUNTER)
    s = initial_state(p)
    while len(s.threads) < 3:
        step_thread(s, 0)
    step_thread(s, 1)
    assert s.trace[-1].rule == "R-SCall" and s.heap[1].lock == 1
    assert 2 not in enabled(s)
    while not s.thread(1).finished:
        step_thread(s, 1)
    assert [ev.rule for ev in s.trace[-2:]] == ["R-InSync", "R-Return"]
    assert s.heap[1].lock == 0
    assert 2 in enabled(s)


def test_variant_resolved_when_condition_is_consumed(auction):
    s = initial_state(parse_ok(corpus.read("selling_fragment.mool")))
    while True:
        tid = enabled(s)[0]
        ev = step_thread(s, tid)
        if ev.rule == "R-Call" and ".sold()" in ev.detail:
            oid = int(ev.detail.split(".")[0][2:])
            break
    assert unfold(s.heap[oid].usage).__class__.__name__ == "Variant"
    while s.trace[-1].rule not in ("R-IfTrue", "R-IfFalse"):
        step_thread(s, tid)
    assert s.heap[oid].usage in (parse_usage("lin getPrice; end"), END)


def test_auction_runs_to_completion(auction):
    r = run(auction, seed=1)
    assert r.ok
    assert all(line == "made 110 euros!" for line in r.output)


def test_two_synchronised_calls_both_complete():
    r = run(parse_ok(COUNTER), seed=4)
    assert r.ok and r.state.heap[1].fields["n"] == IntV(2)
    holders = []
    for ev in r.state.trace:
        if ev.rule == "R-SCall":
            holders.append(ev.tid)
        elif ev.rule == "R-InSync":
            assert holders.pop() == ev.tid
        assert len(holders) <= 1


def test_same_seed_same_trace(auction):
    assert run(auction, seed=9).trace_text() == run(auction, seed=9).trace_text()


def test_deadlock_reported():
    p = parse_ok(corpus.read("deadlock.mool"))
    statuses = {run(p, seed).status for seed in range(40)}
    assert statuses == {"ok", "deadlock"}


def test_step_limit():
    r = run(parse_ok("class Main { unit main() { while (true) { unit; } } }"), max_steps=100)
    assert (r.status, r.code) == ("step-limit", "E-RT-STEP-LIMIT")


def test_unavailable_method_is_a_fault():
    src = """
class File { usage lin open; end; unit open() { unit; } }
class Main { unit main() { File f = new File(); f.open(); f.open(); } }"""
    r = run(parse_ok(src))
    assert r.code == "E-RT-UNAVAILABLE"


def test_call_through_uninitialised_field():
    src = """
class File { usage *{open}; unit open() { unit; } }
class Box { usage *{go}; File f; unit go() { f.open(); } }
class Main { unit main() { Box b = new Box(); b.go(); } }"""
    assert run(parse_ok(src)).code == "E-RT-UNINIT"


def test_print_and_string_concatenation():
    r = run(parse_ok('class Main { unit main() { print("n=" + (2 * 3 - 1) + " " + true); } }'))
    assert r.output == ["n=5 true"]


@pytest.mark.parametrize("name", corpus.PROGRAMS)
def test_no_availability_faults_across_seeds(name):
    p = parse_ok(corpus.read(name))
    for seed in range(100):
        r = run(p, seed)
        assert r.code not in ("E-RT-UNAVAILABLE", "E-RT-UNINIT"), (seed, r.message)
        assert r.ok


def test_object_ids_are_never_reused(auction):
    r = run(auction, seed=2)
    assert sorted(r.state.heap) == list(range(r.state.next_oid))
