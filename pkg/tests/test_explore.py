from conftest import parse_ok
from mool import corpus
from mool.explore import critical_methods, explore
from mool.runtime import run


def final_counts(report):
    counts = set()
    for heap in report.final_fields:
        for _, cls, fields in heap:
            if cls == "Counter":
                counts.add(dict(fields)["n"])
    return counts


def test_single_thread_has_one_trace():
    p = parse_ok("class Main { unit main() { print(1 + 1); } }")
    r = explore(p)
    assert r.terminals == 1 and r.ok
    assert r.states == run(p).state.steps + 1


def test_synchronised_counter_is_safe():
    r = explore(parse_ok(corpus.read("sync_counter.mool")))
    assert r.ok and r.states <= 10_000
    assert final_counts(r) == {2}


def test_unsynchronised_counter_races():
    r = explore(parse_ok(corpus.read("racy_counter.mool")))
    assert "critical-overlap" in r.kinds()
    assert final_counts(r) == {1, 2}


def test_critical_methods_detected():
    assert critical_methods(parse_ok(corpus.read("racy_counter.mool"))) == {("Counter", "inc")}


def test_selling_fragment_keeps_linear_objects_unique():
    r = explore(parse_ok(corpus.read("selling_fragment.mool")))
    assert r.ok and not r.blowup
    assert r.outputs == {("made 110 euros!",), ("unsold",)}


def test_aliasing_is_detected_when_checking_is_skipped():
    # an un state that continues into a lin one is rejected statically; run anyway
    src = """
class Door { usage un share; lin open; end; unit share() { unit; } unit open() { unit; } }
class Main { unit main() { Door d = new Door(); spawn d.share(); unit; } }"""
    r = explore(parse_ok(src))
    assert "linear-alias" in r.kinds()


def test_deadlock_found():
    r = explore(parse_ok(corpus.read("deadlock.mool")))
    assert "E-RT-DEADLOCK" in r.kinds()


def test_unavailable_call_found():
    src = """
class File { usage lin open; end; unit open() { unit; } }
class Main { unit main() { File f = new File(); f.open(); f.open(); } }"""
    r = explore(parse_ok(src))
    assert "E-RT-UNAVAILABLE" in r.kinds()
    assert r.violations[0].trace[-1].endswith("E-RT-UNAVAILABLE")


def test_state_budget():
    r = explore(parse_ok(corpus.read("auction.mool")), max_states=500)
    assert r.blowup and "E-EXPLORE-BLOWUP" in r.kinds()


def test_depth_bound_truncates():
    r = explore(parse_ok(corpus.read("sync_counter.mool")), max_depth=5)
    assert r.truncated and r.terminals == 0
