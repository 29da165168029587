import random
from dataclasses import replace

import pytest

from conftest import parse_ok
from mool import corpus
from mool.cli import load
from mool.ast import BOOL, END, LIN, Branch, ObjT
from mool.parser import parse_expr, parse_usage
from mool.typecheck import ANY, Checker, Pair, _Ctx, _Theta, check_class, check_program
from oracles import random_usage


def codes(src, **kw):
    return [d.code for d in check_program(parse_ok(src), **kw) if d.severity == "error"]


FILE = """
class File {
  usage lin open; lin close; end;
  unit open() { unit; }
  unit close() { unit; }
}
"""
MAIN = "class Main { unit main() { unit; } }"


def test_auction_corpus_accepted(auction):
    assert check_program(auction) == []


@pytest.mark.parametrize("name", corpus.PROGRAMS)
def test_bundled_programs_accepted(name):
    assert check_program(parse_ok(corpus.read(name))) == []


def test_minimal_main_accepted():
    assert check_program(parse_ok(MAIN)) == []


@pytest.mark.parametrize("name,code,src", corpus.mutants(), ids=[m[0] for m in corpus.mutants()])
def test_mutants_rejected_with_expected_code(name, code, src):
    _, diags = load(src, name)
    assert code in [d.code for d in diags if d.severity == "error"]


def test_getprice_before_sold_points_at_the_call():
    src = corpus.read("bad_getprice_first.mool")
    diags = check_program(parse_ok(src, "bad.mool"))
    [d] = [d for d in diags if d.code == "E-T-CALL-UNAVAILABLE"]
    assert "getPrice" in src.splitlines()[d.span.line - 1]


def test_selling_class_accepted(auction):
    assert check_class(auction, "Selling") == []


def test_end_with_linear_field_rejected():
    src = FILE + """
class Holder {
  usage lin fill; end;
  File[lin close; end] f;
  unit fill() { File g = new File(); g.open(); f = g; }
}""" + MAIN
    assert codes(src) == ["E-LIN-FIELD-AT-END"]


def test_class_without_fields_and_empty_usage():
    assert codes("class C { usage end; }" + MAIN) == []


def test_auctioneer_field_is_shared_after_init(auction):
    c = auction.cls("Auctioneer")
    checker = Checker(auction)
    after = checker.check_method(c, c.method("init"), checker_fields(c), want_pair=False)
    assert after["this.map"] == ObjT("AuctionMap", parse_usage("*{put + get}"))
    assert checker.check_usage(_Theta(), checker_fields(c), c, c.usage) is ANY


def checker_fields(c):
    from mool.typecheck import Unassigned
    return {f"this.{f.name}": Unassigned(f.type) if isinstance(f.type, ObjT) else f.type
            for f in c.fields}


def test_sold_produces_an_environment_pair(auction):
    c = auction.cls("Selling")
    checker = Checker(auction)
    env = {"this.a": ObjT("Auction", parse_usage("*{bid + getInitialPrice + getFinalPrice + getBidder}")),
           "this.finalPrice": checker_fields(c)["this.finalPrice"]}
    out = checker.check_method(c, c.method("sold"), env, want_pair=True)
    assert isinstance(out, Pair)


def test_empty_branch_keeps_environment(auction):
    c = auction.cls("Main")
    env = {"this.x": BOOL}
    assert Checker(auction).check_usage(_Theta(), env, c, END) == env


def test_condition_splits_receiver_type(auction):
    checker = Checker(auction)
    sold = parse_usage("lin sold; «getPrice; end + end»")
    ctx = _Ctx(auction.cls("Seller"), auction.cls("Seller").method("run"), {"s"})
    left, right = checker.condition({"s": ObjT("Selling", sold)}, parse_expr("s.sold()"), ctx)
    assert left["s"] == ObjT("Selling", Branch(LIN, (("getPrice", END),)))
    assert right["s"] == ObjT("Selling", END)


def test_literal_true_is_boolean(auction):
    ctx = _Ctx(auction.cls("Main"), auction.cls("Main").method("main"))
    assert Checker(auction).expr({}, parse_expr("true"), ctx) == (BOOL, {})


def test_spawning_a_linear_value():
    src = FILE + "class Main { unit main() { File x = new File(); spawn x; } }"
    assert codes(src) == ["E-SPAWN-LINEAR"]


def test_spawn_moves_linear_captures():
    src = FILE + "class Main { unit main() { File x = new File(); spawn { x.open(); x.close(); }; x.open(); } }"
    assert codes(src) == ["E-LINEAR-REUSE"]


def test_reading_a_field_before_assignment():
    src = FILE + """
class Holder {
  usage lin use; end;
  File[lin open; lin close; end] f;
  unit use() { f.open(); f.close(); }
}""" + MAIN
    assert codes(src) == ["E-UNINIT-READ"]


def test_assignment_to_a_local_rejected():
    assert codes("class Main { unit main() { int x = 1; x = 2; } }") == ["E-ASSIGN-NON-FIELD"]


def test_shared_state_cannot_become_linear():
    src = "class C { usage un a; lin b; end; unit a() { unit; } unit b() { unit; } }" + MAIN
    assert codes(src) == ["E-UN-TO-LIN"]


def test_while_with_variant_condition():
    src = """
class Iter {
  usage lin init; Loop where Loop = lin hasNext; «lin next; Loop + end»;
  int n;
  unit init() { n = 3; }
  boolean hasNext() { n > 0; }
  int next() { n = n - 1; n; }
}
class Main {
  unit main() {
    Iter it = new Iter();
    it.init();
    while (it.hasNext()) { print(it.next()); }
  }
}"""
    assert codes(src) == []


def test_loop_that_changes_the_receiver_state():
    src = FILE + "class Main { unit main() { File f = new File(); while (1 < 2) { f.open(); } } }"
    assert "E-LOOP-ENV-MISMATCH" in codes(src) or "E-T-CALL-UNAVAILABLE" in codes(src)


def test_return_type_mismatch():
    assert codes("class Main { unit main() { 1; } }") == ["E-TYPE-MISMATCH"]


def test_strict_core():
    assert "E-STRICT-CORE" in codes(corpus.read("auction.mool"), strict_core=True)
    core = """
class C { usage lin m; end; unit m(boolean x) { unit; } }
class Main { unit main() { unit; } }"""
    assert codes(core, strict_core=True) == []


def test_method_order_does_not_matter(auction):
    rng = random.Random(3)
    classes = []
    for c in auction.classes:
        methods = list(c.methods)
        rng.shuffle(methods)
        classes.append(replace(c, methods=tuple(methods)))
    assert check_program(replace(auction, classes=tuple(classes))) == []


def test_deterministic_diagnostics():
    src = corpus.read("mutants/sold_twice.mool")
    assert check_program(parse_ok(src)) == check_program(parse_ok(src))


def test_usage_checking_terminates_on_random_usages():
    methods = " ".join(f"boolean {m}() {{ 1 < 2; }}" for m in "abc")
    program = parse_ok(f"class C {{ usage end; {methods} }}" + MAIN)
    c = program.cls("C")
    rng = random.Random(11)
    for _ in range(300):
        u = random_usage(rng, 8)
        checker = Checker(program)
        try:
            checker.check_usage(_Theta(), {}, c, u)
        except Exception as err:  # only checker diagnostics are acceptable
            assert hasattr(err, "diagnostic"), err


def test_consumption_monotonicity(auction):
    ctx = _Ctx(auction.cls("Seller"), auction.cls("Seller").method("run"), {"s"})
    sold = ObjT("Selling", parse_usage("lin sold; «getPrice; end + end»"))
    env = {"s": sold, "n": BOOL}
    _, out = Checker(auction).expr(env, parse_expr("Selling t = s; if (t.sold()) t.getPrice(); else 0; unit"), ctx)
    assert set(out) <= set(env)
    assert "s" not in out
