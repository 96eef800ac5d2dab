"""Complement patterns: the finite families standing in for "everything else".

The core soundness check enumerates ground terms up to a depth bound and
verifies that a pattern and its complement family tile the space: every term
matches either the pattern or exactly one member of the family, never both,
never neither.
"""

from itertools import product

import pytest

from strat2trs.antiterm import (
    FreshVars,
    NotBot,
    NotTerm,
    PAlias,
    PWild,
    PlainRule,
    RuleSchema,
    canonicalize_pattern,
    dedupe_rules,
    expand_antiterm,
    expand_not_bot,
    expand_schema,
    fmt_rule,
    gen_equality_rules,
    linearize,
    nonlinear_schemas,
)
from strat2trs.engine import TRS
from strat2trs.terms import TOP_SORT, App, Signature, SymbolDecl, Var, match, mk

PEANO = Signature(
    [
        SymbolDecl("Zero", (), "Nat"),
        SymbolDecl("Succ", ("Nat",), "Nat"),
        SymbolDecl("Plus", ("Nat", "Nat"), "Nat"),
    ]
)

ARITH = Signature(
    [
        SymbolDecl("Plus", ("T", "T"), "T"),
        SymbolDecl("Mult", ("T", "T"), "T"),
        SymbolDecl("Val", ("V",), "T"),
        SymbolDecl("a", (), "V"),
        SymbolDecl("b", (), "V"),
    ]
)

Z = mk("Zero")


def ground_terms(sig, sort, depth):
    """Every ground term of the sort whose depth is at most `depth`."""
    memo = {}

    def upto(s, d):
        key = (s, d)
        if key in memo:
            return memo[key]
        out = []
        for dec in sig.of_sort(s):
            if dec.arity == 0:
                out.append(App(dec.name, ()))
            elif d > 1:
                pools = [upto(t, d - 1) for t in dec.domain]
                out.extend(App(dec.name, args) for args in product(*pools))
        memo[key] = out
        return out

    return upto(sort, depth)


def assert_tiles(pattern, sig, sort, depth):
    """The complement family covers exactly the non-instances, disjointly."""
    family = expand_antiterm(pattern, sig, sort)
    for t in ground_terms(sig, sort, depth):
        hits = sum(1 for c in family if match(c, t) is not None)
        if match(pattern, t) is not None:
            assert hits == 0, (pattern, t)
        else:
            assert hits == 1, (pattern, t, hits)


def test_complement_of_plus_zero_layout():
    got = expand_antiterm(mk("Plus", Z, Var("x")), PEANO.collapse(), TOP_SORT)
    assert got == [
        Z,
        mk("Succ", Var("x1")),
        mk("Plus", mk("Succ", Var("x1")), Var("x2")),
        mk("Plus", mk("Plus", Var("x1"), Var("x2")), Var("x3")),
    ]


def test_complement_tiles_peano_space():
    flat = PEANO.collapse()
    for pattern in (
        Z,
        mk("Succ", Var("x")),
        mk("Plus", Z, Var("x")),
        mk("Succ", mk("Succ", Var("x"))),
        mk("Plus", mk("Succ", Var("x")), mk("Plus", Var("y"), Var("z"))),
    ):
        assert_tiles(pattern, flat, TOP_SORT, 4)


def test_complement_tiles_sorted_space():
    # per-sort complements range over that sort's constructors only
    dist_lhs = mk("Mult", Var("x"), mk("Plus", Var("y"), Var("z")))
    assert_tiles(dist_lhs, ARITH, "T", 4)
    assert_tiles(mk("Val", Var("x")), ARITH, "T", 4)
    assert_tiles(mk("a"), ARITH, "V", 4)


def test_sorted_complement_is_smaller_than_unsorted():
    dist_lhs = mk("Mult", Var("x"), mk("Plus", Var("y"), Var("z")))
    sorted_family = expand_antiterm(dist_lhs, ARITH, "T")
    flat_family = expand_antiterm(dist_lhs, ARITH.collapse(), TOP_SORT)
    assert len(sorted_family) == 4
    assert len(flat_family) == 8
    assert set(map(str, sorted_family)) < set(map(str, flat_family))


def test_complement_of_bare_variable_is_empty():
    assert expand_antiterm(Var("x"), PEANO.collapse(), TOP_SORT) == []


def test_complement_rejects_nonlinear_pattern():
    with pytest.raises(AssertionError):
        expand_antiterm(mk("Plus", Var("x"), Var("x")), PEANO.collapse(), TOP_SORT)


def test_not_bot_expands_to_constructor_shapes():
    got = expand_not_bot(PEANO.collapse(), TOP_SORT)
    assert got == [Z, mk("Succ", Var("x1")), mk("Plus", Var("x1"), Var("x2"))]
    assert expand_not_bot(ARITH, "V") == [mk("a"), mk("b")]


def test_canonicalize_pattern_first_occurrence_naming():
    got = canonicalize_pattern(mk("Plus", Var("q"), mk("Succ", Var("p"))))
    assert got == mk("Plus", Var("x1"), mk("Succ", Var("x2")))


def test_fresh_vars_skip_taken_names():
    supply = FreshVars({"x1", "x3"})
    assert [supply.next().name for _ in range(3)] == ["x2", "x4", "x5"]


def test_linearize_renames_later_occurrences():
    t = mk("Plus", Var("x"), mk("Plus", Var("x"), Var("x")))
    lin, pairs = linearize(t)
    assert lin == mk("Plus", Var("x"), mk("Plus", Var("x_1"), Var("x_2")))
    assert pairs == [("x", "x_1"), ("x", "x_2")]


def test_expand_schema_wildcards_and_aliases():
    flat = PEANO.collapse()
    z = Var("z")
    schema = RuleSchema(
        App("f", (PAlias("z", NotBot()), PWild())), z, "f"
    )
    rules = expand_schema(schema, flat)
    assert [fmt_rule(r) for r in rules] == [
        "f(Zero,x1) -> Zero",
        "f(Succ(x1),x2) -> Succ(x1)",
        "f(Plus(x1,x2),x3) -> Plus(x1,x2)",
    ]


def test_expand_schema_cartesian_over_several_antipatterns():
    flat = PEANO.collapse()
    schema = RuleSchema(
        App("f", (PAlias("u", NotBot()), PAlias("v", NotBot()))), Var("u"), "f"
    )
    rules = expand_schema(schema, flat)
    assert len(rules) == 9  # 3 shapes x 3 shapes
    # leftmost anti-pattern varies slowest
    firsts = [r.lhs.args[0].fn for r in rules]
    assert firsts == ["Zero"] * 3 + ["Succ"] * 3 + ["Plus"] * 3


def test_expand_schema_without_antipatterns_is_identity():
    x = Var("x")
    schema = RuleSchema(App("f", (x,)), x, "f")
    rules = expand_schema(schema, PEANO.collapse())
    assert rules == [PlainRule(App("f", (x,)), x, "f")]


def test_expand_schema_deterministic():
    flat = PEANO.collapse()
    schema = RuleSchema(
        App("f", (PAlias("z", NotTerm(mk("Plus", Z, Var("x")))),)),
        App("bot", (Var("z"),)),
        "f",
    )
    a = expand_schema(schema, flat)
    b = expand_schema(schema, flat)
    assert a == b
    assert [fmt_rule(r) for r in a] == [fmt_rule(r) for r in b]


def test_dedupe_rules_keeps_first_occurrence():
    x = Var("x")
    r1 = PlainRule(App("f", (x,)), x, "first")
    r2 = PlainRule(App("f", (x,)), x, "second")  # same rule, other origin
    r3 = PlainRule(App("g", (x,)), x, "third")
    got = dedupe_rules([r1, r2, r3, r1])
    assert got == [r1, r3]
    assert got[0].provenance == "first"


def test_nonlinear_schema_shapes():
    lhs = mk("Plus", Var("x"), Var("x"))
    schs = nonlinear_schemas(
        "phi",
        "aux",
        lhs,
        Var("x"),
        bot="bot",
        eq="eq",
        conj="conj",
        true="btrue",
        false="bfalse",
        provenance="phi",
    )
    lin = mk("Plus", Var("x"), Var("x_1"))
    assert schs[0].lhs == App("phi", (lin,))
    assert schs[0].rhs == App("aux", (lin, App("eq", (Var("x"), Var("x_1")))))
    assert schs[1].lhs == App("aux", (lin, App("btrue", ())))
    assert schs[1].rhs == Var("x")
    assert schs[2].rhs == App("bot", (lin,))
    assert len(schs) == 4  # last one: anything not matching the linearized lhs


def test_equality_rules_decide_ground_equality():
    flat = PEANO.collapse()
    rules = gen_equality_rules(flat)
    assert len(rules) == 13  # 3 decompositions + 6 clashes + 4 shortcuts
    trs = TRS(rules)
    terms = ground_terms(flat, TOP_SORT, 3)
    for t in terms:
        for u in terms:
            out = trs.normalize(App("eq", (t, u)), fuel=10_000)
            want = "btrue" if t == u else "bfalse"
            assert out.result == App(want, ()), (t, u)


def test_equality_rules_sorted_mode_skips_cross_sort_clashes():
    unsorted_rules = gen_equality_rules(ARITH.collapse())
    sorted_rules = gen_equality_rules(ARITH, sorted_mode=True)
    clash = lambda rs: sum(1 for r in rs if r.rhs == App("bfalse", ()))
    # a() never meets Plus(..) when sorts are respected
    assert clash(sorted_rules) < clash(unsorted_rules)
