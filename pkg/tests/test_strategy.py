"""Strategy syntax: parsing, printing, and definition expansion."""

import pytest

from strat2trs.strategy import (
    All,
    Choice,
    ExpansionError,
    Fail,
    Id,
    Mu,
    One,
    ParseError,
    Rule,
    SVar,
    Seq,
    binders_unique,
    expand_defs,
    fmt_strategy,
    free_svars,
    freshen,
    parse_program,
    parse_strategy,
    parse_term,
    subnodes,
)
from strat2trs.terms import Signature, SymbolDecl, Var, mk

PEANO = Signature(
    [
        SymbolDecl("Zero", (), "Nat"),
        SymbolDecl("Succ", ("Nat",), "Nat"),
        SymbolDecl("Plus", ("Nat", "Nat"), "Nat"),
    ]
)

PROGRAM = """\
# toy arithmetic cleanup
abstract syntax

Nat = Zero() | Succ(Nat) | Plus(Nat, Nat)

strategies

pz() = [ Plus(Zero, x) -> x ]
try(s) = s <+ Identity
repeat(s) = mu X . ((s ; X) <+ Identity)
mainStrat() = repeat(pz())
"""


def test_parse_term_constants_without_parens():
    assert parse_term("Zero", PEANO) == mk("Zero")
    assert parse_term("Plus(Zero, Succ(Zero))", PEANO) == mk(
        "Plus", mk("Zero"), mk("Succ", mk("Zero"))
    )


def test_parse_term_undeclared_symbol_with_args_fails():
    with pytest.raises(ParseError):
        parse_term("Times(Zero, Zero)", PEANO)


def test_parse_strategy_precedence_seq_binds_tighter():
    s = parse_strategy("Identity ; Fail <+ Fail ; Identity", PEANO)
    assert s == Choice(Seq(Id(), Fail()), Seq(Fail(), Id()))


def test_parse_strategy_right_associative():
    assert parse_strategy("Identity <+ Fail <+ Identity", PEANO) == Choice(
        Id(), Choice(Fail(), Id())
    )
    assert parse_strategy("Identity ; Fail ; Identity", PEANO) == Seq(
        Id(), Seq(Fail(), Id())
    )


def test_parse_strategy_parens_override():
    s = parse_strategy("(Identity <+ Fail) ; Identity", PEANO)
    assert s == Seq(Choice(Id(), Fail()), Id())


def test_parse_rule_literal_undeclared_names_are_variables():
    s = parse_strategy("[ Plus(Zero, x) -> x ]", PEANO)
    assert s == Rule(mk("Plus", mk("Zero"), Var("x")), Var("x"))


def test_parse_rule_rejects_fresh_variable_on_rhs():
    with pytest.raises(ParseError):
        parse_strategy("[ Plus(Zero, x) -> y ]", PEANO)


def test_parse_mu_one_all():
    s = parse_strategy("mu X . one(all(X))", PEANO)
    assert s == Mu("X", One(All(SVar("X"))))


def test_parse_error_carries_position():
    err = None
    try:
        parse_strategy("Identity $$", PEANO)
    except ParseError as e:
        err = e
    assert err is not None
    assert err.line == 1 and err.col == 10
    with pytest.raises(ParseError):
        parse_strategy("Identity <+", PEANO)  # cut off at end of input


def test_fmt_parse_roundtrip():
    cases = [
        Id(),
        Fail(),
        Rule(mk("Plus", mk("Zero"), Var("x")), Var("x")),
        Seq(Id(), Choice(Fail(), Id())),
        Choice(Seq(Id(), Fail()), Id()),
        Mu("X", Choice(Seq(Rule(mk("Plus", mk("Zero"), Var("x")), Var("x")), SVar("X")), Id())),
        All(One(Mu("X", All(SVar("X"))))),
    ]
    for s in cases:
        assert parse_strategy(fmt_strategy(s), PEANO) == s, fmt_strategy(s)


def test_subnodes_preorder():
    s = Seq(Id(), Choice(Fail(), SVar("X")))
    kinds = [type(n).__name__ for n in subnodes(s)]
    assert kinds == ["Seq", "Id", "Choice", "Fail", "SVar"]


def test_free_svars():
    s = Mu("X", Seq(SVar("X"), SVar("Y")))
    assert free_svars(s) == {"Y"}


def test_freshen_makes_binders_unique():
    inner = Mu("X", SVar("X"))
    s = Seq(Mu("X", Seq(SVar("X"), inner)), inner)
    assert not binders_unique(s)
    fresh = freshen(s, set())
    assert binders_unique(fresh)
    assert fmt_strategy(fresh) != fmt_strategy(s)


def test_parse_program_signature_and_defs():
    prog = parse_program(PROGRAM)
    assert [d.name for d in prog.signature.decls] == ["Zero", "Succ", "Plus"]
    assert sorted(prog.defs) == ["mainStrat", "pz", "repeat", "try"]


def test_expand_defs_inlines_to_closed_strategy():
    prog = parse_program(PROGRAM)
    s = expand_defs(prog)
    assert free_svars(s) == set()
    pz = Rule(mk("Plus", mk("Zero"), Var("x")), Var("x"))
    assert s == Mu("X", Choice(Seq(pz, SVar("X")), Id()))


def test_expand_defs_other_entry():
    prog = parse_program(PROGRAM)
    s = expand_defs(prog, entry="pz")
    assert s == Rule(mk("Plus", mk("Zero"), Var("x")), Var("x"))


def test_expand_defs_cycle_detected():
    text = PROGRAM + "\nloop(s) = loop(s)\nbad() = loop(Identity)\n"
    prog = parse_program(text)
    with pytest.raises(ExpansionError):
        expand_defs(prog, entry="bad")


def test_expand_defs_unknown_name():
    prog = parse_program(PROGRAM)
    with pytest.raises(ExpansionError):
        expand_defs(prog, entry="nothere")


def test_call_arguments_are_strategy_expressions():
    text = PROGRAM + "\nboth() = try(pz() ; pz())\n"
    prog = parse_program(text)
    s = expand_defs(prog, entry="both")
    pz = Rule(mk("Plus", mk("Zero"), Var("x")), Var("x"))
    assert s == Choice(Seq(pz, pz), Id())


def test_comments_and_blank_lines_ignored():
    prog = parse_program("# heading\n\n" + PROGRAM + "# trailing\n")
    assert expand_defs(prog) is not None


def test_missing_sections_rejected():
    with pytest.raises(ParseError):
        parse_program("strategies\nmainStrat() = Identity\n")
    with pytest.raises(ParseError):
        parse_program("abstract syntax\nNat = Zero()\n")
