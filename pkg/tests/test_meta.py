"""Meta-level translation: terms become f_sym/cons/nil trees first.

The payoff is signature independence: control constructs (seq, choice, mu,
one, all) compile to the same rules whatever the object signature, and only
rewrite-rule strategies mention the encoded constructors.
"""

import pytest

from strat2trs.engine import TRS
from strat2trs.evaluator import FAILURE, OUT_OF_FUEL, evaluate
from strat2trs.meta import (
    IllFormedMeta,
    meta_decode,
    meta_encode,
    meta_names,
    translate_meta,
)
from strat2trs.strategy import All, Choice, Fail, Id, Mu, One, Rule, SVar, Seq
from strat2trs.terms import App, Signature, SymbolDecl, Var, mk

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
PZ = Rule(mk("Plus", Z, Var("x")), Var("x"))
DIST = Rule(
    mk("Mult", Var("x"), mk("Plus", Var("y"), Var("z"))),
    mk("Plus", mk("Mult", Var("x"), Var("y")), mk("Mult", Var("x"), Var("z"))),
)
FACT = Rule(
    mk("Plus", mk("Mult", Var("x"), Var("y")), mk("Mult", Var("x"), Var("z"))),
    mk("Mult", Var("x"), mk("Plus", Var("y"), Var("z"))),
)
NAMES = meta_names(PEANO)


def repeat_s(s):
    return Mu("X", Choice(Seq(s, SVar("X")), Id()))


def obu(s):
    return Mu("X", Choice(One(SVar("X")), s))


def im(s):
    return Mu("X", Seq(All(SVar("X")), Choice(Seq(s, SVar("X")), Id())))


def peano_terms(depth):
    layers = [[Z]]
    for _ in range(depth - 1):
        prev = [t for layer in layers for t in layer]
        layers.append(
            [mk("Succ", t) for t in prev]
            + [mk("Plus", a, b) for a in prev for b in prev]
        )
    seen, out = set(), []
    for layer in layers:
        for t in layer:
            if t not in seen:
                seen.add(t)
                out.append(t)
    return out


def test_encode_shape():
    got = meta_encode(mk("Plus", Z, Z), NAMES)
    zl = App("appl", (App("Zero_sym", ()), App("nil", ())))
    assert got == App(
        "appl", (App("Plus_sym", ()), App("cons", (zl, App("cons", (zl, App("nil", ()))))))
    )


def test_decode_inverts_encode_on_enumerated_terms():
    for t in peano_terms(4):
        assert meta_decode(meta_encode(t, NAMES), PEANO, NAMES) == t


def test_decode_rejects_garbage():
    with pytest.raises(IllFormedMeta):
        meta_decode(App("cons", (Z, Z)), PEANO, NAMES)
    with pytest.raises(IllFormedMeta):
        meta_decode(App("appl", (App("Ghost_sym", ()), App("nil", ()))), PEANO, NAMES)
    with pytest.raises(IllFormedMeta):
        # arity mismatch: Succ applied to two arguments
        two = App("cons", (meta_encode(Z, NAMES), App("cons", (meta_encode(Z, NAMES), App("nil", ())))))
        meta_decode(App("appl", (App("Succ_sym", ()), two)), PEANO, NAMES)


def test_identity_meta_encoding_is_two_rules():
    enc = translate_meta(PEANO, Id())
    phi = enc.entry_symbol
    y1, y2, x = Var("y1"), Var("y2"), Var("x")
    appl = App("appl", (y1, y2))
    assert [(r.lhs, r.rhs) for r in enc.rules] == [
        (App(phi, (appl,)), appl),
        (App(phi, (App("bot", (x,)),)), App("bot", (x,))),
    ]


def test_rule_meta_encoding_counts_and_failure_shapes():
    enc = translate_meta(PEANO, PZ)
    assert len(enc.rules) == 6
    bots = [
        r
        for r in enc.rules
        if isinstance(r.rhs, App) and r.rhs.fn == "bot" and r.lhs.args[0].fn != "bot"
    ]
    assert len(bots) == 4  # one per complement shape of Plus(Zero,x)


def test_control_rules_do_not_depend_on_signature():
    for s in (Seq(Id(), Id()), Choice(Id(), Fail()), repeat_s(Fail())):
        assert translate_meta(PEANO, s).rules == translate_meta(ARITH, s).rules


def test_repeat_meta_golden():
    enc = translate_meta(PEANO, repeat_s(PZ))
    assert len(enc.rules) == 20
    subject = mk("Plus", Z, mk("Plus", Z, mk("Succ", Z)))
    trs = TRS(enc.rules)
    out = trs.normalize(
        App(enc.entry_symbol, (meta_encode(subject, NAMES),)), fuel=100_000
    )
    assert meta_decode(out.result, PEANO, NAMES) == mk("Succ", Z)


def test_all_meta_golden_count():
    assert len(translate_meta(PEANO, All(PZ)).rules) == 22  # 7 own + 6 rule + 9 list


def test_list_helper_rules_behave_like_lists():
    enc = translate_meta(PEANO, All(PZ))
    trs = TRS(enc.rules)
    nil = App("nil", ())

    def clist(items):
        out = nil
        for x in reversed(items):
            out = App("cons", (x, out))
        return out

    items = [meta_encode(t, NAMES) for t in (Z, mk("Succ", Z), mk("Plus", Z, Z))]
    rev = trs.normalize(App("reverse", (clist(items),)), fuel=10_000).result
    assert rev == clist(list(reversed(items)))
    app = trs.normalize(App("rappend", (clist(items[:2]), items[2])), fuel=10_000).result
    assert app == clist(items)
    rcat = trs.normalize(
        App("rconcat", (clist(items[:2]), clist(items[2:]))), fuel=10_000
    ).result
    assert rcat == clist(list(reversed(items[:2])) + items[2:])


def test_table_strategy_rule_counts_frozen():
    assert len(translate_meta(ARITH, repeat_s(DIST)).rules) == 24
    assert len(translate_meta(ARITH, repeat_s(FACT)).rules) == 59
    assert len(translate_meta(ARITH, obu(FACT)).rules) == 69
    assert len(translate_meta(ARITH, im(FACT)).rules) == 79
    assert len(translate_meta(ARITH, im(DIST)).rules) == 44
    assert len(translate_meta(ARITH, repeat_s(Seq(DIST, FACT))).rules) == 73


def test_meta_names_dodge_colliding_user_symbols():
    sig = Signature(
        [
            SymbolDecl("appl", (), "S"),
            SymbolDecl("cons", ("S",), "S"),
            SymbolDecl("nil", ("S", "S"), "S"),
        ]
    )
    names = meta_names(sig)
    assert names["appl"] not in ("appl", "cons", "nil")
    assert names["cons"] not in ("appl", "cons", "nil")
    t = mk("cons", mk("appl"))
    assert meta_decode(meta_encode(t, names), sig, names) == t


def test_meta_encoding_agrees_with_evaluator_on_enumerated_subjects():
    strategies = [
        Id(),
        Fail(),
        PZ,
        Seq(PZ, PZ),
        Choice(PZ, Id()),
        One(PZ),
        All(PZ),
        repeat_s(PZ),
        obu(PZ),
    ]
    subjects = peano_terms(3)
    for s in strategies:
        enc = translate_meta(PEANO, s)
        trs = TRS(enc.rules)
        for t in subjects:
            want = evaluate(s, t, fuel=10_000)
            mt = meta_encode(t, NAMES)
            got = trs.normalize(App(enc.entry_symbol, (mt,)), fuel=100_000).result
            if want is FAILURE:
                assert got == App(enc.bot, (mt,)), (s, t)
            else:
                assert want is not OUT_OF_FUEL
                assert meta_decode(got, PEANO, NAMES) == want, (s, t)
