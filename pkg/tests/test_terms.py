"""First-order term representation, matching, and signatures."""

import pytest
from hypothesis import given, strategies as st

from strat2trs.terms import (
    App,
    IllSortedError,
    Signature,
    SignatureError,
    SymbolDecl,
    TOP_SORT,
    Var,
    apply_subst,
    fmt_term,
    is_ground,
    is_linear,
    match,
    mk,
    positions,
    replace_at,
    subterm_at,
    term_depth,
    term_size,
    var_occurrences,
    vars_of,
)

PEANO = Signature(
    [
        SymbolDecl("Zero", (), "Nat"),
        SymbolDecl("Succ", ("Nat",), "Nat"),
        SymbolDecl("Plus", ("Nat", "Nat"), "Nat"),
    ]
)

ZERO = mk("Zero")
ONE = mk("Succ", ZERO)


def peano_terms(max_depth):
    """All ground Peano terms up to the given depth, smallest first."""
    layers = [[ZERO]]
    for _ in range(max_depth - 1):
        prev = [t for layer in layers for t in layer]
        nxt = [mk("Succ", t) for t in prev]
        nxt += [mk("Plus", a, b) for a in prev for b in prev]
        layers.append([t for t in nxt if t not in prev])
    return [t for layer in layers for t in layer]


def naive_match(pattern, subject, binding):
    """Reference matcher: recursive, no sharing tricks."""
    if isinstance(pattern, Var):
        if pattern.name in binding:
            return binding if binding[pattern.name] == subject else None
        binding = dict(binding)
        binding[pattern.name] = subject
        return binding
    if isinstance(subject, Var) or pattern.fn != subject.fn:
        return None
    if len(pattern.args) != len(subject.args):
        return None
    for p, s in zip(pattern.args, subject.args):
        binding = naive_match(p, s, binding)
        if binding is None:
            return None
    return binding


def test_var_equality_is_by_name():
    assert Var("x") == Var("x")
    assert Var("x") != Var("y")
    assert Var("x", sort="Nat") == Var("x")
    assert hash(Var("x")) == hash(Var("x", sort="Nat"))


def test_app_equality_and_hash():
    assert mk("Plus", ZERO, Var("x")) == mk("Plus", ZERO, Var("x"))
    assert mk("Plus", ZERO, ZERO) != mk("Plus", ZERO, ONE)
    assert hash(mk("Plus", ZERO, ONE)) == hash(mk("Plus", ZERO, ONE))


def test_fmt_term_drops_parens_on_constants():
    assert fmt_term(ZERO) == "Zero"
    assert fmt_term(mk("Plus", ZERO, Var("x"))) == "Plus(Zero,x)"


def test_size_depth_ground():
    t = mk("Plus", ONE, Var("x"))
    assert term_size(t) == 4
    assert term_depth(t) == 3
    assert not is_ground(t)
    assert is_ground(ONE)


def test_var_occurrences_left_to_right_with_repeats():
    t = mk("Plus", Var("x"), mk("Plus", Var("y"), Var("x")))
    assert [v.name for v in var_occurrences(t)] == ["x", "y", "x"]
    assert vars_of(t) == {"x", "y"}


def test_is_linear():
    assert is_linear(mk("Plus", Var("x"), Var("y")))
    assert not is_linear(mk("Plus", Var("x"), Var("x")))


def test_match_basic():
    sigma = match(mk("Plus", ZERO, Var("x")), mk("Plus", ZERO, ONE))
    assert sigma == {"x": ONE}
    assert match(mk("Plus", ZERO, Var("x")), mk("Plus", ONE, ONE)) is None


def test_match_nonlinear_needs_equal_bindings():
    p = mk("Plus", Var("x"), Var("x"))
    assert match(p, mk("Plus", ONE, ONE)) == {"x": ONE}
    assert match(p, mk("Plus", ONE, ZERO)) is None


def test_match_agrees_with_naive_matcher_on_enumerated_pairs():
    pats = [
        Var("x"),
        mk("Plus", Var("x"), Var("y")),
        mk("Plus", Var("x"), Var("x")),
        mk("Plus", ZERO, Var("x")),
        mk("Succ", mk("Succ", Var("x"))),
        mk("Plus", mk("Succ", Var("x")), Var("y")),
    ]
    subjects = peano_terms(3)
    for p in pats:
        for s in subjects:
            assert match(p, s) == naive_match(p, s, {}), (p, s)


def test_match_then_substitute_recovers_subject():
    p = mk("Plus", mk("Succ", Var("x")), Var("y"))
    s = mk("Plus", mk("Succ", ONE), mk("Plus", ZERO, ZERO))
    sigma = match(p, s)
    assert sigma is not None
    assert apply_subst(sigma, p) == s


def test_apply_subst_leaves_unbound_vars():
    t = mk("Plus", Var("x"), Var("y"))
    assert apply_subst({"x": ZERO}, t) == mk("Plus", ZERO, Var("y"))


def test_positions_preorder_one_based():
    t = mk("Plus", ZERO, mk("Succ", Var("x")))
    got = list(positions(t))
    assert got == [
        ((), t),
        ((1,), ZERO),
        ((2,), mk("Succ", Var("x"))),
        ((2, 1), Var("x")),
    ]
    assert len(got) == term_size(t)


def test_subterm_and_replace_roundtrip():
    t = mk("Plus", ZERO, mk("Succ", ZERO))
    for pos, sub in positions(t):
        assert subterm_at(t, pos) == sub
        assert replace_at(t, pos, sub) == t
    changed = replace_at(t, (2, 1), ONE)
    assert changed == mk("Plus", ZERO, mk("Succ", ONE))
    assert t == mk("Plus", ZERO, mk("Succ", ZERO))  # replace is persistent


@given(st.integers(0, 2000))
def test_replace_at_every_position_preserves_size(seed):
    import random

    rng = random.Random(seed)
    terms = peano_terms(3)
    t = rng.choice(terms)
    pos, _ = rng.choice(list(positions(t)))
    out = replace_at(t, pos, ZERO)
    assert subterm_at(out, pos) == ZERO


def test_signature_rejects_undeclared_sort():
    with pytest.raises(SignatureError):
        Signature([SymbolDecl("f", ("Ghost",), "Nat")], sorts=["Nat"])


def test_signature_rejects_duplicate_profile():
    with pytest.raises(SignatureError):
        Signature(
            [SymbolDecl("f", ("Nat",), "Nat"), SymbolDecl("f", ("Nat",), "Nat")],
            sorts=["Nat"],
        )


def test_signature_allows_overloading_distinct_domains():
    sig = Signature(
        [
            SymbolDecl("c", (), "A"),
            SymbolDecl("d", (), "B"),
            SymbolDecl("f", ("A",), "A"),
            SymbolDecl("f", ("B",), "B"),
        ]
    )
    assert len(sig.decls_of("f")) == 2
    assert sig.arity("f") == 1
    assert sig.sort_of(mk("f", mk("c"))) == "A"
    assert sig.sort_of(mk("f", mk("d"))) == "B"


def test_sort_of_rejects_ill_sorted():
    with pytest.raises(IllSortedError):
        PEANO.sort_of(mk("Succ", ZERO, ZERO))
    with pytest.raises(IllSortedError):
        PEANO.sort_of(Var("x"))
    assert PEANO.sort_of(Var("x"), {"x": "Nat"}) == "Nat"


def test_var_sort_assignments_enumerates_consistent_envs():
    sig = Signature(
        [
            SymbolDecl("c", (), "A"),
            SymbolDecl("d", (), "B"),
            SymbolDecl("f", ("A", "A"), "A"),
        ]
    )
    got = sig.var_sort_assignments(mk("f", Var("x"), Var("y")))
    assert got == [("A", {"x": "A", "y": "A"})]
    anything = sig.var_sort_assignments(Var("x"))
    assert ("A", {"x": "A"}) in anything and ("B", {"x": "B"}) in anything


def test_min_depth():
    assert PEANO.min_depth("Nat") == 1
    empty = Signature([SymbolDecl("f", ("E",), "E")], sorts=["E"])
    assert empty.min_depth("E") == -1


def test_collapse_folds_everything_to_one_sort():
    flat = PEANO.collapse()
    assert flat.sorts == (TOP_SORT,)
    assert [d.name for d in flat.decls] == ["Zero", "Succ", "Plus"]
    assert flat.sort_of(mk("Plus", ZERO, ZERO)) == TOP_SORT


def test_constants_and_non_constants_keep_declaration_order():
    sig = Signature(
        [
            SymbolDecl("f", ("A",), "A"),
            SymbolDecl("c", (), "A"),
            SymbolDecl("g", ("A",), "A"),
            SymbolDecl("d", (), "A"),
        ]
    )
    assert [d.name for d in sig.constants()] == ["c", "d"]
    assert [d.name for d in sig.non_constants()] == ["f", "g"]
