"""Rule schemas with anti-terms, aliases and wildcards, and their expansion.

A schema left-hand side is an ordinary term whose argument slots may also
hold two extra node kinds:

* ``PWild()``          the `_` wildcard; becomes a fresh variable that is
                       never referenced in the right-hand side
* ``PAlias(x, anti)``  an `x @ anti` alias; `anti` is an anti-pattern and
                       occurrences of `x` in the rhs stand for the member
                       chosen when the anti-pattern is expanded

Anti-patterns come in two flavours: NotBot (any constructor-rooted term, i.e.
anything not rooted by the failure marker; optionally restricted to one sort)
and NotTerm (anything not matched by a given linear pattern).  Expanding a
schema replaces every anti-pattern by each member of its complement family in
turn; with several anti-patterns in one schema this is a cartesian product.

The module also generates the support machinery for rules with non-linear
left-hand sides: linearization, the guarded four-rule scheme, and the
equality/conjunction rules it relies on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Union

from .terms import (
    App,
    Signature,
    Term,
    Var,
    apply_subst,
    fmt_term,
    is_linear,
    vars_of,
)


@dataclass(frozen=True)
class PWild:
    """The `_` wildcard: matches anything, never used on a right-hand side."""


@dataclass(frozen=True)
class NotBot:
    """Complement of `bot(_)`: every constructor shape (of one sort, if given)."""

    sort: str | None = None


@dataclass(frozen=True)
class NotTerm:
    """Complement of a linear pattern (within one sort, if given)."""

    term: Term
    sort: str | None = None


AntiPat = Union[NotBot, NotTerm]


@dataclass(frozen=True)
class PAlias:
    """`name @ anti`: binds the chosen complement member to an alias variable."""

    name: str
    anti: AntiPat


SchemaPat = Union[Term, PWild, PAlias]


@dataclass(frozen=True)
class RuleSchema:
    """One schema rule; lhs may contain wildcards and aliased anti-patterns."""

    lhs: SchemaPat
    rhs: Term
    provenance: str = field(default="", compare=False)


@dataclass(frozen=True)
class PlainRule:
    """A plain rewrite rule.  Equality ignores provenance, so rule sets dedup."""

    lhs: Term
    rhs: Term
    provenance: str = field(default="", compare=False)


def fmt_rule(r: PlainRule) -> str:
    return f"{fmt_term(r.lhs)} -> {fmt_term(r.rhs)}"


def dedupe_rules(rules: list[PlainRule]) -> list[PlainRule]:
    """Drop rules whose (lhs, rhs) already occurred, keeping first occurrences."""
    seen: set[tuple[Term, Term]] = set()
    out: list[PlainRule] = []
    for r in rules:
        key = (r.lhs, r.rhs)
        if key not in seen:
            seen.add(key)
            out.append(r)
    return out


class FreshVars:
    """Deterministic supply of x1, x2, ... skipping already-taken names."""

    def __init__(self, taken: set[str] | frozenset[str] = frozenset()):
        self.taken = set(taken)
        self._i = 0

    def next(self) -> Var:
        while True:
            self._i += 1
            name = f"x{self._i}"
            if name not in self.taken:
                self.taken.add(name)
                return Var(name)


def canonicalize_pattern(t: Term) -> Term:
    """Rename variables to x1, x2, ... in order of first occurrence."""
    names: dict[str, str] = {}

    def go(u: Term) -> Term:
        if isinstance(u, Var):
            if u.name not in names:
                names[u.name] = f"x{len(names) + 1}"
            return Var(names[u.name])
        return App(u.fn, tuple(go(a) for a in u.args))

    return go(t)


def expand_not_bot(sig: Signature, sort: str | None = None) -> list[Term]:
    """All constructor shapes f(x1,...,xn), i.e. the complement of `bot(_)`.

    With a sort, only symbols whose codomain is that sort contribute.
    """
    out: list[Term] = []
    for d in sig.decls:
        if sort is not None and d.codomain != sort:
            continue
        fresh = FreshVars()
        out.append(App(d.name, tuple(fresh.next() for _ in d.domain)))
    return out


def _shift_vars(t: Term, prefix: str) -> Term:
    if isinstance(t, Var):
        return Var(prefix + t.name)
    return App(t.fn, tuple(_shift_vars(a, prefix) for a in t.args))


def expand_antiterm(t: Term, sig: Signature, sort: str | None = None) -> list[Term]:
    """Complement family of a linear pattern.

    The members are pairwise disjoint and jointly match exactly the ground
    terms (of the given sort, when sorted) that do not match `t`.  Layout, in
    deterministic order: first one shape g(...) per signature symbol g other
    than t's root, then, for each non-variable argument position i from left
    to right, one member per complement of that argument — with the arguments
    left of i fixed to t's own subpatterns, so every member excludes what the
    earlier ones already cover.
    """
    if isinstance(t, Var):
        return []
    assert is_linear(t), f"anti-term over non-linear pattern {fmt_term(t)}"

    decls = [d for d in sig.decls if sort is None or d.codomain == sort]
    root = next(
        (d for d in decls if d.name == t.fn and d.arity == len(t.args)), None
    )
    assert root is not None, f"{t.fn}/{len(t.args)} not declared at sort {sort}"

    out: list[Term] = []
    for d in decls:
        if d.name == t.fn:
            continue
        fresh = FreshVars()
        out.append(App(d.name, tuple(fresh.next() for _ in d.domain)))

    for i, ti in enumerate(t.args):
        if isinstance(ti, Var):
            continue
        sub_sort = root.domain[i] if sort is not None else None
        for p in expand_antiterm(ti, sig, sub_sort):
            args = list(t.args[:i])
            args.append(_shift_vars(p, "c$"))
            args.extend(Var(f"s${j}") for j in range(i + 1, len(t.args)))
            out.append(canonicalize_pattern(App(t.fn, tuple(args))))
    return out


def _anti_members(anti: AntiPat, sig: Signature) -> list[Term]:
    if isinstance(anti, NotBot):
        return expand_not_bot(sig, anti.sort)
    return expand_antiterm(anti.term, sig, anti.sort)


def expand_schema(schema: RuleSchema, sig: Signature) -> list[PlainRule]:
    """Cartesian expansion of one schema into plain rules.

    The leftmost anti-pattern varies slowest.  For every output rule the fresh
    name supply restarts at x1, skipping names the rule already uses, so rule
    sets are reproducible; wildcards and inserted member variables draw from
    the same supply in left-to-right order.
    """
    alias_sites: list[PAlias] = []

    def scan(u: SchemaPat) -> None:
        if isinstance(u, PAlias):
            alias_sites.append(u)
        elif isinstance(u, App):
            for a in u.args:
                scan(a)

    scan(schema.lhs)
    alias_names = [s.name for s in alias_sites]
    assert len(set(alias_names)) == len(alias_names), "duplicate alias in schema"

    fixed: set[str] = set()

    def scan_fixed(u: SchemaPat) -> None:
        if isinstance(u, Var):
            fixed.add(u.name)
        elif isinstance(u, App):
            for a in u.args:
                scan_fixed(a)

    scan_fixed(schema.lhs)
    fixed |= vars_of(schema.rhs) - set(alias_names)

    member_lists = [_anti_members(s.anti, sig) for s in alias_sites]
    rules: list[PlainRule] = []
    for combo in product(*member_lists):
        fresh = FreshVars(fixed)
        subst: dict[str, Term] = {}
        site = 0

        def insert(member: Term) -> Term:
            ren: dict[str, Var] = {}

            def go(w: Term) -> Term:
                if isinstance(w, Var):
                    if w.name not in ren:
                        ren[w.name] = fresh.next()
                    return ren[w.name]
                return App(w.fn, tuple(go(a) for a in w.args))

            return go(member)

        def build(u: SchemaPat) -> Term:
            nonlocal site
            if isinstance(u, PWild):
                return fresh.next()
            if isinstance(u, PAlias):
                member = insert(combo[site])
                site += 1
                subst[u.name] = member
                return member
            if isinstance(u, Var):
                return u
            return App(u.fn, tuple(build(a) for a in u.args))

        lhs = build(schema.lhs)
        rhs = apply_subst(subst, schema.rhs)
        assert isinstance(lhs, App), "expanded lhs must not be a variable"
        assert vars_of(rhs) <= vars_of(lhs), fmt_term(rhs)
        rules.append(PlainRule(lhs, rhs, schema.provenance))
    return rules


def linearize(t: Term) -> tuple[Term, list[tuple[str, str]]]:
    """Rename repeated variable occurrences apart.

    Second and later occurrences of a variable v become v_1, v_2, ...; returns
    the linearized pattern together with the (original, renamed) name pairs in
    left-to-right order of the renamed occurrences.
    """
    seen: dict[str, int] = {}
    taken = set(vars_of(t))
    pairs: list[tuple[str, str]] = []

    def go(u: Term) -> Term:
        if isinstance(u, Var):
            n = seen.get(u.name, 0)
            seen[u.name] = n + 1
            if n == 0:
                return u
            k = n
            while f"{u.name}_{k}" in taken:
                k += 1
            cand = f"{u.name}_{k}"
            taken.add(cand)
            pairs.append((u.name, cand))
            return Var(cand)
        return App(u.fn, tuple(go(a) for a in u.args))

    return go(t), pairs


def nonlinear_schemas(
    phi: str,
    phi_aux: str,
    lhs: Term,
    rhs: Term,
    *,
    bot: str,
    eq: str,
    conj: str,
    true: str,
    false: str,
    sort: str | None = None,
    provenance: str = "",
) -> list[RuleSchema]:
    """Guarded scheme for a rewrite rule whose lhs is non-linear.

    Matching is done against the linearized lhs l'; a condition conjoining one
    equality per duplicated variable decides between the original rhs and a
    failure.  Yields the three guard rules followed by the failure schema
    against not-l'; the signature-wide equality rules themselves come from
    gen_equality_rules and are shared per encoding.
    """
    lin, pairs = linearize(lhs)
    assert pairs, "lhs is linear; a plain rule schema handles it directly"

    conds = [App(eq, (Var(a), Var(b))) for a, b in pairs]
    cond: Term = conds[-1]
    for c in reversed(conds[:-1]):
        cond = App(conj, (c, cond))

    return [
        RuleSchema(App(phi, (lin,)), App(phi_aux, (lin, cond)), provenance),
        RuleSchema(App(phi_aux, (lin, App(true, ()))), rhs, provenance),
        RuleSchema(App(phi_aux, (lin, App(false, ()))), App(bot, (lin,)), provenance),
        RuleSchema(
            App(phi, (PAlias("y$", NotTerm(lin, sort)),)),
            App(bot, (Var("y$"),)),
            provenance,
        ),
    ]


def expand_nonlinear(
    phi: str,
    phi_aux: str,
    lhs: Term,
    rhs: Term,
    sig: Signature,
    *,
    bot: str,
    eq: str,
    conj: str,
    true: str,
    false: str,
    sort: str | None = None,
    provenance: str = "",
) -> list[PlainRule]:
    """Expansion of nonlinear_schemas into plain rules over one signature."""
    out: list[PlainRule] = []
    for sch in nonlinear_schemas(
        phi,
        phi_aux,
        lhs,
        rhs,
        bot=bot,
        eq=eq,
        conj=conj,
        true=true,
        false=false,
        sort=sort,
        provenance=provenance,
    ):
        out.extend(expand_schema(sch, sig))
    return out


def gen_equality_rules(
    sig: Signature,
    *,
    sorted_mode: bool = False,
    eq: str = "eq",
    conj: str = "conj",
    true: str = "btrue",
    false: str = "bfalse",
    provenance: str = "equality",
) -> list[PlainRule]:
    """Structural equality over the signature, decided by rewriting.

    Per constructor one decomposition rule ending in `true`; one clash rule to
    `false` per ordered pair of distinct constructors (restricted to pairs of
    the same codomain in sorted mode); four conjunction rules that shortcut on
    either argument.
    """
    rules: list[PlainRule] = []
    tt = App(true, ())
    ff = App(false, ())

    for d in sig.decls:
        xs = [Var(f"x{i + 1}") for i in range(d.arity)]
        ys = [Var(f"y{i + 1}") for i in range(d.arity)]
        lhs = App(eq, (App(d.name, tuple(xs)), App(d.name, tuple(ys))))
        body: Term = tt
        for x, y in zip(reversed(xs), reversed(ys)):
            body = App(conj, (App(eq, (x, y)), body))
        rules.append(PlainRule(lhs, body, provenance))

    for d in sig.decls:
        for e in sig.decls:
            if d.name == e.name:
                continue
            if sorted_mode and d.codomain != e.codomain:
                continue
            xs = tuple(Var(f"x{i + 1}") for i in range(d.arity))
            ys = tuple(Var(f"y{i + 1}") for i in range(e.arity))
            lhs = App(eq, (App(d.name, xs), App(e.name, ys)))
            rules.append(PlainRule(lhs, ff, provenance))

    z = Var("z")
    rules.append(PlainRule(App(conj, (tt, z)), z, provenance))
    rules.append(PlainRule(App(conj, (ff, z)), ff, provenance))
    rules.append(PlainRule(App(conj, (z, tt)), z, provenance))
    rules.append(PlainRule(App(conj, (z, ff)), ff, provenance))
    return rules
