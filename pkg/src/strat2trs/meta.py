"""Meta-level terms and the signature-size-independent strategy translation.

A term f(t1,...,tn) is represented as appl(f_sym, cons(t1', ... cons(tn',
nil))), with one constant f_sym per constructor; variables encode as
themselves.  Rules over meta-terms can walk argument lists with a fixed set
of list helpers, so the translation of `one` and `all` no longer grows with
the signature: each occurrence contributes seven rules plus one shared copy
of the list machinery.
"""

from __future__ import annotations

from typing import Optional

from .antiterm import (
    NotTerm,
    PAlias,
    PWild,
    PlainRule,
    RuleSchema,
    dedupe_rules,
    expand_schema,
    gen_equality_rules,
    nonlinear_schemas,
)
from .encode import Context, Encoding, TranslationError, _Translator, _short, reserved_names
from .strategy import All, Choice, Fail, Id, Mu, One, Rule, Seq, Strategy, SVar
from .terms import App, Signature, Term, Var, fmt_term, is_linear

META_RESERVED = ("appl", "cons", "nil", "rappend", "reverse", "rconcat", "propag", "botlist")


class IllFormedMeta(Exception):
    pass


def meta_names(sig: Signature) -> dict[str, str]:
    """Names for the meta layer: list/application symbols and one f_sym per
    constructor, all dodging user symbols (and each other)."""
    names = reserved_names(sig)
    taken = {d.name for d in sig.decls} | set(names.values())
    for base in META_RESERVED:
        name = base
        while name in taken:
            name += "_g"
        taken.add(name)
        names[base] = name
    for d in sig.decls:
        key = f"sym:{d.name}"
        if key in names:
            continue
        name = f"{d.name}_sym"
        while name in taken:
            name += "_g"
        taken.add(name)
        names[key] = name
    return names


def meta_encode(t: Term, names: dict[str, str], bot: Optional[str] = None) -> Term:
    """f(t1,...,tn) as appl(f_sym, [t1', ..., tn']); variables unchanged.

    When `bot` is given, a failure-rooted term bot(t) encodes as bot(t')."""
    if isinstance(t, Var):
        return t
    if bot is not None and t.fn == bot and len(t.args) == 1:
        return App(bot, (meta_encode(t.args[0], names, bot),))
    lst: Term = App(names["nil"], ())
    for a in reversed(t.args):
        lst = App(names["cons"], (meta_encode(a, names, bot), lst))
    return App(names["appl"], (App(names[f"sym:{t.fn}"], ()), lst))


def meta_decode(
    m: Term, sig: Signature, names: dict[str, str], bot: Optional[str] = None
) -> Term:
    """Inverse of meta_encode; rejects ill-formed meta-terms."""
    rev = {v: k[4:] for k, v in names.items() if k.startswith("sym:")}

    def go(u: Term) -> Term:
        if isinstance(u, Var):
            return u
        if bot is not None and u.fn == bot and len(u.args) == 1:
            return App(bot, (go(u.args[0]),))
        if u.fn != names["appl"] or len(u.args) != 2:
            raise IllFormedMeta(f"not an application node: {fmt_term(u)}")
        head, lst = u.args
        fn = rev.get(head.fn) if isinstance(head, App) and not head.args else None
        if fn is None:
            raise IllFormedMeta(f"bad constructor name: {fmt_term(head)}")
        args: list[Term] = []
        while True:
            if isinstance(lst, App) and lst.fn == names["nil"] and not lst.args:
                break
            if isinstance(lst, App) and lst.fn == names["cons"] and len(lst.args) == 2:
                args.append(go(lst.args[0]))
                lst = lst.args[1]
            else:
                raise IllFormedMeta(f"not a nil-terminated list: {fmt_term(lst)}")
        if sig.arity(fn) != len(args):
            raise IllFormedMeta(
                f"{fn} expects {sig.arity(fn)} arguments, got {len(args)}"
            )
        return App(fn, tuple(args))

    return go(m)


def _trlists_rules(n: dict[str, str]) -> list[PlainRule]:
    """The shared list machinery: reversal/concatenation helpers and the
    propagation of a failed argument list to a failed term."""
    h, t, x, f = Var("h"), Var("t"), Var("x"), Var("f")
    appl, cons, nil = n["appl"], n["cons"], n["nil"]
    rap, rev, rcat, prop, blist = (
        n["rappend"],
        n["reverse"],
        n["rconcat"],
        n["propag"],
        n["botlist"],
    )
    NIL = App(nil, ())

    def C(a: Term, b: Term) -> Term:
        return App(cons, (a, b))

    rules = [
        PlainRule(App(rap, (NIL, x)), C(x, NIL), "trlists"),
        PlainRule(App(rap, (C(h, t), x)), C(h, App(rap, (t, x))), "trlists"),
        PlainRule(App(rev, (NIL,)), NIL, "trlists"),
        PlainRule(App(rev, (C(h, t),)), App(rap, (App(rev, (t,)), h)), "trlists"),
        PlainRule(App(rcat, (NIL, x)), x, "trlists"),
        PlainRule(App(rcat, (C(h, t), x)), App(rcat, (t, C(h, x))), "trlists"),
        PlainRule(
            App(prop, (App(appl, (f, App(blist, (x,)))),)),
            App(n["bot"], (App(appl, (f, x)),)),
            "trlists",
        ),
        PlainRule(
            App(prop, (App(appl, (f, C(h, t))),)), App(appl, (f, C(h, t))), "trlists"
        ),
        PlainRule(App(prop, (App(appl, (f, NIL)),)), App(appl, (f, NIL)), "trlists"),
    ]
    return rules


class _MetaTranslator(_Translator):
    """Same traversal as the unsorted translator, meta-level rule shapes."""

    def __init__(self, sig: Signature, names: dict[str, str], share: bool):
        super().__init__(sig, names, share)
        self.needs_lists = False

    def _guard(self) -> Term:
        # the shape every successful meta-term has: appl(_, _) with fresh vars
        return App(self.names["appl"], (Var("y1"), Var("y2")))

    def _ok(self, sym: str, rhs_of) -> RuleSchema:
        g = self._guard()
        return RuleSchema(App(sym, (g,)), rhs_of(g), sym)

    def _visit(self, s: Strategy, env: dict[str, str]) -> tuple[str, list[RuleSchema]]:
        k = self.next_k()
        n = self.names
        x = Var("x")

        def B(t: Term) -> Term:
            return App(self.bot, (t,))

        if isinstance(s, Id):
            sym = self.claim(f"phi_{k}_id", _short(s))
            self.dispatch.append(sym)
            return sym, [self._ok(sym, lambda g: g), self._prop(sym)]

        if isinstance(s, Fail):
            sym = self.claim(f"phi_{k}_fail", _short(s))
            self.dispatch.append(sym)
            return sym, [self._ok(sym, B), self._prop(sym)]

        if isinstance(s, Rule):
            sym = self.claim(f"phi_{k}_rule", _short(s))
            self.dispatch.append(sym)
            # success / guard rules are built at the object level; the
            # expansion of the whole schema list is meta-lifted afterwards
            if is_linear(s.lhs):
                schemas = [
                    RuleSchema(App(sym, (s.lhs,)), s.rhs, sym),
                    RuleSchema(
                        App(sym, (PAlias("z", NotTerm(s.lhs)),)), B(Var("z")), sym
                    ),
                    self._prop(sym),
                ]
            else:
                self.needs_eq = True
                aux = self.claim(f"phi_{k}_ruleaux", f"guard helper of {sym}")
                schemas = nonlinear_schemas(
                    sym,
                    aux,
                    s.lhs,
                    s.rhs,
                    bot=self.bot,
                    eq=n["eq"],
                    conj=n["conj"],
                    true=n["btrue"],
                    false=n["bfalse"],
                    provenance=sym,
                ) + [self._prop(sym)]
            return sym, schemas

        if isinstance(s, Seq):
            sym = self.claim(f"phi_{k}_seq", _short(s))
            aux = self.claim(f"phi_{k}_seqaux", f"sequence helper of {sym}")
            self.dispatch.append(sym)
            f1, sch1 = self.visit(s.s1, env)
            f2, sch2 = self.visit(s.s2, env)
            g = self._guard()
            own = [
                self._ok(sym, lambda g: App(aux, (App(f2, (App(f1, (g,)),)), g))),
                self._prop(sym),
                RuleSchema(App(aux, (g, PWild())), g, sym),
                RuleSchema(App(aux, (B(PWild()), x)), B(x), sym),
            ]
            return sym, own + sch1 + sch2

        if isinstance(s, Choice):
            sym = self.claim(f"phi_{k}_choice", _short(s))
            aux = self.claim(f"phi_{k}_chaux", f"choice helper of {sym}")
            self.dispatch.append(sym)
            f1, sch1 = self.visit(s.s1, env)
            f2, sch2 = self.visit(s.s2, env)
            g = self._guard()
            own = [
                self._ok(sym, lambda g: App(aux, (App(f1, (g,)),))),
                self._prop(sym),
                RuleSchema(App(aux, (B(x),)), App(f2, (x,)), sym),
                RuleSchema(App(aux, (g,)), g, sym),
            ]
            return sym, own + sch1 + sch2

        if isinstance(s, Mu):
            sym = self.claim(f"phi_{k}_mu", _short(s))
            vsym = self.claim(f"phi_{k}_svar", f"binder {s.var} of {_short(s)}")
            self.dispatch.extend([sym, vsym])
            fb, schb = self.visit(s.body, {**env, s.var: vsym})
            own = [
                self._ok(sym, lambda g: App(fb, (g,))),
                self._prop(sym),
                self._ok(vsym, lambda g: App(fb, (g,))),
                self._prop(vsym),
            ]
            return sym, own + schb

        if isinstance(s, SVar):
            if s.name not in env:
                raise TranslationError(f"open strategy variable {s.name}")
            return env[s.name], []

        if isinstance(s, (All, One)):
            tag = "all" if isinstance(s, All) else "one"
            self.needs_lists = True
            sym = self.claim(f"phi_{k}_{tag}", _short(s))
            lsym = self.claim(f"phi_{k}_{tag}list", f"argument list walker of {sym}")
            wsym = self.claim(f"phi_{k}_{tag}walk", f"argument walker of {sym}")
            self.dispatch.append(sym)
            fb, schb = self.visit(s.s, env)
            appl, cons, nil = n["appl"], n["cons"], n["nil"]
            NIL = App(nil, ())
            f, h, t = Var("f"), Var("h"), Var("t")
            tried, done = Var("tried"), Var("done")
            g = self._guard()

            def C(a: Term, b: Term) -> Term:
                return App(cons, (a, b))

            own = [
                self._prop(sym),
                RuleSchema(
                    App(sym, (App(appl, (f, Var("args"))),)),
                    App(n["propag"], (App(appl, (f, App(lsym, (Var("args"),)))),)),
                    sym,
                ),
            ]
            if isinstance(s, All):
                own += [
                    RuleSchema(
                        App(lsym, (C(h, t),)),
                        App(wsym, (App(fb, (h,)), t, C(h, NIL), NIL)),
                        sym,
                    ),
                    RuleSchema(App(lsym, (NIL,)), NIL, sym),
                    RuleSchema(
                        App(wsym, (B(PWild()), t, tried, PWild())),
                        App(n["botlist"], (App(n["rconcat"], (tried, t)),)),
                        sym,
                    ),
                    RuleSchema(
                        App(wsym, (g, NIL, PWild(), done)),
                        App(n["reverse"], (C(g, done),)),
                        sym,
                    ),
                    RuleSchema(
                        App(wsym, (g, C(h, t), tried, done)),
                        App(wsym, (App(fb, (h,)), t, C(h, tried), C(g, done))),
                        sym,
                    ),
                ]
            else:
                own += [
                    RuleSchema(
                        App(lsym, (C(h, t),)),
                        App(wsym, (App(fb, (h,)), t, C(h, NIL))),
                        sym,
                    ),
                    RuleSchema(App(lsym, (NIL,)), App(n["botlist"], (NIL,)), sym),
                    RuleSchema(
                        App(wsym, (B(PWild()), NIL, tried)),
                        App(n["botlist"], (App(n["reverse"], (tried,)),)),
                        sym,
                    ),
                    RuleSchema(
                        App(wsym, (B(PWild()), C(h, t), tried)),
                        App(wsym, (App(fb, (h,)), t, C(h, tried))),
                        sym,
                    ),
                    RuleSchema(
                        App(wsym, (g, t, C(PWild(), tried))),
                        App(n["rconcat"], (tried, C(g, t))),
                        sym,
                    ),
                ]
            return sym, own + schb

        raise TranslationError(f"cannot translate {s!r}")


def _meta_lift(t: Term, fnames: set[str], names: dict[str, str]) -> Term:
    """Meta-encode the constructor-rooted subtrees of a mixed-level term."""
    if isinstance(t, Var):
        return t
    if t.fn in fnames:
        return meta_encode(t, names)
    return App(t.fn, tuple(_meta_lift(a, fnames, names) for a in t.args))


def translate_meta(
    sig: Signature,
    strategy: Strategy,
    context: Context = (),
    *,
    share_subterms: bool = False,
) -> Encoding:
    """Compile a strategy against the meta-level term representation."""
    base = sig.collapse()
    names = meta_names(base)
    tr = _MetaTranslator(base, names, share_subterms)
    env: dict[str, str] = {}
    schemas = _context_schemas_meta(tr, context, env)
    entry, schs = tr.visit(strategy, env)
    schemas.extend(schs)

    fnames = {d.name for d in base.decls}
    rules: list[PlainRule] = []
    for sch in schemas:
        for r in expand_schema(sch, base):
            rules.append(
                PlainRule(
                    _meta_lift(r.lhs, fnames, names),
                    _meta_lift(r.rhs, fnames, names),
                    r.provenance,
                )
            )
    if tr.needs_lists:
        rules.extend(_trlists_rules(names))
    if tr.needs_eq:
        for r in gen_equality_rules(
            base,
            sorted_mode=False,
            eq=names["eq"],
            conj=names["conj"],
            true=names["btrue"],
            false=names["bfalse"],
        ):
            rules.append(
                PlainRule(
                    _meta_lift(r.lhs, fnames, names),
                    _meta_lift(r.rhs, fnames, names),
                    r.provenance,
                )
            )
    rules = dedupe_rules(rules)
    return Encoding(
        "meta", entry, tr.fresh_symbols, tr.dispatch, schemas, rules, sig, names
    )


def _context_schemas_meta(
    tr: _MetaTranslator, context: Context, env: dict[str, str]
) -> list[RuleSchema]:
    vsyms: list[str] = []
    for name, _s in context:
        kb = tr.next_k()
        vsym = tr.claim(f"phi_{kb}_svar", f"context binding {name}")
        env[name] = vsym
        tr.dispatch.append(vsym)
        vsyms.append(vsym)
    schemas: list[RuleSchema] = []
    for (name, bound), vsym in zip(context, vsyms):
        fs, schs = tr.visit(bound, env)
        schemas.append(tr._ok(vsym, lambda g: App(fs, (g,))))
        schemas.append(tr._prop(vsym))
        schemas.extend(schs)
    return schemas
