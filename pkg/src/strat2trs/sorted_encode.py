"""Many-sorted strategy translation.

Same rule shapes as the unsorted translation, but instantiated per sort: the
complement families range over the constructors of one sort only, and every
generated symbol carries a profile over the user's sorts (bot and the unary
dispatch symbols s->s for every sort s, the sequence helper s x s -> s, the
argument walkers of `all`/`one` following the constructor's own profile).

Generated symbols are overloaded across sorts by default.  The no-overload
variant instead suffixes each symbol occurrence with its sort (bot_Int,
phi_3_rule_Bool, ...), which keeps distinct profiles apart in untyped output
formats; the single-profile condition symbols (conj and the two condition
constants) keep their names.

Rules that come out syntactically identical for several sorts (failure
propagation, mostly) are kept once per sort; emission can merge them on
request, which is also how counts get comparable with the unsorted mode.
"""

from __future__ import annotations

from typing import Callable, Optional

from .antiterm import (
    NotBot,
    NotTerm,
    PAlias,
    PWild,
    PlainRule,
    RuleSchema,
    expand_schema,
    linearize,
)
from .encode import Context, Encoding, TranslationError, _Translator, _short, reserved_names
from .strategy import All, Choice, Fail, Id, Mu, One, Rule, Seq, Strategy, SVar
from .terms import App, IllSortedError, Signature, SymbolDecl, Term, Var, fmt_term, is_linear


def _rule_sort(sig: Signature, lhs: Term, rhs: Term) -> tuple[str, dict[str, str]]:
    """Sort of a sort-preserving rewrite rule, with its variable sorts."""
    failures = []
    for srt, env in sig.var_sort_assignments(lhs):
        try:
            if sig.sort_of(rhs, env) == srt:
                return srt, env
            failures.append(srt)
        except IllSortedError:
            failures.append(srt)
    raise TranslationError(
        f"rewrite rule is not sort preserving: {fmt_term(lhs)} -> {fmt_term(rhs)}"
        + (f" (lhs sorts tried: {failures})" if failures else " (lhs is ill-sorted)")
    )


class _SortedTranslator(_Translator):
    """Per-sort rule emission over the original (sorted) signature."""

    def __init__(
        self, sig: Signature, names: dict[str, str], share: bool, no_overload: bool
    ):
        super().__init__(sig, names, share)
        self.no_overload = no_overload
        self.cond_sort = "Cond"
        while self.cond_sort in sig.sorts:
            self.cond_sort += "_g"
        self._sname_memo: dict[tuple[str, str], str] = {}
        self.profiles: list[SymbolDecl] = []
        self._profile_seen: set[SymbolDecl] = set()
        self.bot_of: dict[str, str] = {}

    # -- naming ---------------------------------------------------------
    def sname(self, base: str, sort: str) -> str:
        """Occurrence name of a generated symbol at one sort."""
        if not self.no_overload:
            return base
        key = (base, sort)
        hit = self._sname_memo.get(key)
        if hit is not None:
            return hit
        name = f"{base}_{sort}"
        while name in self.taken:
            name += "_g"
        self.taken.add(name)
        self.fresh_symbols[name] = f"{self.fresh_symbols.get(base, base)} [{sort}]"
        self._sname_memo[key] = name
        return name

    def declare(
        self,
        base: str,
        domain: tuple[str, ...],
        codomain: str,
        suffix: Optional[str] = None,
    ) -> str:
        """Final name for this profile, recording it in the extension table.

        The no-overload suffix defaults to the codomain; the equality symbol
        passes its argument sort instead (its codomain is always the condition
        sort, which would leave its per-sort profiles sharing one name).
        """
        name = self.sname(base, suffix if suffix is not None else codomain)
        decl = SymbolDecl(name, domain, codomain)
        if decl not in self._profile_seen:
            self._profile_seen.add(decl)
            self.profiles.append(decl)
        return name

    def bot_at(self, sort: str) -> str:
        return self.declare(self.names["bot"], (sort,), sort)

    def _B(self, t: Term, sort: str) -> Term:  # type: ignore[override]
        return App(self.bot_at(sort), (t,))

    # -- shared per-sort shapes ------------------------------------------
    def _props(self, base: str) -> list[RuleSchema]:
        out = []
        for s in self.sig.sorts:
            sym = self.declare(base, (s,), s)
            if sym not in self.bot_of:
                self.dispatch.append(sym)
                self.bot_of[sym] = self.bot_at(s)
            x = Var("x")
            out.append(
                RuleSchema(App(sym, (self._B(x, s),)), self._B(x, s), f"{base}@{s}")
            )
        return out

    def _oks(self, base: str, rhs_of: Callable[[Term, str], Term]) -> list[RuleSchema]:
        out = []
        for s in self.sig.sorts:
            sym = self.declare(base, (s,), s)
            out.append(
                RuleSchema(
                    App(sym, (PAlias("z", NotBot(s)),)),
                    rhs_of(Var("z"), s),
                    f"{base}@{s}",
                )
            )
        return out

    def _visit(self, s: Strategy, env: dict[str, str]) -> tuple[str, list[RuleSchema]]:
        k = self.next_k()
        x = Var("x")

        if isinstance(s, Id):
            base = self.claim(f"phi_{k}_id", _short(s))
            return base, self._oks(base, lambda z, _s: z) + self._props(base)

        if isinstance(s, Fail):
            base = self.claim(f"phi_{k}_fail", _short(s))
            return base, self._oks(base, self._B) + self._props(base)

        if isinstance(s, Rule):
            base = self.claim(f"phi_{k}_rule", _short(s))
            sigma, var_env = _rule_sort(self.sig, s.lhs, s.rhs)
            if is_linear(s.lhs):
                own = [
                    RuleSchema(
                        App(self.declare(base, (sigma,), sigma), (s.lhs,)),
                        s.rhs,
                        f"{base}@{sigma}",
                    ),
                    RuleSchema(
                        App(self.sname(base, sigma), (PAlias("z", NotTerm(s.lhs, sigma)),)),
                        self._B(Var("z"), sigma),
                        f"{base}@{sigma}",
                    ),
                ]
            else:
                self.needs_eq = True
                auxb = self.claim(f"phi_{k}_ruleaux", f"guard helper of {base}")
                lin, pairs = linearize(s.lhs)
                cond: Optional[Term] = None
                for a, b in reversed(pairs):
                    e = App(
                        self.declare(
                            self.names["eq"],
                            (var_env[a], var_env[a]),
                            self.cond_sort,
                            suffix=var_env[a],
                        ),
                        (Var(a), Var(b)),
                    )
                    cond = e if cond is None else App(self.names["conj"], (e, cond))
                phis = self.declare(base, (sigma,), sigma)
                auxs = self.declare(auxb, (sigma, self.cond_sort), sigma)
                assert cond is not None
                own = [
                    RuleSchema(App(phis, (lin,)), App(auxs, (lin, cond)), f"{base}@{sigma}"),
                    RuleSchema(
                        App(auxs, (lin, App(self.names["btrue"], ()))),
                        s.rhs,
                        f"{base}@{sigma}",
                    ),
                    RuleSchema(
                        App(auxs, (lin, App(self.names["bfalse"], ()))),
                        self._B(lin, sigma),
                        f"{base}@{sigma}",
                    ),
                    RuleSchema(
                        App(phis, (PAlias("z", NotTerm(lin, sigma)),)),
                        self._B(Var("z"), sigma),
                        f"{base}@{sigma}",
                    ),
                ]
            for srt in self.sig.sorts:
                if srt == sigma:
                    continue
                sym = self.declare(base, (srt,), srt)
                own.append(
                    RuleSchema(
                        App(sym, (PAlias("z", NotBot(srt)),)),
                        self._B(Var("z"), srt),
                        f"{base}@{srt}",
                    )
                )
            return base, own + self._props(base)

        if isinstance(s, Seq):
            base = self.claim(f"phi_{k}_seq", _short(s))
            auxb = self.claim(f"phi_{k}_seqaux", f"sequence helper of {base}")
            f1, sch1 = self.visit(s.s1, env)
            f2, sch2 = self.visit(s.s2, env)
            own: list[RuleSchema] = []
            for srt in self.sig.sorts:
                aux = self.declare(auxb, (srt, srt), srt)
                f1s = self.sname(f1, srt)
                f2s = self.sname(f2, srt)
                z = Var("z")
                own.append(
                    RuleSchema(
                        App(self.declare(base, (srt,), srt), (PAlias("z", NotBot(srt)),)),
                        App(aux, (App(f2s, (App(f1s, (z,)),)), z)),
                        f"{base}@{srt}",
                    )
                )
                own.append(
                    RuleSchema(App(aux, (PAlias("z", NotBot(srt)), PWild())), z, f"{base}@{srt}")
                )
                own.append(
                    RuleSchema(
                        App(aux, (self._B(PWild(), srt), x)),
                        self._B(x, srt),
                        f"{base}@{srt}",
                    )
                )
            return base, own + self._props(base) + sch1 + sch2

        if isinstance(s, Choice):
            base = self.claim(f"phi_{k}_choice", _short(s))
            auxb = self.claim(f"phi_{k}_chaux", f"choice helper of {base}")
            f1, sch1 = self.visit(s.s1, env)
            f2, sch2 = self.visit(s.s2, env)
            own = []
            for srt in self.sig.sorts:
                aux = self.declare(auxb, (srt,), srt)
                f1s = self.sname(f1, srt)
                f2s = self.sname(f2, srt)
                z = Var("z")
                own.append(
                    RuleSchema(
                        App(self.declare(base, (srt,), srt), (PAlias("z", NotBot(srt)),)),
                        App(aux, (App(f1s, (z,)),)),
                        f"{base}@{srt}",
                    )
                )
                own.append(
                    RuleSchema(App(aux, (self._B(x, srt),)), App(f2s, (x,)), f"{base}@{srt}")
                )
                own.append(
                    RuleSchema(App(aux, (PAlias("z", NotBot(srt)),)), z, f"{base}@{srt}")
                )
            return base, own + self._props(base) + sch1 + sch2

        if isinstance(s, Mu):
            base = self.claim(f"phi_{k}_mu", _short(s))
            vbase = self.claim(f"phi_{k}_svar", f"binder {s.var} of {_short(s)}")
            fb, schb = self.visit(s.body, {**env, s.var: vbase})
            own = self._oks(base, lambda z, srt: App(self.sname(fb, srt), (z,)))
            own += self._oks(vbase, lambda z, srt: App(self.sname(fb, srt), (z,)))
            return base, own + self._props(base) + self._props(vbase) + schb

        if isinstance(s, SVar):
            if s.name not in env:
                raise TranslationError(f"open strategy variable {s.name}")
            return env[s.name], []

        if isinstance(s, All):
            base = self.claim(f"phi_{k}_all", _short(s))
            psib = {
                f: self.claim(
                    f"phi_{k}_psi_{f.name}", f"argument walker of {base} at {f.name}"
                )
                for f in self.sig.non_constants()
            }
            fb, schb = self.visit(s.s, env)
            own = self._props(base)
            for c in self.sig.constants():
                cc = App(c.name, ())
                own.append(
                    RuleSchema(
                        App(self.sname(base, c.codomain), (cc,)), cc, f"{base}@{c.codomain}"
                    )
                )
            y = Var("y")
            for f in self.sig.non_constants():
                n = f.arity
                psi = self.declare(psib[f], f.domain + (f.codomain,), f.codomain)
                xs = tuple(Var(f"x{i + 1}") for i in range(n))
                ft = App(f.name, xs)
                own.append(
                    RuleSchema(
                        App(self.sname(base, f.codomain), (ft,)),
                        App(
                            psi,
                            tuple(
                                App(self.sname(fb, f.domain[i]), (xs[i],))
                                for i in range(n)
                            )
                            + (ft,),
                        ),
                        f"{base}@{f.codomain}",
                    )
                )
                own.append(
                    RuleSchema(
                        App(
                            psi,
                            tuple(
                                PAlias(f"z{i + 1}", NotBot(f.domain[i]))
                                for i in range(n)
                            )
                            + (PWild(),),
                        ),
                        App(f.name, tuple(Var(f"z{i + 1}") for i in range(n))),
                        f"{base}@{f.codomain}",
                    )
                )
                for i in range(n):
                    slots: list = [PWild()] * n
                    slots[i] = self._B(PWild(), f.domain[i])
                    own.append(
                        RuleSchema(
                            App(psi, tuple(slots) + (y,)),
                            self._B(y, f.codomain),
                            f"{base}@{f.codomain}",
                        )
                    )
            return base, own + schb

        if isinstance(s, One):
            base = self.claim(f"phi_{k}_one", _short(s))
            psib = {
                f: [
                    self.claim(
                        f"phi_{k}_psi_{f.name}_{i + 1}",
                        f"argument walker of {base} at {f.name}, position {i + 1}",
                    )
                    for i in range(f.arity)
                ]
                for f in self.sig.non_constants()
            }
            fb, schb = self.visit(s.s, env)
            own = self._props(base)
            for c in self.sig.constants():
                cc = App(c.name, ())
                own.append(
                    RuleSchema(
                        App(self.sname(base, c.codomain), (cc,)),
                        self._B(cc, c.codomain),
                        f"{base}@{c.codomain}",
                    )
                )
            for f in self.sig.non_constants():
                n = f.arity
                ps = [
                    self.declare(psib[f][i], f.domain, f.codomain) for i in range(n)
                ]
                xs = tuple(Var(f"x{i + 1}") for i in range(n))
                own.append(
                    RuleSchema(
                        App(self.sname(base, f.codomain), (App(f.name, xs),)),
                        App(ps[0], (App(self.sname(fb, f.domain[0]), (xs[0],)),) + xs[1:]),
                        f"{base}@{f.codomain}",
                    )
                )
                for i in range(1, n + 1):
                    pre = tuple(self._B(xs[j], f.domain[j]) for j in range(i - 1))
                    post = xs[i:]
                    own.append(
                        RuleSchema(
                            App(
                                ps[i - 1],
                                pre + (PAlias("z", NotBot(f.domain[i - 1])),) + post,
                            ),
                            App(f.name, xs[: i - 1] + (Var("z"),) + post),
                            f"{base}@{f.codomain}",
                        )
                    )
                    if i < n:
                        own.append(
                            RuleSchema(
                                App(
                                    ps[i - 1],
                                    pre + (self._B(xs[i - 1], f.domain[i - 1]),) + post,
                                ),
                                App(
                                    ps[i],
                                    pre
                                    + (
                                        self._B(xs[i - 1], f.domain[i - 1]),
                                        App(self.sname(fb, f.domain[i]), (xs[i],)),
                                    )
                                    + xs[i + 1 :],
                                ),
                                f"{base}@{f.codomain}",
                            )
                        )
                own.append(
                    RuleSchema(
                        App(ps[n - 1], tuple(self._B(xs[j], f.domain[j]) for j in range(n))),
                        self._B(App(f.name, xs), f.codomain),
                        f"{base}@{f.codomain}",
                    )
                )
            return base, own + schb

        raise TranslationError(f"cannot translate {s!r}")

    # -- equality machinery ----------------------------------------------
    def eq_rules(self) -> list[PlainRule]:
        n = self.names
        tt = App(n["btrue"], ())
        ff = App(n["bfalse"], ())
        cs = self.cond_sort
        self.profiles.append(SymbolDecl(n["conj"], (cs, cs), cs))
        self.profiles.append(SymbolDecl(n["btrue"], (), cs))
        self.profiles.append(SymbolDecl(n["bfalse"], (), cs))
        rules: list[PlainRule] = []
        for d in self.sig.decls:
            xs = [Var(f"x{i + 1}") for i in range(d.arity)]
            ys = [Var(f"y{i + 1}") for i in range(d.arity)]
            eq_d = self.declare(n["eq"], (d.codomain, d.codomain), cs, suffix=d.codomain)
            lhs = App(eq_d, (App(d.name, tuple(xs)), App(d.name, tuple(ys))))
            body: Term = tt
            for i in range(d.arity - 1, -1, -1):
                eq_i = self.declare(
                    n["eq"], (d.domain[i], d.domain[i]), cs, suffix=d.domain[i]
                )
                body = App(n["conj"], (App(eq_i, (xs[i], ys[i])), body))
            rules.append(PlainRule(lhs, body, "equality"))
        for d in self.sig.decls:
            for e in self.sig.decls:
                if d.name == e.name or d.codomain != e.codomain:
                    continue
                eq_d = self.declare(
                    n["eq"], (d.codomain, d.codomain), cs, suffix=d.codomain
                )
                xs = tuple(Var(f"x{i + 1}") for i in range(d.arity))
                ys = tuple(Var(f"y{i + 1}") for i in range(e.arity))
                rules.append(
                    PlainRule(App(eq_d, (App(d.name, xs), App(e.name, ys))), ff, "equality")
                )
        z = Var("z")
        rules.append(PlainRule(App(n["conj"], (tt, z)), z, "equality"))
        rules.append(PlainRule(App(n["conj"], (ff, z)), ff, "equality"))
        rules.append(PlainRule(App(n["conj"], (z, tt)), z, "equality"))
        rules.append(PlainRule(App(n["conj"], (z, ff)), ff, "equality"))
        return rules


def _context_schemas_sorted(
    tr: _SortedTranslator, context: Context, env: dict[str, str]
) -> list[RuleSchema]:
    vsyms: list[str] = []
    for name, _s in context:
        kb = tr.next_k()
        vsym = tr.claim(f"phi_{kb}_svar", f"context binding {name}")
        env[name] = vsym
        vsyms.append(vsym)
    schemas: list[RuleSchema] = []
    for (name, bound), vbase in zip(context, vsyms):
        fs, schs = tr.visit(bound, env)
        schemas.extend(
            tr._oks(vbase, lambda z, srt: App(tr.sname(fs, srt), (z,)))
        )
        schemas.extend(tr._props(vbase))
        schemas.extend(schs)
    return schemas


def translate_sorted(
    sig: Signature,
    strategy: Strategy,
    context: Context = (),
    *,
    share_subterms: bool = False,
    no_overload: bool = False,
) -> Encoding:
    """Compile a strategy against the sorted signature, one rule family per sort.

    Rules inside the strategy must be sort preserving.  Syntactic duplicates
    between sorts are kept; apply dedupe_rules to collapse them.
    """
    names = reserved_names(sig)
    tr = _SortedTranslator(sig, names, share_subterms, no_overload)
    env: dict[str, str] = {}
    schemas = _context_schemas_sorted(tr, context, env)
    entry, schs = tr.visit(strategy, env)
    schemas.extend(schs)

    rules: list[PlainRule] = []
    for sch in schemas:
        rules.extend(expand_schema(sch, sig))
    if tr.needs_eq:
        rules.extend(tr.eq_rules())

    extra_sorts = [tr.cond_sort] if tr.needs_eq else []
    ext = sig.extended(tr.profiles, extra_sorts)
    return Encoding(
        "sorted-no-overload" if no_overload else "sorted",
        entry,
        tr.fresh_symbols,
        tr.dispatch,
        schemas,
        rules,
        sig,
        names,
        extended=ext,
        bot_of=dict(tr.bot_of),
        entry_by_sort=(
            {s: tr.sname(entry, s) for s in sig.sorts} if no_overload else None
        ),
    )


def translate_sorted_no_overload(
    sig: Signature,
    strategy: Strategy,
    context: Context = (),
    *,
    share_subterms: bool = False,
) -> Encoding:
    return translate_sorted(
        sig, strategy, context, share_subterms=share_subterms, no_overload=True
    )


def sort_check(ext: Signature, t: Term, var_env: Optional[dict[str, str]] = None) -> str:
    """Sort of a term over the extended signature; raises when ill-sorted."""
    return ext.sort_of(t, var_env)
