"""Translation of strategy expressions into plain (unsorted) rewrite systems.

Every sub-strategy occurrence gets a dispatch symbol named phi_<k>_<tag>,
where k is the occurrence's preorder index in the strategy tree and the tag
names the construct (id, fail, rule, seq, choice, mu, svar, all, one, plus
seqaux/chaux/ruleaux helpers and per-constructor psi walkers).  For ground t,
phi_S(t) normalizes to the evaluation result of S on t, or to bot(t) when the
evaluation fails; bot-rooted arguments propagate through every dispatch
symbol, which is what lets the compound rules detect and recover from failure
of their parts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .antiterm import (
    NotBot,
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
from .strategy import (
    All,
    Choice,
    Fail,
    Id,
    Mu,
    One,
    Rule,
    Seq,
    Strategy,
    SVar,
    fmt_strategy,
    free_svars,
)
from .terms import App, Signature, Term, Var, is_linear


class TranslationError(Exception):
    pass


Context = Sequence[tuple[str, Strategy]]

RESERVED = ("bot", "eq", "conj", "btrue", "bfalse")


def reserved_names(sig: Signature) -> dict[str, str]:
    """Names for the failure marker and equality machinery, dodging user symbols."""
    taken = {d.name for d in sig.decls}
    out: dict[str, str] = {}
    for base in RESERVED:
        name = base
        while name in taken:
            name += "_g"
        taken.add(name)
        out[base] = name
    return out


@dataclass
class Encoding:
    """A compiled strategy: schemas, their expansion, and the symbol tables."""

    mode: str
    entry_symbol: str
    fresh_symbols: dict[str, str]
    dispatch_symbols: list[str]
    schemas: list[RuleSchema]
    rules: list[PlainRule]
    signature: Signature
    names: dict[str, str]
    extended: Optional[Signature] = None
    bot_of: Optional[dict[str, str]] = None
    entry_by_sort: Optional[dict[str, str]] = None

    @property
    def bot(self) -> str:
        return self.names["bot"]

    def entry_for(self, sort: Optional[str] = None) -> str:
        """Entry dispatch symbol; no-overload encodings pick it by subject sort."""
        if self.entry_by_sort is not None:
            if sort is None:
                raise ValueError(f"{self.mode} encoding needs the subject sort")
            return self.entry_by_sort[sort]
        return self.entry_symbol

    def bot_partner(self, sym: str) -> str:
        """Failure-marker symbol paired with a dispatch symbol."""
        if self.bot_of is not None and sym in self.bot_of:
            return self.bot_of[sym]
        return self.names["bot"]


def _short(s: Strategy) -> str:
    txt = fmt_strategy(s)
    return txt if len(txt) <= 48 else txt[:45] + "..."


class _Translator:
    """Stateful walk over one strategy tree; collects symbols and schemas."""

    def __init__(self, base: Signature, names: dict[str, str], share: bool):
        self.sig = base
        self.names = names
        self.bot = names["bot"]
        self.share = share
        self.k = 0
        self.taken = {d.name for d in base.decls} | set(names.values())
        self.fresh_symbols: dict[str, str] = {}
        self.dispatch: list[str] = []
        self.needs_eq = False
        self._memo: dict = {}

    def next_k(self) -> int:
        self.k += 1
        return self.k

    def claim(self, base_name: str, role: str) -> str:
        name = base_name
        while name in self.taken:
            name += "_g"
        self.taken.add(name)
        self.fresh_symbols[name] = role
        return name

    def _prop(self, sym: str) -> RuleSchema:
        x = Var("x")
        return RuleSchema(App(sym, (App(self.bot, (x,)),)), App(self.bot, (x,)), sym)

    def _B(self, t: Term) -> Term:
        return App(self.bot, (t,))

    def visit(self, s: Strategy, env: dict[str, str]) -> tuple[str, list[RuleSchema]]:
        if self.share:
            key = (s, tuple(sorted((v, env[v]) for v in free_svars(s) if v in env)))
            hit = self._memo.get(key)
            if hit is not None:
                return hit, []
            sym, schemas = self._visit(s, env)
            self._memo[key] = sym
            return sym, schemas
        return self._visit(s, env)

    def _visit(self, s: Strategy, env: dict[str, str]) -> tuple[str, list[RuleSchema]]:
        k = self.next_k()
        z, x = Var("z"), Var("x")

        if isinstance(s, Id):
            sym = self.claim(f"phi_{k}_id", _short(s))
            self.dispatch.append(sym)
            return sym, [
                RuleSchema(App(sym, (PAlias("z", NotBot()),)), z, sym),
                self._prop(sym),
            ]

        if isinstance(s, Fail):
            sym = self.claim(f"phi_{k}_fail", _short(s))
            self.dispatch.append(sym)
            return sym, [
                RuleSchema(App(sym, (PAlias("z", NotBot()),)), self._B(z), sym),
                self._prop(sym),
            ]

        if isinstance(s, Rule):
            sym = self.claim(f"phi_{k}_rule", _short(s))
            self.dispatch.append(sym)
            if is_linear(s.lhs):
                schemas = [
                    RuleSchema(App(sym, (s.lhs,)), s.rhs, sym),
                    RuleSchema(
                        App(sym, (PAlias("z", NotTerm(s.lhs)),)), self._B(z), sym
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
                    eq=self.names["eq"],
                    conj=self.names["conj"],
                    true=self.names["btrue"],
                    false=self.names["bfalse"],
                    provenance=sym,
                ) + [self._prop(sym)]
            return sym, schemas

        if isinstance(s, Seq):
            sym = self.claim(f"phi_{k}_seq", _short(s))
            aux = self.claim(f"phi_{k}_seqaux", f"sequence helper of {sym}")
            self.dispatch.append(sym)
            f1, sch1 = self.visit(s.s1, env)
            f2, sch2 = self.visit(s.s2, env)
            own = [
                RuleSchema(
                    App(sym, (PAlias("z", NotBot()),)),
                    App(aux, (App(f2, (App(f1, (z,)),)), z)),
                    sym,
                ),
                self._prop(sym),
                RuleSchema(App(aux, (PAlias("z", NotBot()), PWild())), z, sym),
                RuleSchema(App(aux, (self._B(PWild()), x)), self._B(x), sym),
            ]
            return sym, own + sch1 + sch2

        if isinstance(s, Choice):
            sym = self.claim(f"phi_{k}_choice", _short(s))
            aux = self.claim(f"phi_{k}_chaux", f"choice helper of {sym}")
            self.dispatch.append(sym)
            f1, sch1 = self.visit(s.s1, env)
            f2, sch2 = self.visit(s.s2, env)
            own = [
                RuleSchema(
                    App(sym, (PAlias("z", NotBot()),)), App(aux, (App(f1, (z,)),)), sym
                ),
                self._prop(sym),
                RuleSchema(App(aux, (self._B(x),)), App(f2, (x,)), sym),
                RuleSchema(App(aux, (PAlias("z", NotBot()),)), z, sym),
            ]
            return sym, own + sch1 + sch2

        if isinstance(s, Mu):
            sym = self.claim(f"phi_{k}_mu", _short(s))
            vsym = self.claim(f"phi_{k}_svar", f"binder {s.var} of {_short(s)}")
            self.dispatch.extend([sym, vsym])
            fb, schb = self.visit(s.body, {**env, s.var: vsym})
            own = [
                RuleSchema(App(sym, (PAlias("z", NotBot()),)), App(fb, (z,)), sym),
                self._prop(sym),
                RuleSchema(App(vsym, (PAlias("z", NotBot()),)), App(fb, (z,)), vsym),
                self._prop(vsym),
            ]
            return sym, own + schb

        if isinstance(s, SVar):
            if s.name not in env:
                raise TranslationError(f"open strategy variable {s.name}")
            return env[s.name], []

        if isinstance(s, All):
            sym = self.claim(f"phi_{k}_all", _short(s))
            self.dispatch.append(sym)
            psis = {
                f.name: self.claim(
                    f"phi_{k}_psi_{f.name}", f"argument walker of {sym} at {f.name}"
                )
                for f in self.sig.non_constants()
            }
            fb, schb = self.visit(s.s, env)
            own = [self._prop(sym)]
            for c in self.sig.constants():
                cc = App(c.name, ())
                own.append(RuleSchema(App(sym, (cc,)), cc, sym))
            for f in self.sig.non_constants():
                n = f.arity
                psi = psis[f.name]
                xs = tuple(Var(f"x{i + 1}") for i in range(n))
                ft = App(f.name, xs)
                own.append(
                    RuleSchema(
                        App(sym, (ft,)),
                        App(psi, tuple(App(fb, (v,)) for v in xs) + (ft,)),
                        sym,
                    )
                )
                own.append(
                    RuleSchema(
                        App(
                            psi,
                            tuple(PAlias(f"z{i + 1}", NotBot()) for i in range(n))
                            + (PWild(),),
                        ),
                        App(f.name, tuple(Var(f"z{i + 1}") for i in range(n))),
                        sym,
                    )
                )
                y = Var("y")
                for i in range(n):
                    slots: list = [PWild()] * n
                    slots[i] = self._B(PWild())
                    own.append(
                        RuleSchema(App(psi, tuple(slots) + (y,)), self._B(y), sym)
                    )
            return sym, own + schb

        if isinstance(s, One):
            sym = self.claim(f"phi_{k}_one", _short(s))
            self.dispatch.append(sym)
            psis = {
                f.name: [
                    self.claim(
                        f"phi_{k}_psi_{f.name}_{i + 1}",
                        f"argument walker of {sym} at {f.name}, position {i + 1}",
                    )
                    for i in range(f.arity)
                ]
                for f in self.sig.non_constants()
            }
            fb, schb = self.visit(s.s, env)
            own = [self._prop(sym)]
            for c in self.sig.constants():
                cc = App(c.name, ())
                own.append(RuleSchema(App(sym, (cc,)), self._B(cc), sym))
            for f in self.sig.non_constants():
                n = f.arity
                ps = psis[f.name]
                xs = tuple(Var(f"x{i + 1}") for i in range(n))
                own.append(
                    RuleSchema(
                        App(sym, (App(f.name, xs),)),
                        App(ps[0], (App(fb, (xs[0],)),) + xs[1:]),
                        sym,
                    )
                )
                for i in range(1, n + 1):
                    pre = tuple(self._B(xs[j]) for j in range(i - 1))
                    post = xs[i:]
                    own.append(
                        RuleSchema(
                            App(ps[i - 1], pre + (PAlias("z", NotBot()),) + post),
                            App(f.name, xs[: i - 1] + (z,) + post),
                            sym,
                        )
                    )
                    if i < n:
                        own.append(
                            RuleSchema(
                                App(ps[i - 1], pre + (self._B(xs[i - 1]),) + post),
                                App(
                                    ps[i],
                                    pre
                                    + (self._B(xs[i - 1]), App(fb, (xs[i],)))
                                    + xs[i + 1 :],
                                ),
                                sym,
                            )
                        )
                own.append(
                    RuleSchema(
                        App(ps[n - 1], tuple(self._B(v) for v in xs)),
                        self._B(App(f.name, xs)),
                        sym,
                    )
                )
            return sym, own + schb

        raise TranslationError(f"cannot translate {s!r}")


def _context_schemas(
    tr: _Translator, context: Context, env: dict[str, str]
) -> list[RuleSchema]:
    """Dispatch + propagation + body translation for each context binding.

    All binding symbols are claimed first so that bindings may reference each
    other (and the main strategy may reference any of them).
    """
    vsyms: list[str] = []
    for name, _s in context:
        kb = tr.next_k()
        vsym = tr.claim(f"phi_{kb}_svar", f"context binding {name}")
        env[name] = vsym
        tr.dispatch.append(vsym)
        vsyms.append(vsym)
    schemas: list[RuleSchema] = []
    z = Var("z")
    for (name, bound), vsym in zip(context, vsyms):
        fs, schs = tr.visit(bound, env)
        schemas.append(
            RuleSchema(App(vsym, (PAlias("z", NotBot()),)), App(fs, (z,)), vsym)
        )
        schemas.append(tr._prop(vsym))
        schemas.extend(schs)
    return schemas


def translate(
    sig: Signature,
    strategy: Strategy,
    context: Context = (),
    *,
    share_subterms: bool = False,
) -> Encoding:
    """Compile a strategy (with an optional context of named bindings)."""
    base = sig.collapse()
    names = reserved_names(base)
    tr = _Translator(base, names, share_subterms)
    env: dict[str, str] = {}
    schemas = _context_schemas(tr, context, env)
    entry, schs = tr.visit(strategy, env)
    schemas.extend(schs)

    rules: list[PlainRule] = []
    for sch in schemas:
        rules.extend(expand_schema(sch, base))
    if tr.needs_eq:
        rules.extend(
            gen_equality_rules(
                base,
                sorted_mode=False,
                eq=names["eq"],
                conj=names["conj"],
                true=names["btrue"],
                false=names["bfalse"],
            )
        )
    rules = dedupe_rules(rules)
    return Encoding(
        "unsorted",
        entry,
        tr.fresh_symbols,
        tr.dispatch,
        schemas,
        rules,
        sig,
        names,
    )


def translate_context(sig: Signature, context: Context) -> list[RuleSchema]:
    """Just the schemas for a context's bindings (no main strategy)."""
    base = sig.collapse()
    tr = _Translator(base, reserved_names(base), False)
    return _context_schemas(tr, context, {})
