"""Strategy combinator AST and the textual input language.

A strategy file has two sections: `abstract syntax` declares a many-sorted
signature, `strategies` gives named (possibly parameterized) definitions.
Definitions are hygienic macros — they are inlined before anything semantic
happens, and recursion is only expressible through `mu`.

Grammar (comments run from `#` to end of line):

    program  := "abstract syntax" sortdecl+ "strategies" def+
    sortdecl := SORT "=" ctor ("|" ctor)*
    ctor     := NAME "(" (SORT ("," SORT)*)? ")"
    def      := NAME "(" (NAME ("," NAME)*)? ")" "=" strat
    strat    := strat ";" strat | strat "<+" strat | "mu" NAME "." strat
              | "one" "(" strat ")" | "all" "(" strat ")"
              | "[" term "->" term "]" | "Identity" | "Fail"
              | NAME "(" (strat ("," strat)*)? ")" | NAME | "(" strat ")"

`;` binds tighter than `<+`; both are right-associative.  Inside a rule
literal, a bare name is a variable unless it is a declared constant.  The
keyword spelling `Fail` is this implementation's choice; input files in the
wild only ever use `Identity`.  The entry point is the definition named
`mainStrat`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .terms import App, Signature, SignatureError, SymbolDecl, Term, Var, vars_of


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Id:
    pass


@dataclass(frozen=True)
class Fail:
    pass


@dataclass(frozen=True)
class Rule:
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Seq:
    s1: "Strategy"
    s2: "Strategy"


@dataclass(frozen=True)
class Choice:
    s1: "Strategy"
    s2: "Strategy"


@dataclass(frozen=True)
class One:
    s: "Strategy"


@dataclass(frozen=True)
class All:
    s: "Strategy"


@dataclass(frozen=True)
class Mu:
    var: str
    body: "Strategy"


@dataclass(frozen=True)
class SVar:
    name: str


Strategy = Id | Fail | Rule | Seq | Choice | One | All | Mu | SVar


def subnodes(s: Strategy):
    """Preorder iterator over all sub-strategies, `s` included."""
    stack = [s]
    while stack:
        x = stack.pop()
        yield x
        if isinstance(x, (Seq, Choice)):
            stack.append(x.s2)
            stack.append(x.s1)
        elif isinstance(x, (One, All)):
            stack.append(x.s)
        elif isinstance(x, Mu):
            stack.append(x.body)


def free_svars(s: Strategy) -> set[str]:
    if isinstance(s, SVar):
        return {s.name}
    if isinstance(s, (Seq, Choice)):
        return free_svars(s.s1) | free_svars(s.s2)
    if isinstance(s, (One, All)):
        return free_svars(s.s)
    if isinstance(s, Mu):
        return free_svars(s.body) - {s.var}
    return set()


def freshen(s: Strategy, taken: set[str] | None = None) -> Strategy:
    """Rename mu-binders apart so that every binder is unique (and distinct
    from any name in `taken`), enforcing the hygiene convention."""
    used = set(taken or ()) | free_svars(s)
    counter = itertools.count(1)

    def fresh(base: str) -> str:
        if base not in used:
            used.add(base)
            return base
        while True:
            cand = f"{base}_{next(counter)}"
            if cand not in used:
                used.add(cand)
                return cand

    def go(x: Strategy, env: dict[str, str]) -> Strategy:
        if isinstance(x, Mu):
            nv = fresh(x.var)
            return Mu(nv, go(x.body, {**env, x.var: nv}))
        if isinstance(x, SVar):
            return SVar(env.get(x.name, x.name))
        if isinstance(x, Seq):
            return Seq(go(x.s1, env), go(x.s2, env))
        if isinstance(x, Choice):
            return Choice(go(x.s1, env), go(x.s2, env))
        if isinstance(x, One):
            return One(go(x.s, env))
        if isinstance(x, All):
            return All(go(x.s, env))
        return x

    return go(s, {})


def binders_unique(s: Strategy) -> bool:
    seen: set[str] = set()
    for x in subnodes(s):
        if isinstance(x, Mu):
            if x.var in seen:
                return False
            seen.add(x.var)
    return True


# Classic derived combinators; callers normally freshen() afterwards.


def try_(s: Strategy) -> Strategy:
    return Choice(s, Id())


def repeat(s: Strategy) -> Strategy:
    return Mu("X", Choice(Seq(s, SVar("X")), Id()))


def once_bottom_up(s: Strategy) -> Strategy:
    return Mu("X", Choice(One(SVar("X")), s))


def bottom_up(s: Strategy) -> Strategy:
    return Mu("X", Seq(All(SVar("X")), s))


def once_top_down(s: Strategy) -> Strategy:
    return Mu("X", Choice(s, One(SVar("X"))))


def top_down(s: Strategy) -> Strategy:
    return Mu("X", Seq(s, All(SVar("X"))))


def innermost(s: Strategy) -> Strategy:
    return Mu("X", Seq(All(SVar("X")), Choice(Seq(s, SVar("X")), Id())))


def fmt_strategy(s: Strategy) -> str:
    """Pretty-print with minimal parentheses (`;` over `<+`, right-assoc).

    `mu` is printed at the loosest level — its body extends as far right as
    possible, matching how the parser consumes it — so parse(fmt(s)) == s.
    """
    from .terms import fmt_term

    def go(x: Strategy, prec: int) -> str:
        # prec levels: 0 = choice/mu, 1 = seq operand, 2 = atom position
        if isinstance(x, Id):
            return "Identity"
        if isinstance(x, Fail):
            return "Fail"
        if isinstance(x, Rule):
            return f"[ {fmt_term(x.lhs)} -> {fmt_term(x.rhs)} ]"
        if isinstance(x, SVar):
            return x.name
        if isinstance(x, One):
            return f"one({go(x.s, 0)})"
        if isinstance(x, All):
            return f"all({go(x.s, 0)})"
        if isinstance(x, Mu):
            out = f"mu {x.var}.{go(x.body, 0)}"
            return f"({out})" if prec > 0 else out
        if isinstance(x, Seq):
            out = f"{go(x.s1, 2)} ; {go(x.s2, 1)}"
            return f"({out})" if prec > 1 else out
        if isinstance(x, Choice):
            out = f"{go(x.s1, 1)} <+ {go(x.s2, 0)}"
            return f"({out})" if prec > 0 else out
        raise TypeError(f"not a strategy: {x!r}")

    return go(s, 0)


# ---------------------------------------------------------------------------
# Parsing


class ParseError(Exception):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.line = line
        self.col = col


_PUNCT = ["<+", "->", "(", ")", "[", "]", ",", ";", "=", "|", "."]


def tokenize(text: str) -> list[tuple[str, str, int, int]]:
    """Yield (kind, value, line, col); kinds are 'name' and 'punct'."""
    toks = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                toks.append(("punct", p, line, col))
                i += len(p)
                col += len(p)
                break
        else:
            if c.isalnum() or c == "_":
                j = i
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                toks.append(("name", text[i:j], line, col))
                col += j - i
                i = j
            else:
                raise ParseError(f"unexpected character {c!r}", line, col)
    return toks


@dataclass
class Definition:
    name: str
    params: tuple[str, ...]
    body: "Strategy"  # may contain Call / param SVar placeholders


@dataclass(frozen=True)
class Call:
    """Reference to a named definition, resolved by expand_defs."""

    name: str
    args: tuple["Strategy", ...]


@dataclass
class StrategyProgram:
    signature: Signature
    defs: dict[str, Definition]
    main: str = "mainStrat"


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def error(self, msg: str):
        t = self.peek() or (None, "<eof>", 0, 0)
        raise ParseError(msg + f" (got {t[1]!r})", t[2], t[3])

    def next(self):
        t = self.peek()
        if t is None:
            raise ParseError("unexpected end of input", 0, 0)
        self.pos += 1
        return t

    def expect(self, value: str):
        t = self.next()
        if t[1] != value:
            raise ParseError(f"expected {value!r}, got {t[1]!r}", t[2], t[3])
        return t

    def at(self, value: str) -> bool:
        t = self.peek()
        return t is not None and t[1] == value

    # -- signature section

    def parse_program(self) -> StrategyProgram:
        self.expect("abstract")
        self.expect("syntax")
        decls: list[SymbolDecl] = []
        sorts: list[str] = []
        while True:
            t = self.peek()
            if t is None:
                self.error("missing 'strategies' section")
            if t[1] == "strategies":
                self.next()
                break
            sort = self.next()[1]
            sorts.append(sort)
            self.expect("=")
            decls.extend(self.parse_ctor(sort))
            while self.at("|"):
                self.next()
                decls.extend(self.parse_ctor(sort))
        try:
            sig = Signature(decls, sorts)
        except SignatureError as e:
            raise ParseError(str(e), 0, 0) from e
        defs: dict[str, Definition] = {}
        while self.peek() is not None:
            d = self.parse_def(sig)
            if d.name in defs:
                self.error(f"duplicate definition of {d.name}")
            defs[d.name] = d
        prog = StrategyProgram(sig, defs)
        return prog

    def parse_ctor(self, sort: str) -> list[SymbolDecl]:
        name = self.next()[1]
        self.expect("(")
        domain = []
        if not self.at(")"):
            domain.append(self.next()[1])
            while self.at(","):
                self.next()
                domain.append(self.next()[1])
        self.expect(")")
        return [SymbolDecl(name, tuple(domain), sort)]

    # -- strategy definitions

    def parse_def(self, sig: Signature) -> Definition:
        name = self.next()[1]
        self.expect("(")
        params = []
        if not self.at(")"):
            params.append(self.next()[1])
            while self.at(","):
                self.next()
                params.append(self.next()[1])
        self.expect(")")
        self.expect("=")
        body = self.parse_strat(sig, set(params))
        return Definition(name, tuple(params), body)

    def parse_strat(self, sig, params) -> Strategy:
        return self.parse_choice(sig, params)

    def parse_choice(self, sig, params) -> Strategy:
        left = self.parse_seq(sig, params)
        if self.at("<+"):
            self.next()
            return Choice(left, self.parse_choice(sig, params))
        return left

    def parse_seq(self, sig, params) -> Strategy:
        left = self.parse_atom(sig, params)
        if self.at(";"):
            self.next()
            return Seq(left, self.parse_seq(sig, params))
        return left

    def parse_atom(self, sig, params) -> Strategy:
        t = self.peek()
        if t is None:
            self.error("expected a strategy")
        if t[1] == "(":
            self.next()
            s = self.parse_strat(sig, params)
            self.expect(")")
            return s
        if t[1] == "[":
            return self.parse_rule(sig)
        if t[0] != "name":
            self.error("expected a strategy")
        name = self.next()[1]
        if name == "Identity":
            return Id()
        if name == "Fail":
            return Fail()
        if name == "mu":
            var_tok = self.next()
            if var_tok[0] != "name":
                raise ParseError("mu expects a variable name", var_tok[2], var_tok[3])
            self.expect(".")
            body = self.parse_strat(sig, params)
            return Mu(var_tok[1], body)
        if name in ("one", "all"):
            self.expect("(")
            inner = self.parse_strat(sig, params)
            self.expect(")")
            return One(inner) if name == "one" else All(inner)
        if self.at("("):
            self.next()
            args = []
            if not self.at(")"):
                args.append(self.parse_strat(sig, params))
                while self.at(","):
                    self.next()
                    args.append(self.parse_strat(sig, params))
            self.expect(")")
            return Call(name, tuple(args))
        # bare name: mu-bound variable or definition parameter
        return SVar(name)

    def parse_rule(self, sig: Signature) -> Rule:
        t0 = self.expect("[")
        lhs = self.parse_term(sig)
        self.expect("->")
        rhs = self.parse_term(sig)
        self.expect("]")
        extra = vars_of(rhs) - vars_of(lhs)
        if extra:
            raise ParseError(
                f"rule right-hand side uses variables not bound on the left: "
                f"{', '.join(sorted(extra))}",
                t0[2],
                t0[3],
            )
        return Rule(lhs, rhs)

    def parse_term(self, sig: Signature) -> Term:
        t = self.next()
        if t[0] != "name":
            raise ParseError(f"expected a term, got {t[1]!r}", t[2], t[3])
        name = t[1]
        if self.at("("):
            self.next()
            args = []
            if not self.at(")"):
                args.append(self.parse_term(sig))
                while self.at(","):
                    self.next()
                    args.append(self.parse_term(sig))
            self.expect(")")
            if not sig.is_declared(name):
                raise ParseError(f"undeclared symbol {name}", t[2], t[3])
            if sig.arity(name) != len(args):
                raise ParseError(
                    f"{name} expects {sig.arity(name)} arguments, got {len(args)}",
                    t[2],
                    t[3],
                )
            return App(name, tuple(args))
        if sig.is_declared(name):
            if sig.arity(name) != 0:
                raise ParseError(f"symbol {name} used without arguments", t[2], t[3])
            return App(name, ())
        return Var(name)


def parse_program(text: str) -> StrategyProgram:
    p = _Parser(text)
    prog = p.parse_program()
    return prog


def parse_strategy(text: str, sig: Signature) -> Strategy:
    """Parse a bare strategy expression (no definitions in scope)."""
    p = _Parser(text)
    s = p.parse_strat(sig, set())
    if p.peek() is not None:
        p.error("trailing input after strategy")
    return _resolve_bare(s)


def _resolve_bare(s: Strategy) -> Strategy:
    # bare parses may contain Call nodes only for one/all-like names; reject
    for node in subnodes(s):
        if isinstance(node, Call):
            raise ParseError(f"unknown definition {node.name}", 0, 0)
    return s


def parse_term(text: str, sig: Signature) -> Term:
    p = _Parser(text)
    t = p.parse_term(sig)
    if p.peek() is not None:
        p.error("trailing input after term")
    return t


# ---------------------------------------------------------------------------
# Definition expansion


class ExpansionError(Exception):
    pass


def expand_defs(prog: StrategyProgram, entry: str | None = None) -> Strategy:
    """Inline all definitions reachable from the entry point.

    The result is a closed core strategy with globally unique mu-binders.
    Definitions may not be recursive (recursion goes through `mu`).
    """
    entry = entry or prog.main
    if entry not in prog.defs:
        raise ExpansionError(f"no definition named {entry}")

    expanding: list[str] = []

    def expand(name: str, args: tuple[Strategy, ...]) -> Strategy:
        if name not in prog.defs:
            raise ExpansionError(f"unknown definition {name}")
        if name in expanding:
            cycle = " -> ".join(expanding + [name])
            raise ExpansionError(f"recursive definitions are not allowed: {cycle}")
        d = prog.defs[name]
        if len(args) != len(d.params):
            raise ExpansionError(
                f"{name} takes {len(d.params)} argument(s), got {len(args)}"
            )
        env = dict(zip(d.params, args))
        expanding.append(name)
        try:
            return go(d.body, env, set())
        finally:
            expanding.pop()

    def go(s: Strategy, env: dict[str, Strategy], bound: set[str]) -> Strategy:
        if isinstance(s, Call):
            return expand(s.name, tuple(go(a, env, bound) for a in s.args))
        if isinstance(s, SVar):
            if s.name in bound:
                return s
            if s.name in env:
                return env[s.name]
            if s.name in prog.defs and not prog.defs[s.name].params:
                return expand(s.name, ())
            raise ExpansionError(f"unbound name {s.name}")
        if isinstance(s, Mu):
            return Mu(s.var, go(s.body, env, bound | {s.var}))
        if isinstance(s, Seq):
            return Seq(go(s.s1, env, bound), go(s.s2, env, bound))
        if isinstance(s, Choice):
            return Choice(go(s.s1, env, bound), go(s.s2, env, bound))
        if isinstance(s, One):
            return One(go(s.s, env, bound))
        if isinstance(s, All):
            return All(go(s.s, env, bound))
        return s

    core = expand(entry, ())
    core = freshen(core)
    leftover = free_svars(core)
    if leftover:
        raise ExpansionError(f"expanded strategy is not closed: {sorted(leftover)}")
    return core
