"""Plain term rewriting over compiled rule sets.

The workhorse is a memoizing leftmost-innermost normalizer: subterms are
normalized bottom-up, every contraction consumes one unit of fuel, and each
normalized term is cached together with the number of contractions it cost.
Cache hits charge that recorded cost again, so the fuel spent on a subject is
the same whether or not the cache is warm -- runs are reproducible and fuel
exhaustion is meaningful even with sharing.

A separate single-step interface supports leftmost-innermost,
leftmost-outermost and seeded random redex selection, for traces and for
cross-checking the normalizer against naive rewriting.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .antiterm import PlainRule
from .terms import App, Position, Term, Var, apply_subst, match, replace_at, term_size

DEFAULT_ENGINE_FUEL = 100_000

POLICIES = ("li", "lo", "random")


class _OutOfFuel(Exception):
    pass


@dataclass(frozen=True)
class Outcome:
    """Result of a bounded rewrite: the normal form, or None with fuel spent.

    The steppers record the last term reached on fuel exhaustion; the
    memoizing normalizer works frame-by-frame and has no whole intermediate
    term to report, so it leaves `last` unset.
    """

    result: Optional[Term]
    steps: int
    last: Optional[Term] = None

    @property
    def out_of_fuel(self) -> bool:
        return self.result is None


class TRS:
    """An ordered list of rewrite rules, indexed by left-hand-side head symbol.

    Rule order is significant: root rewriting always applies the first rule
    that matches, which keeps runs deterministic for overlapping rule sets.
    """

    def __init__(self, rules: Sequence[PlainRule]):
        self.rules = tuple(rules)
        self._index: dict[str, list[tuple[Term, Term, int]]] = {}
        for i, r in enumerate(self.rules):
            assert isinstance(r.lhs, App), f"rule with variable lhs: {r!r}"
            self._index.setdefault(r.lhs.fn, []).append((r.lhs, r.rhs, i))
        self._memo: dict[Term, tuple[Term, int]] = {}

    def __len__(self) -> int:
        return len(self.rules)

    def clear_memo(self) -> None:
        self._memo.clear()

    def root_step(self, t: Term) -> Optional[Term]:
        """Contract `t` at the root with the first matching rule, if any."""
        if isinstance(t, Var):
            return None
        for lhs, rhs, _i in self._index.get(t.fn, ()):
            m = match(lhs, t)
            if m is not None:
                return apply_subst(m, rhs)
        return None

    def root_steps(self, t: Term) -> list[tuple[Term, int]]:
        """Contractions of `t` at the root under every matching rule."""
        if isinstance(t, Var):
            return []
        out = []
        for lhs, rhs, i in self._index.get(t.fn, ()):
            m = match(lhs, t)
            if m is not None:
                out.append((apply_subst(m, rhs), i))
        return out

    # -- fast normalization ------------------------------------------------
    def _norm(self, t: Term, budget: list[int]):
        memo = self._memo
        if isinstance(t, Var):
            return t
        hit = memo.get(t)
        if hit is not None:
            budget[0] -= hit[1]
            if budget[0] < 0:
                raise _OutOfFuel
            return hit[0]
        entry = budget[0]
        cur = t
        if t.args:
            nfs = []
            for a in t.args:
                nfs.append((yield a))
            cur = App(t.fn, tuple(nfs))
            if cur != t:
                hit = memo.get(cur)
                if hit is not None:
                    budget[0] -= hit[1]
                    if budget[0] < 0:
                        raise _OutOfFuel
                    memo[t] = (hit[0], entry - budget[0])
                    return hit[0]
        u = self.root_step(cur)
        if u is None:
            memo[t] = (cur, entry - budget[0])
            memo.setdefault(cur, (cur, 0))
            return cur
        budget[0] -= 1
        if budget[0] < 0:
            raise _OutOfFuel
        nf = yield u
        memo[t] = (nf, entry - budget[0])
        return nf

    def normalize(self, t: Term, fuel: Optional[int] = None) -> Outcome:
        """Leftmost-innermost normal form of `t`, bounded by `fuel` contractions."""
        limit = DEFAULT_ENGINE_FUEL if fuel is None else int(fuel)
        budget = [limit]
        stack = [self._norm(t, budget)]
        value: Optional[Term] = None
        try:
            while stack:
                try:
                    req = stack[-1].send(value)
                except StopIteration as done:
                    stack.pop()
                    value = done.value
                    continue
                stack.append(self._norm(req, budget))
                value = None
        except _OutOfFuel:
            return Outcome(None, limit)
        assert value is not None
        return Outcome(value, limit - budget[0])

    # -- single steps, traces, reducts --------------------------------------
    def _order(self, t: Term, policy: str) -> Iterator[tuple[Position, Term]]:
        if policy == "lo":
            stack: list[tuple[Position, Term]] = [((), t)]
            while stack:
                pos, x = stack.pop()
                yield pos, x
                if isinstance(x, App):
                    for i in range(len(x.args) - 1, -1, -1):
                        stack.append((pos + (i + 1,), x.args[i]))
        else:
            work: list[tuple[Term, Position, bool]] = [(t, (), False)]
            while work:
                x, pos, expanded = work.pop()
                if expanded or not isinstance(x, App) or not x.args:
                    yield pos, x
                    continue
                work.append((x, pos, True))
                for i in range(len(x.args) - 1, -1, -1):
                    work.append((x.args[i], pos + (i + 1,), False))

    def step(
        self, t: Term, policy: str = "li", rng: Optional[random.Random] = None
    ) -> Optional[tuple[Term, int, Position]]:
        """One rewrite step of `t` as (result, rule index, position), or None
        when `t` is a normal form.

        li picks the leftmost-innermost redex, lo the leftmost-outermost one,
        random a uniform choice over all (rule, position) redexes from the
        given generator.
        """
        assert policy in POLICIES, f"unknown policy {policy!r}"
        if policy == "random":
            cands = [
                (pos, u, i)
                for pos, x in self._order(t, "li")
                for u, i in self.root_steps(x)
            ]
            if not cands:
                return None
            pos, u, i = (rng or random).choice(cands)
            return replace_at(t, pos, u), i, pos
        for pos, x in self._order(t, policy):
            if isinstance(x, Var):
                continue
            for lhs, rhs, i in self._index.get(x.fn, ()):
                m = match(lhs, x)
                if m is not None:
                    return replace_at(t, pos, apply_subst(m, rhs)), i, pos
        return None

    def rewrite(
        self,
        t: Term,
        fuel: Optional[int] = None,
        policy: str = "li",
        rng: Optional[random.Random] = None,
    ) -> Outcome:
        """Stepwise rewriting to normal form; slower than normalize but policy-aware."""
        limit = DEFAULT_ENGINE_FUEL if fuel is None else int(fuel)
        steps = 0
        while steps < limit:
            nxt = self.step(t, policy, rng)
            if nxt is None:
                return Outcome(t, steps)
            t = nxt[0]
            steps += 1
        if self.step(t, policy, rng) is None:
            return Outcome(t, steps)
        return Outcome(None, steps, last=t)

    def trace(
        self,
        t: Term,
        fuel: Optional[int] = None,
        policy: str = "li",
        rng: Optional[random.Random] = None,
    ) -> tuple[list[Term], Outcome]:
        """The rewrite sequence from `t` (inclusive) plus its outcome."""
        limit = DEFAULT_ENGINE_FUEL if fuel is None else int(fuel)
        seq = [t]
        steps = 0
        while steps < limit:
            nxt = self.step(t, policy, rng)
            if nxt is None:
                return seq, Outcome(t, steps)
            t = nxt[0]
            seq.append(t)
            steps += 1
        if self.step(t, policy, rng) is None:
            return seq, Outcome(t, steps)
        return seq, Outcome(None, steps, last=t)

    def trace_lines(
        self, t: Term, fuel: Optional[int] = None, policy: str = "li"
    ) -> list[str]:
        """One line per step: `<step#> <position> <rule-id> <term-size>`."""
        lines = []
        limit = DEFAULT_ENGINE_FUEL if fuel is None else int(fuel)
        for n in range(limit):
            nxt = self.step(t, policy)
            if nxt is None:
                break
            t, rid, pos = nxt
            where = ".".join(map(str, pos)) or "eps"
            lines.append(f"{n + 1} {where} {rid} {term_size(t)}")
        return lines

    def reducts(self, t: Term) -> list[Term]:
        """One-step reducts of `t` under every rule at every position.

        Set semantics with deterministic order: duplicates reachable by
        different rule/position pairs appear once, first occurrence wins.
        """
        out: list[Term] = []
        seen: set[Term] = set()
        for pos, x in self._order(t, "lo"):
            if isinstance(x, Var):
                continue
            for lhs, rhs, _i in self._index.get(x.fn, ()):
                m = match(lhs, x)
                if m is not None:
                    u = replace_at(t, pos, apply_subst(m, rhs))
                    if u not in seen:
                        seen.add(u)
                        out.append(u)
        return out

    def is_normal_form(self, t: Term) -> bool:
        return all(
            self.root_step(x) is None for _pos, x in self._order(t, "lo")
        )
