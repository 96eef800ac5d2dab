"""First-order terms, signatures, matching and substitution.

Terms are immutable trees with structural equality and precomputed hashes.
Signatures are many-sorted; the unsorted world is the same machinery with
every sort collapsed to a single one (`TOP_SORT`).

Variable equality is by name only; the optional sort annotation is metadata
used by the sort checker and never participates in matching or hashing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

TOP_SORT = "Any"


class Var:
    __slots__ = ("name", "sort", "_hash")

    def __init__(self, name: str, sort: Optional[str] = None):
        self.name = name
        self.sort = sort
        self._hash = hash(("var", name))

    def __eq__(self, other):
        return self is other or (isinstance(other, Var) and other.name == self.name)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Var({self.name!r})" if self.sort is None else f"Var({self.name!r}:{self.sort})"


class App:
    __slots__ = ("fn", "args", "_hash")

    def __init__(self, fn: str, args: Sequence["Term"] = ()):
        self.fn = fn
        self.args = args if isinstance(args, tuple) else tuple(args)
        self._hash = hash((fn, self.args))

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, App) or self._hash != other._hash:
            return False
        # iterative: terms can be deeper than the recursion limit
        stack = [(self, other)]
        while stack:
            a, b = stack.pop()
            if a is b:
                continue
            if isinstance(a, Var):
                if not isinstance(b, Var) or a.name != b.name:
                    return False
                continue
            if (
                not isinstance(b, App)
                or a.fn != b.fn
                or len(a.args) != len(b.args)
                or a._hash != b._hash
            ):
                return False
            stack.extend(zip(a.args, b.args))
        return True

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"App({fmt_term(self)})"


Term = Var | App


def mk(fn: str, *args: Term) -> App:
    return App(fn, args)


def fmt_term(t: Term) -> str:
    """Render in prefix syntax; constants print without parentheses."""
    out: list[str] = []
    stack: list[object] = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, str):
            out.append(x)
        elif isinstance(x, Var):
            out.append(x.name)
        elif isinstance(x, App) and not x.args:
            out.append(x.fn)
        elif isinstance(x, App):
            out.append(x.fn + "(")
            stack.append(")")
            for i, a in enumerate(reversed(x.args)):
                stack.append(a)
                if i != len(x.args) - 1:
                    stack.append(",")
        else:  # pattern nodes from the schema language define their own repr
            out.append(repr(x))
    return "".join(out)


def term_size(t: Term) -> int:
    n = 0
    stack = [t]
    while stack:
        x = stack.pop()
        n += 1
        if isinstance(x, App):
            stack.extend(x.args)
    return n


def term_depth(t: Term) -> int:
    best = 0
    stack = [(t, 1)]
    while stack:
        x, d = stack.pop()
        if d > best:
            best = d
        if isinstance(x, App):
            stack.extend((a, d + 1) for a in x.args)
    return best


def is_ground(t: Term) -> bool:
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            return False
        stack.extend(x.args)
    return True


def var_occurrences(t: Term) -> list[Var]:
    """All variable occurrences, left to right (with repetitions)."""
    out: list[Var] = []
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            out.append(x)
        else:
            stack.extend(reversed(x.args))
    return out


def vars_of(t: Term) -> set[str]:
    return {v.name for v in var_occurrences(t)}


def is_linear(t: Term) -> bool:
    occ = [v.name for v in var_occurrences(t)]
    return len(occ) == len(set(occ))


def match(pattern: Term, subject: Term) -> Optional[dict[str, Term]]:
    """Syntactic matching; non-linear patterns require equal bound subterms."""
    binding: dict[str, Term] = {}
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            seen = binding.get(p.name)
            if seen is None:
                binding[p.name] = s
            elif seen != s:
                return None
        else:
            if not isinstance(s, App) or s.fn != p.fn or len(s.args) != len(p.args):
                return None
            stack.extend(zip(p.args, s.args))
    return binding


def apply_subst(sigma: dict[str, Term], t: Term) -> Term:
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    if not t.args:
        return t
    args = tuple(apply_subst(sigma, a) for a in t.args)
    return App(t.fn, args)


Position = tuple[int, ...]


def positions(t: Term) -> Iterator[tuple[Position, Term]]:
    """Preorder traversal yielding (position, subterm); child indices are 1-based."""
    stack: list[tuple[Position, Term]] = [((), t)]
    while stack:
        pos, x = stack.pop()
        yield pos, x
        if isinstance(x, App):
            for i in range(len(x.args) - 1, -1, -1):
                stack.append((pos + (i + 1,), x.args[i]))


def subterm_at(t: Term, pos: Iterable[int]) -> Term:
    for i in pos:
        if not isinstance(t, App) or not 1 <= i <= len(t.args):
            raise IndexError(f"invalid position {tuple(pos)} in {fmt_term(t)}")
        t = t.args[i - 1]
    return t


def replace_at(t: Term, pos: Sequence[int], s: Term) -> Term:
    if not pos:
        return s
    i = pos[0]
    if not isinstance(t, App) or not 1 <= i <= len(t.args):
        raise IndexError(f"invalid position {tuple(pos)} in {fmt_term(t)}")
    args = list(t.args)
    args[i - 1] = replace_at(args[i - 1], pos[1:], s)
    return App(t.fn, tuple(args))


class SignatureError(Exception):
    pass


class IllSortedError(Exception):
    pass


@dataclass(frozen=True)
class SymbolDecl:
    name: str
    domain: tuple[str, ...]
    codomain: str

    @property
    def arity(self) -> int:
        return len(self.domain)


class Signature:
    """Ordered list of constructor declarations over a set of sorts.

    Declaration order is load-bearing: anti-term expansion and rule emission
    enumerate symbols in this order, which keeps all output reproducible.
    A name may be declared several times only with pairwise distinct domains
    (overloading, used for generated symbols in the sorted encoding).
    """

    def __init__(self, decls: Sequence[SymbolDecl], sorts: Optional[Sequence[str]] = None):
        self.decls: tuple[SymbolDecl, ...] = tuple(decls)
        if sorts is None:
            seen: dict[str, None] = {}
            for d in self.decls:
                seen.setdefault(d.codomain, None)
            sorts = list(seen)
        self.sorts: tuple[str, ...] = tuple(dict.fromkeys(sorts))
        declared = set(self.sorts)
        self._by_name: dict[str, list[SymbolDecl]] = {}
        for d in self.decls:
            if d.codomain not in declared or any(s not in declared for s in d.domain):
                raise SignatureError(f"undeclared sort in profile of {d.name}")
            bucket = self._by_name.setdefault(d.name, [])
            if any(prev.domain == d.domain for prev in bucket):
                raise SignatureError(f"ambiguous redeclaration of {d.name}{d.domain}")
            bucket.append(d)
        self._min_depth = self._compute_min_depths()

    def __repr__(self):
        return f"Signature({len(self.decls)} symbols, sorts={list(self.sorts)})"

    def decls_of(self, name: str) -> list[SymbolDecl]:
        return self._by_name.get(name, [])

    def is_declared(self, name: str) -> bool:
        return name in self._by_name

    def arity(self, name: str) -> int:
        ds = self.decls_of(name)
        if not ds:
            raise SignatureError(f"unknown symbol {name}")
        ar = ds[0].arity
        if any(d.arity != ar for d in ds):
            raise SignatureError(f"symbol {name} overloaded at different arities")
        return ar

    def of_sort(self, sort: str) -> list[SymbolDecl]:
        return [d for d in self.decls if d.codomain == sort]

    def constants(self, sort: Optional[str] = None) -> list[SymbolDecl]:
        return [d for d in self.decls if d.arity == 0 and (sort is None or d.codomain == sort)]

    def non_constants(self, sort: Optional[str] = None) -> list[SymbolDecl]:
        return [d for d in self.decls if d.arity > 0 and (sort is None or d.codomain == sort)]

    def extended(self, extra: Sequence[SymbolDecl], extra_sorts: Sequence[str] = ()) -> "Signature":
        return Signature(list(self.decls) + list(extra), list(self.sorts) + list(extra_sorts))

    def collapse(self) -> "Signature":
        """Single-sort view: the unsorted encoding is the sorted one over this."""
        decls, seen = [], set()
        for d in self.decls:
            if d.name in seen:
                continue
            seen.add(d.name)
            decls.append(SymbolDecl(d.name, (TOP_SORT,) * d.arity, TOP_SORT))
        return Signature(decls, [TOP_SORT])

    def _compute_min_depths(self) -> dict[str, int]:
        INF = float("inf")
        depth: dict[str, float] = {s: INF for s in self.sorts}
        changed = True
        while changed:
            changed = False
            for d in self.decls:
                need = 1 + max((depth[s] for s in d.domain), default=0)
                if need < depth[d.codomain]:
                    depth[d.codomain] = need
                    changed = True
        return {s: (int(v) if v != INF else -1) for s, v in depth.items()}

    def min_depth(self, sort: str) -> int:
        """Depth of the shallowest ground term of `sort`; -1 if uninhabited."""
        return self._min_depth[sort]

    def sort_of(self, t: Term, var_env: Optional[dict[str, str]] = None) -> str:
        """Sort of a term, resolving overloads bottom-up; raises IllSortedError."""
        memo: dict[Term, str] = {}
        order: list[Term] = []
        stack: list[tuple[Term, bool]] = [(t, False)]
        while stack:
            x, expanded = stack.pop()
            if x in memo:
                continue
            if isinstance(x, Var):
                s = x.sort if x.sort is not None else (var_env or {}).get(x.name)
                if s is None:
                    raise IllSortedError(f"variable {x.name} has no sort annotation")
                memo[x] = s
                continue
            if expanded:
                arg_sorts = tuple(memo[a] for a in x.args)
                cands = [d for d in self.decls_of(x.fn) if d.domain == arg_sorts]
                if not cands:
                    raise IllSortedError(
                        f"ill-sorted term at {x.fn}: no profile {x.fn}:{arg_sorts}"
                    )
                memo[x] = cands[0].codomain
            else:
                stack.append((x, True))
                stack.extend((a, False) for a in x.args)
        return memo[t]

    def var_sort_assignments(self, t: Term) -> list[tuple[str, dict[str, str]]]:
        """All (term sort, variable-sort env) pairs making `t` well-sorted."""
        results: list[tuple[str, dict[str, str]]] = []

        def go(x: Term, env: dict[str, str]) -> list[tuple[str, dict[str, str]]]:
            if isinstance(x, Var):
                if x.name in env:
                    return [(env[x.name], env)]
                if x.sort is not None:
                    return [(x.sort, {**env, x.name: x.sort})]
                return [(s, {**env, x.name: s}) for s in self.sorts]
            outcomes = []
            for d in self.decls_of(x.fn):
                if d.arity != len(x.args):
                    continue
                partial = [({}, env)]
                ok = True
                for a, want in zip(x.args, d.domain):
                    nxt = []
                    for _, e in partial:
                        for got, e2 in go(a, e):
                            if got == want:
                                nxt.append(({}, e2))
                    partial = nxt
                    if not partial:
                        ok = False
                        break
                if ok:
                    outcomes.extend((d.codomain, e) for _, e in partial)
            return outcomes

        seen = set()
        for sort, env in go(t, {}):
            key = (sort, tuple(sorted(env.items())))
            if key not in seen:
                seen.add(key)
                results.append((sort, env))
        return results
