"""Fuel-bounded big-step interpreter for the strategy calculus.

This is the reference semantics every compiled rule system is tested
against.  Evaluation is deterministic: `one` commits to the leftmost child
on which the argument strategy succeeds, and `choice` always tries its left
branch first.

The interpreter runs on an explicit frame stack, so derivations deeper than
the host recursion limit are fine.  Fuel counts inference-rule applications
— one unit whenever a judgment `S · t` is started — making the budget
proportional to the size of the derivation tree rather than to any
representation detail.  Running out of fuel aborts the whole evaluation with
`OUT_OF_FUEL`, which is a divergence proxy, never a strategy failure.
"""

from __future__ import annotations

import os
from typing import Optional, Union

from .strategy import All, Choice, Fail, Id, Mu, One, Rule, Seq, Strategy, SVar, binders_unique, freshen
from .terms import App, Term, apply_subst, match

DEFAULT_FUEL = 100_000


def default_fuel() -> int:
    """Default step budget; the STRAT2TRS_FUEL environment variable overrides it."""
    raw = os.environ.get("STRAT2TRS_FUEL")
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return DEFAULT_FUEL


class _Sentinel:
    __slots__ = ("_name",)

    def __init__(self, name: str):
        self._name = name

    def __repr__(self):
        return self._name


FAILURE = _Sentinel("Failure")
OUT_OF_FUEL = _Sentinel("OutOfFuel")

EvalOutcome = Union[Term, _Sentinel]  # a ground Term on success


class UnboundStrategyVariable(Exception):
    """A strategy variable was evaluated with no binding in scope.

    This is a precondition violation (an open strategy), deliberately distinct
    from strategy failure.
    """


# frame tags for the machine's control stack
_SEQ, _CHOICE, _ONE, _ALL = 0, 1, 2, 3


def evaluate(
    strategy: Strategy,
    subject: Term,
    fuel: Optional[int] = None,
    context: Optional[dict[str, Strategy]] = None,
) -> EvalOutcome:
    """Evaluate `strategy` on ground `subject`; return the result term,
    FAILURE, or OUT_OF_FUEL.

    `context` provides bindings for free strategy variables (the judgment's
    Γ); `mu` extends it during evaluation.  Binders are renamed apart on
    entry if the input violates the hygiene convention.
    """
    if fuel is None:
        fuel = default_fuel()
    if not binders_unique(strategy):
        strategy = freshen(strategy, set(context or ()))
    env: dict[str, Strategy] = dict(context or {})

    stack: list[tuple] = []
    # current machine state: either evaluating (s, t) or returning `outcome`
    s: Optional[Strategy] = strategy
    t = subject
    outcome: EvalOutcome = FAILURE

    while True:
        if s is not None:
            fuel -= 1
            if fuel < 0:
                return OUT_OF_FUEL
            kind = type(s)
            if kind is Id:
                outcome, s = t, None
            elif kind is Fail:
                outcome, s = FAILURE, None
            elif kind is Rule:
                sigma = match(s.lhs, t)
                outcome = FAILURE if sigma is None else apply_subst(sigma, s.rhs)
                s = None
            elif kind is Seq:
                stack.append((_SEQ, s.s2))
                s = s.s1
            elif kind is Choice:
                stack.append((_CHOICE, s.s2, t))
                s = s.s1
            elif kind is Mu:
                env[s.var] = s.body
                s = s.body
            elif kind is SVar:
                body = env.get(s.name)
                if body is None:
                    raise UnboundStrategyVariable(s.name)
                s = body
            elif kind is One:
                if not isinstance(t, App) or not t.args:
                    outcome, s = FAILURE, None  # one() always fails on constants
                else:
                    stack.append((_ONE, s.s, t, 0))
                    s, t = s.s, t.args[0]
            elif kind is All:
                if not isinstance(t, App) or not t.args:
                    outcome, s = t, None  # all() always succeeds on constants
                else:
                    stack.append((_ALL, s.s, t, 0, []))
                    s, t = s.s, t.args[0]
            else:
                raise TypeError(f"not a strategy: {s!r}")
            if s is not None:
                continue

        # deliver `outcome` to the innermost pending frame
        if not stack:
            return outcome
        frame = stack.pop()
        tag = frame[0]
        if tag == _SEQ:
            if outcome is FAILURE:
                continue  # sequence fails as a whole
            s, t = frame[1], outcome
        elif tag == _CHOICE:
            if outcome is FAILURE:
                s, t = frame[1], frame[2]  # retry right branch on the subject
            # else: success propagates unchanged
        elif tag == _ONE:
            _, inner, parent, i = frame
            if outcome is FAILURE:
                if i + 1 < len(parent.args):
                    stack.append((_ONE, inner, parent, i + 1))
                    s, t = inner, parent.args[i + 1]
                # else: failed on every child — FAILURE propagates
            else:
                args = list(parent.args)
                args[i] = outcome
                outcome = App(parent.fn, tuple(args))
        else:  # _ALL
            _, inner, parent, i, acc = frame
            if outcome is FAILURE:
                continue  # all() fails as soon as one child does
            acc.append(outcome)
            if i + 1 < len(parent.args):
                stack.append((_ALL, inner, parent, i + 1, acc))
                s, t = inner, parent.args[i + 1]
            else:
                outcome = App(parent.fn, tuple(acc))
