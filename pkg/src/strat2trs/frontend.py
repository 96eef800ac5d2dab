"""Program-level plumbing: encoding entry points, emitters, and the
differential verification harness.

A compiled program gets one extra entry rule `mainStrat(x) -> phi(x)` (one
per sort in the no-overload sorted mode) so emitted systems expose a stable
top symbol.  The harness samples random well-sorted ground terms, runs the
reference evaluator and the compiled rewrite system side by side, and counts
agreements under the simulation contract: a successful evaluation must match
the normal form exactly, a failure must normalize to the failure marker
applied to the untouched subject, and fuel exhaustion on either side makes
the sample exempt rather than a verdict.
"""

from __future__ import annotations

import csv
import json
import random
import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .antiterm import PlainRule, dedupe_rules
from .encode import Encoding, translate
from .engine import TRS
from .evaluator import FAILURE, OUT_OF_FUEL, default_fuel, evaluate
from .meta import IllFormedMeta, meta_decode, meta_encode, meta_names, translate_meta
from .sorted_encode import translate_sorted
from .strategy import Rule, Strategy, StrategyProgram, expand_defs, subnodes
from .terms import App, Signature, Term, Var, fmt_term

MODES = ("unsorted", "sorted", "sorted-no-overload", "meta")

# The compiled system takes several contractions per evaluation judgment;
# giving the rewrite side a larger budget keeps fuel-exempt counts low
# without hiding disagreements (exhaustion on either side is never a verdict).
ENGINE_FUEL_FACTOR = 10


def random_ground_term(
    sig: Signature,
    rng: random.Random,
    sort: Optional[str] = None,
    max_depth: int = 5,
) -> Term:
    """A random well-sorted ground term of depth <= max_depth.

    At each node the constructor is chosen uniformly among those that can
    still be completed within the remaining depth, so generation always
    terminates even on signatures without shallow constants.
    """
    if sort is None:
        sorts = [s for s in sig.sorts if 0 <= sig.min_depth(s) <= max_depth]
        if not sorts:
            raise ValueError(f"no sort inhabited within depth {max_depth}")
        sort = rng.choice(sorts)

    def build(s: str, budget: int) -> Term:
        opts = [
            d
            for d in sig.of_sort(s)
            if 1 + max((sig.min_depth(c) for c in d.domain), default=0) <= budget
        ]
        if not opts:
            raise ValueError(f"sort {s} uninhabited within depth {budget}")
        d = rng.choice(opts)
        return App(d.name, tuple(build(c, budget - 1) for c in d.domain))

    return build(sort, max_depth)


def subject_sort(sig: Signature, strategy: Strategy) -> str:
    """Sort of the terms a strategy is meant to run on.

    Taken from the left-hand side of the first rewrite rule the strategy
    reaches (leftmost-outermost); a strategy with no rules works on any
    sort, so the first declared one serves.
    """
    for node in subnodes(strategy):
        if isinstance(node, Rule):
            assignments = sig.var_sort_assignments(node.lhs)
            if assignments:
                return assignments[0][0]
    return sig.sorts[0]


def encode_for_mode(
    sig: Signature,
    strategy: Strategy,
    mode: str,
    *,
    context=(),
    share_subterms: bool = False,
) -> Encoding:
    if mode == "unsorted":
        return translate(sig, strategy, context, share_subterms=share_subterms)
    if mode == "sorted":
        return translate_sorted(sig, strategy, context, share_subterms=share_subterms)
    if mode == "sorted-no-overload":
        return translate_sorted(
            sig, strategy, context, share_subterms=share_subterms, no_overload=True
        )
    if mode == "meta":
        return translate_meta(sig, strategy, context, share_subterms=share_subterms)
    raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")


def main_symbol(enc: Encoding, preferred: str = "mainStrat") -> str:
    """Entry-rule head symbol, renamed if the user claimed the name."""
    taken = {d.name for d in enc.signature.decls} | set(enc.fresh_symbols)
    taken |= set(enc.names.values())
    name = preferred
    while name in taken:
        name += "_g"
    return name


def entry_rules(enc: Encoding, main: str) -> list[PlainRule]:
    """`main(x) -> phi(x)`; the no-overload sorted mode gets one per sort."""
    x = Var("x")
    if enc.entry_by_sort is not None:
        return [
            PlainRule(
                App(f"{main}_{s}", (x,)),
                App(enc.entry_for(s), (x,)),
                "entry",
            )
            for s in enc.signature.sorts
        ]
    return [PlainRule(App(main, (x,)), App(enc.entry_symbol, (x,)), "entry")]


@dataclass
class ProgramEncoding:
    """An encoding plus its program entry rules, ready for emission."""

    encoding: Encoding
    main: str
    rules: list[PlainRule]  # entry rules first, then the encoding's rules

    def main_for(self, sort: Optional[str] = None) -> str:
        if self.encoding.entry_by_sort is not None:
            if sort is None:
                raise ValueError(f"{self.encoding.mode} entry needs the subject sort")
            return f"{self.main}_{sort}"
        return self.main


def encode_program(
    program: StrategyProgram,
    mode: str,
    *,
    share_subterms: bool = False,
    collapse_equal_rules: bool = False,
) -> ProgramEncoding:
    strategy = expand_defs(program)
    enc = encode_for_mode(
        program.signature, strategy, mode, share_subterms=share_subterms
    )
    main = main_symbol(enc)
    rules = entry_rules(enc, main) + list(enc.rules)
    if collapse_equal_rules:
        rules = dedupe_rules(rules)
    return ProgramEncoding(enc, main, rules)


# -- differential verification ---------------------------------------------


@dataclass
class Disagreement:
    subject: str
    evaluated: str
    normalized: str


@dataclass
class CheckReport:
    fixture: str
    mode: str
    samples: int
    agreements: int
    disagreements: list[Disagreement]
    fuel_exempt: int
    rules: int
    wall_time: float = field(compare=False, default=0.0)

    @property
    def ok(self) -> bool:
        return not self.disagreements

    def summary(self) -> str:
        return (
            f"{self.fixture} [{self.mode}] samples={self.samples}"
            f" agree={self.agreements} disagree={len(self.disagreements)}"
            f" fuel-exempt={self.fuel_exempt} rules={self.rules}"
            f" time={self.wall_time:.2f}s"
        )


def run_check(
    program: StrategyProgram,
    mode: str,
    samples: int = 200,
    max_depth: int = 5,
    fuel: Optional[int] = None,
    seed: int = 0,
    fixture: str = "",
) -> CheckReport:
    """Differential test: evaluator vs compiled rewrite system.

    Samples ground terms of the program's subject sort (garbage-sorted
    subjects would only ever exercise the failure rules).
    """
    t0 = time.time()
    sig = program.signature
    strategy = expand_defs(program)
    pe = encode_program(program, mode)
    enc = pe.encoding
    trs = TRS(pe.rules)
    limit = default_fuel() if fuel is None else int(fuel)
    mnames = meta_names(sig) if mode == "meta" else None
    rng = random.Random(seed)
    sort = subject_sort(sig, strategy)

    agreements = 0
    exempt = 0
    disagreements: list[Disagreement] = []
    for _ in range(samples):
        subject = random_ground_term(sig, rng, sort=sort, max_depth=max_depth)
        ev = evaluate(strategy, subject, fuel=limit)
        if ev is OUT_OF_FUEL:
            # Exempt regardless of what the rewrite side would do, so don't
            # burn its (much larger) budget finding that out.
            exempt += 1
            continue
        arg = meta_encode(subject, mnames) if mode == "meta" else subject
        entry = pe.main_for(sort if enc.entry_by_sort is not None else None)
        got = trs.normalize(App(entry, (arg,)), fuel=limit * ENGINE_FUEL_FACTOR)
        if got.out_of_fuel:
            exempt += 1
            continue
        r = got.result
        assert r is not None
        if mode == "meta":
            if isinstance(r, App) and r.fn == enc.bot:
                ok = ev is FAILURE and r == App(enc.bot, (arg,))
            else:
                try:
                    ok = ev is not FAILURE and meta_decode(r, sig, mnames) == ev
                except IllFormedMeta:
                    ok = False
        else:
            bot = enc.bot_partner(enc.entry_for(sort if enc.entry_by_sort else None))
            if ev is FAILURE:
                ok = r == App(bot, (subject,))
            else:
                ok = r == ev
        if ok:
            agreements += 1
        else:
            disagreements.append(
                Disagreement(
                    fmt_term(subject),
                    repr(ev) if ev in (FAILURE, OUT_OF_FUEL) else fmt_term(ev),
                    fmt_term(r),
                )
            )
    return CheckReport(
        fixture=fixture,
        mode=mode,
        samples=samples,
        agreements=agreements,
        disagreements=disagreements,
        fuel_exempt=exempt,
        rules=len(trs),
        wall_time=time.time() - t0,
    )


def write_report(reports: Sequence[CheckReport], outdir: str | Path) -> tuple[Path, Path]:
    """report.csv with one row per check, report.png with the agreement bars.

    Wall time is deliberately not written to the files so identical inputs
    produce byte-identical reports.
    """
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "report.csv"
    with csv_path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["fixture", "mode", "samples", "agreements", "disagreements", "fuel_exempt", "rules"]
        )
        for r in reports:
            w.writerow(
                [r.fixture, r.mode, r.samples, r.agreements, len(r.disagreements), r.fuel_exempt, r.rules]
            )

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    labels = [f"{r.fixture}\n{r.mode}" for r in reports]
    xs = range(len(reports))
    fig, ax = plt.subplots(figsize=(max(6, 1.2 * len(reports)), 4.5))
    ax.bar(xs, [r.agreements for r in reports], label="agree", color="#4c9f70")
    ax.bar(
        xs,
        [len(r.disagreements) for r in reports],
        bottom=[r.agreements for r in reports],
        label="disagree",
        color="#c44536",
    )
    ax.bar(
        xs,
        [r.fuel_exempt for r in reports],
        bottom=[r.agreements + len(r.disagreements) for r in reports],
        label="fuel-exempt",
        color="#b5b8b1",
    )
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels, fontsize=7)
    ax.set_ylabel("samples")
    ax.set_title("evaluator vs compiled system")
    ax.legend()
    fig.tight_layout()
    png_path = out / "report.png"
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return csv_path, png_path


# -- emission ----------------------------------------------------------------


def _preorder(rules: Sequence[PlainRule]):
    for r in rules:
        for t in (r.lhs, r.rhs):
            stack = [t]
            while stack:
                x = stack.pop()
                yield x
                if isinstance(x, App):
                    stack.extend(reversed(x.args))


def _mangle_names(rules: Sequence[PlainRule]) -> dict[str, str]:
    """Deterministic TPDB-safe renaming for symbols with awkward characters.

    Already-clean symbol names are never changed; renamed ones avoid every
    clean symbol and every variable name, so the output namespace stays
    collision-free.
    """
    syms: list[str] = []
    var_names: set[str] = set()
    have: set[str] = set()
    for x in _preorder(rules):
        if isinstance(x, Var):
            var_names.add(x.name)
        elif x.fn not in have:
            have.add(x.fn)
            syms.append(x.fn)
    clean = re.compile(r"[A-Za-z0-9_]+\Z")
    taken = var_names | {s for s in syms if clean.match(s)}
    mapping: dict[str, str] = {}
    for name in syms:
        if clean.match(name):
            continue
        cand = re.sub(r"[^A-Za-z0-9_]", "_", name) or "_"
        while cand in taken:
            cand += "_"
        mapping[name] = cand
        taken.add(cand)
    return mapping


def _render(t: Term, mangled: dict[str, str]) -> str:
    if not mangled:
        return fmt_term(t)
    if isinstance(t, Var):
        return t.name
    head = mangled.get(t.fn, t.fn)
    if not t.args:
        return head
    return head + "(" + ",".join(_render(a, mangled) for a in t.args) + ")"


def _rule_vars(rules: Sequence[PlainRule]) -> list[str]:
    seen: list[str] = []
    have: set[str] = set()
    for x in _preorder(rules):
        if isinstance(x, Var) and x.name not in have:
            have.add(x.name)
            seen.append(x.name)
    return seen


def emit_tpdb(rules: Sequence[PlainRule]) -> str:
    """Old TPDB text format: (VAR ...) then (RULES ...), comments last."""
    mangled = _mangle_names(rules)
    lines = [f"(VAR {' '.join(_rule_vars(rules))})"]
    if rules:
        lines.append("(RULES")
        for r in rules:
            lines.append(f"  {_render(r.lhs, mangled)} -> {_render(r.rhs, mangled)}")
        lines.append(")")
    else:
        lines.append("(RULES )")
    if mangled:
        table = " ".join(f"{k}={v}" for k, v in sorted(mangled.items()))
        lines.append(f"(COMMENT renamed symbols: {table})")
    return "\n".join(lines) + "\n"


def emit_text(pe: ProgramEncoding) -> str:
    enc = pe.encoding
    lines = [
        f"# mode: {enc.mode}",
        f"# entry: {pe.main}",
        f"# rules: {len(pe.rules)}",
    ]
    for r in pe.rules:
        lines.append(f"{fmt_term(r.lhs)} -> {fmt_term(r.rhs)}")
    return "\n".join(lines) + "\n"


def emit_json(pe: ProgramEncoding) -> str:
    enc = pe.encoding
    doc = {
        "mode": enc.mode,
        "entry": pe.main,
        "bot": enc.bot,
        "fresh_symbols": enc.fresh_symbols,
        "rules": [
            {
                "lhs": fmt_term(r.lhs),
                "rhs": fmt_term(r.rhs),
                "provenance": r.provenance,
            }
            for r in pe.rules
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def counts_rows(program: StrategyProgram) -> list[tuple[str, int, int]]:
    """(mode, rules, collapsed) per encoding mode, entry rules included."""
    rows = []
    for mode in ("unsorted", "sorted", "meta"):
        pe = encode_program(program, mode)
        rows.append((mode, len(pe.rules), len(dedupe_rules(pe.rules))))
    return rows
