"""Compile programmable rewriting strategies into plain term rewriting systems.

The package provides a reference big-step interpreter for the strategy
calculus (id, fail, rewrite rules, `;`, `<+`, one, all, mu) and three
faithful translations to plain TRSs — unsorted, many-sorted, and a
signature-independent meta-level encoding — together with a rewrite engine,
a differential-testing harness, and TPDB-format emission for termination
provers.
"""

from .terms import App, Signature, SymbolDecl, Term, Var, match, apply_subst, fmt_term
from .strategy import (
    All,
    Choice,
    Fail,
    Id,
    Mu,
    One,
    Rule,
    Seq,
    SVar,
    expand_defs,
    parse_program,
    parse_strategy,
    parse_term,
)
from .evaluator import FAILURE, OUT_OF_FUEL, evaluate
from .encode import Encoding, TranslationError, translate
from .sorted_encode import translate_sorted, translate_sorted_no_overload
from .meta import meta_decode, meta_encode, translate_meta
from .engine import TRS, Outcome
from .frontend import (
    CheckReport,
    emit_json,
    emit_text,
    emit_tpdb,
    encode_program,
    run_check,
)

__all__ = [
    "App",
    "Var",
    "Term",
    "Signature",
    "SymbolDecl",
    "match",
    "apply_subst",
    "fmt_term",
    "Id",
    "Fail",
    "Rule",
    "Seq",
    "Choice",
    "One",
    "All",
    "Mu",
    "SVar",
    "parse_program",
    "parse_strategy",
    "parse_term",
    "expand_defs",
    "evaluate",
    "FAILURE",
    "OUT_OF_FUEL",
    "Encoding",
    "TranslationError",
    "translate",
    "translate_sorted",
    "translate_sorted_no_overload",
    "translate_meta",
    "meta_encode",
    "meta_decode",
    "TRS",
    "Outcome",
    "CheckReport",
    "encode_program",
    "run_check",
    "emit_tpdb",
    "emit_text",
    "emit_json",
]
