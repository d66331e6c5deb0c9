"""A small expression language for stating and checking truncated identities."""

from .corpus import QidSource, bundled_corpus, bundled_path, load_qid, parse_qid
from .evaluate import (
    CaseResult,
    DSLEvalError,
    DSLPoleError,
    RangeReport,
    UnboundParameterError,
    evaluate,
    free_parameters,
    verify_range,
)
from .syntax import BUILTINS, DSLError, DSLSyntaxError, parse, render, tokenize

eval = evaluate  # noqa: A001 - the operation's public name

__all__ = [
    "BUILTINS",
    "CaseResult",
    "DSLError",
    "DSLEvalError",
    "DSLPoleError",
    "DSLSyntaxError",
    "QidSource",
    "RangeReport",
    "UnboundParameterError",
    "bundled_corpus",
    "bundled_path",
    "evaluate",
    "free_parameters",
    "load_qid",
    "parse",
    "parse_qid",
    "render",
    "tokenize",
    "verify_range",
]
