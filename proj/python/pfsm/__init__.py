"""Multi-pattern, all-occurrences regular expression matching."""

from ._core import (
    Pfsm,
    PfsmError,
    PatternError,
    Scanner,
    oracle_matches,
    parse_check,
)

__all__ = [
    "Pfsm",
    "PfsmError",
    "PatternError",
    "Scanner",
    "oracle_matches",
    "parse_check",
]
