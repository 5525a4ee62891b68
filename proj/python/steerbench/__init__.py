"""Kernel validation, feature extraction and the command-line driver."""

from ._steerbench import (
    IoError,
    PreconditionError,
    dimension_names,
    distance,
    extract,
    relative_proximity,
    rewrite_identifiers,
    run_cli,
    tokenize,
    validate,
    vote_entropy,
)

__all__ = [
    "IoError",
    "PreconditionError",
    "dimension_names",
    "distance",
    "extract",
    "relative_proximity",
    "rewrite_identifiers",
    "run_cli",
    "tokenize",
    "validate",
    "vote_entropy",
]
