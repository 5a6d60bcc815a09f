"""Python bindings for the CO-STAR toolkit."""

from ._core import (
    EOS,
    SEP,
    ParseError,
    eval_prefix,
    ingest,
    parse_output,
    parse_tuple,
    relations,
    render_tuple,
    serialize,
    split_posts,
    validate,
)

__all__ = [
    "EOS",
    "SEP",
    "ParseError",
    "eval_prefix",
    "ingest",
    "parse_output",
    "parse_tuple",
    "relations",
    "render_tuple",
    "serialize",
    "split_posts",
    "validate",
]
