"""splashkit: a toolkit for interactive SQL parse correction.

Explains SQL parses as natural-language steps, diffs predicted vs. gold
parses, evaluates correction accuracy, runs feedback-driven beam re-ranking,
and hosts an annotation service for collecting corrective feedback.
"""

from .diff import diff_schema_items, edit_distance, merge_segments, token_edit_script
from .explain import compress_steps, coverage, explain, split_compound
from .library import load_library
from .metrics import correction_accuracy, end_to_end_accuracy, exact_set_match
from .parser import parse_sql
from .queries import CanonicalQuery, schema_items
from .render import render_sql
from .rerank import (
    feedback_match_score,
    near_miss_filter,
    rerank_handcrafted,
    rerank_score,
    rerank_second,
    rerank_uniform,
)
from .schema import Schema, load_schemas
from .template import abstract_template
from .tokens import tokenize

__version__ = "0.1.0"

__all__ = [
    "CanonicalQuery",
    "Schema",
    "abstract_template",
    "compress_steps",
    "correction_accuracy",
    "coverage",
    "diff_schema_items",
    "edit_distance",
    "end_to_end_accuracy",
    "exact_set_match",
    "explain",
    "feedback_match_score",
    "load_library",
    "load_schemas",
    "merge_segments",
    "near_miss_filter",
    "parse_sql",
    "render_sql",
    "rerank_handcrafted",
    "rerank_score",
    "rerank_second",
    "rerank_uniform",
    "schema_items",
    "split_compound",
    "token_edit_script",
    "tokenize",
]
