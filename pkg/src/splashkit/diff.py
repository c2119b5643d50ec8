"""Edit-segment diffing between predicted and gold parses, edit
classification, and corpus-level error reports."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .queries import CanonicalQuery, schema_items
from .render import render_sql
from .schema import Schema
from .tokens import tokenize

SQL_KEYWORDS = frozenset(
    "select from join on where group by having order limit distinct count sum avg "
    "min max and or not in like between intersect union except asc desc".split()
)

_OPERATOR_TOKENS = frozenset({"=", "!=", "<>", "<", "<=", ">", ">=", "+", "-", "*", "/"})

# Figure-5-style rollup of keywords into report categories; data, not code.
KEYWORD_ROLLUP = {
    "group": "aggregation", "by": "aggregation", "having": "aggregation",
    "sum": "aggregation", "avg": "aggregation", "min": "aggregation",
    "max": "aggregation", "count": "count", "distinct": "distinct",
}


@dataclass(frozen=True)
class EditOp:
    """One token-level edit; position indexes the predicted sequence."""

    kind: str  # replace | insert | delete
    position: int
    removed: Optional[str] = None
    added: Optional[str] = None


@dataclass(frozen=True)
class EditSegment:
    """A maximal run of same-kind edits at consecutive predicted positions."""

    kind: str
    position: int
    removed: tuple = ()
    added: tuple = ()

    def __post_init__(self):
        if self.kind == "replace" and (not self.removed or not self.added):
            raise ValueError("replace segment needs both removed and added tokens")
        if self.kind == "insert" and self.removed:
            raise ValueError("insert segment cannot remove tokens")
        if self.kind == "delete" and self.added:
            raise ValueError("delete segment cannot add tokens")

    @property
    def tokens(self) -> tuple:
        return self.removed + self.added


@dataclass(frozen=True)
class ErrorReport:
    distance_histogram: dict
    op_distribution: dict  # kind -> fraction
    single_token_fraction: float
    single_token_class_distribution: dict  # category -> fraction
    keyword_histogram: dict  # keyword -> {kind: count}
    corpus_size: int = 0


def token_edit_script(pred: list, gold: list) -> list[EditOp]:
    """Minimum-cost (unit costs) token edit script turning pred into gold.

    The backtrace is deterministic: on cost ties it prefers replace, and
    breaks a delete-vs-insert tie by comparing the two tokens involved.
    The token rule makes the chosen path mirror exactly under argument
    swap (deletes become inserts and vice versa), so segment counts are
    swap-symmetric and downstream golden files are stable.
    """
    n, m = len(pred), len(gold)
    dist = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        dist[i][0] = i
    for j in range(m + 1):
        dist[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            same = pred[i - 1] == gold[j - 1]
            dist[i][j] = min(
                dist[i - 1][j - 1] + (0 if same else 1),
                dist[i - 1][j] + 1,
                dist[i][j - 1] + 1,
            )
    ops: list[EditOp] = []
    i, j = n, m
    while i > 0 or j > 0:
        here = dist[i][j]
        if i > 0 and j > 0 and pred[i - 1] == gold[j - 1] and dist[i - 1][j - 1] == here:
            i, j = i - 1, j - 1
            continue
        if i > 0 and j > 0 and dist[i - 1][j - 1] + 1 == here:
            ops.append(EditOp("replace", i - 1, removed=pred[i - 1], added=gold[j - 1]))
            i, j = i - 1, j - 1
            continue
        can_delete = i > 0 and dist[i - 1][j] + 1 == here
        can_insert = j > 0 and dist[i][j - 1] + 1 == here
        if can_delete and can_insert:
            # Equal tokens can't tie here (the match diagonal would have
            # been taken), so the comparison is a strict, swap-mirroring rule.
            can_delete = str(pred[i - 1]) < str(gold[j - 1])
        if can_delete:
            ops.append(EditOp("delete", i - 1, removed=pred[i - 1]))
            i -= 1
        else:
            ops.append(EditOp("insert", i, added=gold[j - 1]))
            j -= 1
    ops.reverse()
    return ops


def merge_segments(script: list[EditOp]) -> list[EditSegment]:
    """Fuse consecutive-position edits of the same kind into segments."""
    segments: list[EditSegment] = []
    for op in script:
        if segments:
            last = segments[-1]
            if last.kind == op.kind and _adjacent(last, op):
                removed = last.removed + ((op.removed,) if op.removed is not None else ())
                added = last.added + ((op.added,) if op.added is not None else ())
                segments[-1] = EditSegment(last.kind, last.position, removed, added)
                continue
        segments.append(
            EditSegment(
                op.kind,
                op.position,
                removed=(op.removed,) if op.removed is not None else (),
                added=(op.added,) if op.added is not None else (),
            )
        )
    return segments


def _adjacent(segment: EditSegment, op: EditOp) -> bool:
    if segment.kind == "insert":
        # Inserts land between predicted tokens; a run shares one position.
        return op.position == segment.position
    return op.position == segment.position + len(segment.removed)


def query_tokens(query: CanonicalQuery) -> list[str]:
    return tokenize(render_sql(query), mode="sql")


def diff_segments(pred: CanonicalQuery, gold: CanonicalQuery) -> list[EditSegment]:
    return merge_segments(token_edit_script(query_tokens(pred), query_tokens(gold)))


def edit_distance(pred: CanonicalQuery, gold: CanonicalQuery) -> int:
    """Number of edit segments between the two parses' rendered tokens."""
    return len(diff_segments(pred, gold))


def _is_single_token(segment: EditSegment) -> bool:
    if segment.kind == "replace":
        return len(segment.removed) == 1 and len(segment.added) == 1
    return len(segment.tokens) == 1


def classify_edit(segment: EditSegment, schema: Schema) -> str:
    """Classify a single-token edit; multi-token segments are 'other'."""
    if not _is_single_token(segment):
        return "other"
    token = (segment.added or segment.removed)[0]
    names = schema.item_names()
    if token.lower() in names:
        return "schema_item"
    if token.lower() in SQL_KEYWORDS:
        return "sql_keyword"
    if token in _OPERATOR_TOKENS:
        return "operator"
    try:
        float(token)
        return "number"
    except ValueError:
        return "other"


def keyword_histogram(pairs, schemas) -> ErrorReport:
    """Corpus-level error report over (pred, gold) query pairs.

    ``schemas`` maps db_id to Schema; each pair's schema is looked up via the
    predicted query's db_id.
    """
    distance_hist: Counter = Counter()
    op_counts: Counter = Counter()
    single = 0
    single_classes: Counter = Counter()
    kw_hist: dict[str, Counter] = {}
    total_segments = 0
    size = 0

    for pred, gold in pairs:
        schema = schemas[pred.db_id]
        size += 1
        segments = diff_segments(pred, gold)
        distance_hist[len(segments)] += 1
        for segment in segments:
            total_segments += 1
            op_counts[segment.kind] += 1
            if _is_single_token(segment):
                single += 1
                single_classes[classify_edit(segment, schema)] += 1
            for token in segment.tokens:
                if token.lower() in SQL_KEYWORDS:
                    kw_hist.setdefault(token.lower(), Counter())[segment.kind] += 1

    op_distribution = {
        kind: op_counts[kind] / total_segments if total_segments else 0.0
        for kind in ("replace", "insert", "delete")
    }
    single_fraction = single / total_segments if total_segments else 0.0
    class_distribution = {
        category: count / single for category, count in sorted(single_classes.items())
    } if single else {}
    return ErrorReport(
        distance_histogram=dict(sorted(distance_hist.items())),
        op_distribution=op_distribution,
        single_token_fraction=single_fraction,
        single_token_class_distribution=class_distribution,
        keyword_histogram={k: dict(v) for k, v in sorted(kw_hist.items())},
        corpus_size=size,
    )


def diff_schema_items(a: CanonicalQuery, b: CanonicalQuery) -> set[str]:
    """Schema items appearing in exactly one of the two queries."""
    return schema_items(a) ^ schema_items(b)


def report_rows(report: ErrorReport) -> list[str]:
    """Flat tabular text form of an ErrorReport, one row per bucket."""
    rows = ["section\tbucket\tkind\tvalue"]
    for distance, count in report.distance_histogram.items():
        rows.append(f"distance\t{distance}\t-\t{count}")
    for kind, fraction in report.op_distribution.items():
        rows.append(f"op_distribution\t{kind}\t-\t{fraction:.6f}")
    rows.append(f"single_token\tfraction\t-\t{report.single_token_fraction:.6f}")
    for category, fraction in report.single_token_class_distribution.items():
        rows.append(f"single_token_class\t{category}\t-\t{fraction:.6f}")
    for keyword, kinds in report.keyword_histogram.items():
        for kind, count in sorted(kinds.items()):
            rows.append(f"keyword\t{keyword}\t{kind}\t{count}")
    return rows
