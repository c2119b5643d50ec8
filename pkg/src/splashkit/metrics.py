"""Evaluation: exact set match, correction accuracy, end-to-end accuracy."""

from __future__ import annotations

from dataclasses import dataclass

from .queries import (
    BoolExpr,
    CanonicalQuery,
    ColumnRef,
    Condition,
    Literal,
)


class EvalError(ValueError):
    pass


@dataclass(frozen=True)
class EvalOutcome:
    flags: tuple  # of bool, per example
    correction_accuracy: float


def _canon_ref(ref: ColumnRef):
    table = ref.table.lower() if ref.table is not None else None
    return (table, ref.column.lower())


def _canon_operand(operand):
    if isinstance(operand, Literal):
        return ("lit", operand.value)
    if isinstance(operand, CanonicalQuery):
        return ("query", _canon_query(operand))
    return ("col", _canon_ref(operand))


def _canon_condition(cond: Condition):
    if isinstance(cond, BoolExpr):
        if cond.op == "and":
            # Conjunct order is semantically irrelevant.
            return ("and", frozenset(_canon_condition(c) for c in cond.children))
        return ("or", tuple(_canon_condition(c) for c in cond.children))
    return (
        "pred",
        cond.left_agg,
        _canon_ref(cond.left),
        cond.left_distinct,
        cond.op,
        tuple(_canon_operand(o) for o in cond.operands),
    )


def _canon_table(entry):
    if isinstance(entry, CanonicalQuery):
        return ("subquery", _canon_query(entry))
    return ("table", entry.lower())


def _canon_query(query: CanonicalQuery):
    compound = None
    if query.compound is not None:
        compound = (query.compound[0], _canon_query(query.compound[1]))
    return (
        frozenset((s.agg, _canon_ref(s.column), s.distinct) for s in query.select),
        frozenset(_canon_table(t) for t in query.from_tables),
        frozenset(
            frozenset((_canon_ref(j.left), _canon_ref(j.right))) for j in query.joins
        ),
        _canon_condition(query.where) if query.where is not None else None,
        frozenset(_canon_ref(c) for c in query.group_by),
        _canon_condition(query.having) if query.having is not None else None,
        tuple((o.agg, _canon_ref(o.column), o.direction) for o in query.order_by),
        query.limit,
        compound,
    )


def exact_set_match(pred: CanonicalQuery, gold: CanonicalQuery) -> bool:
    """Binary equality of two parses, order-insensitive where SQL is.

    Select items, FROM tables, join conditions, AND-conjuncts, and GROUP BY
    columns compare as sets; ORDER BY compares as an ordered list including
    direction; literals compare exactly.
    """
    if pred.db_id is not None and gold.db_id is not None and pred.db_id != gold.db_id:
        raise EvalError(f"schema mismatch: {pred.db_id!r} vs {gold.db_id!r}")
    return _canon_query(pred) == _canon_query(gold)


def correction_accuracy(predictions, golds) -> EvalOutcome:
    """Mean exact-set-match flag over aligned prediction/gold lists."""
    if len(predictions) != len(golds):
        raise EvalError(
            f"length mismatch: {len(predictions)} predictions vs {len(golds)} golds"
        )
    flags = tuple(exact_set_match(p, g) for p, g in zip(predictions, golds))
    accuracy = sum(flags) / len(flags) if flags else 0.0
    return EvalOutcome(flags=flags, correction_accuracy=accuracy)


def end_to_end_accuracy(base_correct: int, supported: int, total: int, x: float) -> float:
    """Two-turn accuracy: parser-correct cases plus the feedback-corrected
    share of the supported wrong parses, as a percentage of all examples."""
    if base_correct < 0 or supported < 0 or total <= 0:
        raise EvalError("counts must be non-negative and total positive")
    if base_correct + supported > total:
        raise EvalError("base_correct + supported must not exceed total")
    if not 0.0 <= x <= 100.0:
        raise EvalError("correction accuracy must be within [0, 100]")
    return 100.0 * (base_correct + supported * x / 100.0) / total
