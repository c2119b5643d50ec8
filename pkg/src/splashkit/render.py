"""Deterministic textual rendering of canonical queries.

The output is parseable by :func:`splashkit.parser.parse_sql`, and the
round-trip is stable under exact set match.
"""

from __future__ import annotations

from .queries import (
    BoolExpr,
    CanonicalQuery,
    ColumnRef,
    Condition,
    Literal,
    OrderItem,
    Predicate,
    SelectItem,
)


def render_sql(query: CanonicalQuery) -> str:
    """Render a canonical query back to SQL text, deterministically."""
    parts = [f"SELECT {', '.join(_render_select_item(s) for s in query.select)}"]
    parts.append("FROM " + _render_from(query))
    if query.where is not None:
        parts.append("WHERE " + _render_condition(query.where))
    if query.group_by:
        parts.append("GROUP BY " + ", ".join(str(c) for c in query.group_by))
    if query.having is not None:
        parts.append("HAVING " + _render_condition(query.having))
    if query.order_by:
        parts.append("ORDER BY " + ", ".join(_render_order_item(o) for o in query.order_by))
    if query.limit is not None:
        parts.append(f"LIMIT {query.limit}")
    text = " ".join(parts)
    if query.compound is not None:
        op, rhs = query.compound
        text = f"{text} {op.upper()} {render_sql(rhs)}"
    return text


def _render_from(query: CanonicalQuery) -> str:
    sources = []
    for entry in query.from_tables:
        if isinstance(entry, CanonicalQuery):
            sources.append(f"( {render_sql(entry)} )")
        else:
            sources.append(entry)
    text = " JOIN ".join(sources)
    if query.joins:
        conds = " AND ".join(f"{j.left} = {j.right}" for j in query.joins)
        text += f" ON {conds}"
    return text


def _render_value(agg: str, column: ColumnRef, distinct: bool) -> str:
    inner = f"DISTINCT {column}" if distinct else str(column)
    if agg == "none":
        return inner
    return f"{agg.upper()}({inner})"


def _render_select_item(item: SelectItem) -> str:
    return _render_value(item.agg, item.column, item.distinct)


def _render_order_item(item: OrderItem) -> str:
    return f"{_render_value(item.agg, item.column, False)} {item.direction.upper()}"


def render_literal(lit: Literal) -> str:
    if lit.is_string:
        escaped = lit.value.replace("'", "''")
        return f"'{escaped}'"
    return str(lit.value)


def _render_operand(operand) -> str:
    if isinstance(operand, Literal):
        return render_literal(operand)
    if isinstance(operand, CanonicalQuery):
        return f"( {render_sql(operand)} )"
    return str(operand)


def _render_condition(cond: Condition, parent: str | None = None) -> str:
    if isinstance(cond, BoolExpr):
        joiner = f" {cond.op.upper()} "
        text = joiner.join(_render_condition(c, cond.op) for c in cond.children)
        return text
    return _render_predicate(cond)


def _render_predicate(pred: Predicate) -> str:
    left = _render_value(pred.left_agg, pred.left, pred.left_distinct)
    if pred.op == "between":
        low, high = pred.operands
        return f"{left} BETWEEN {render_literal(low)} AND {render_literal(high)}"
    op = pred.op.upper()
    return f"{left} {op} {_render_operand(pred.operands[0])}"
