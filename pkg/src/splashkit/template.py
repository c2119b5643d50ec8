"""Query abstraction: replace names, literals, aggregators, and comparison
operators with typed placeholders, producing a stable template key."""

from __future__ import annotations

import re
from dataclasses import dataclass

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

_PLACEHOLDER = re.compile(r"^(TAB|COL|AGG|OP|LIT)\d+$")


@dataclass(frozen=True)
class QueryTemplate:
    """Placeholder skeleton of a query plus the bound surface forms."""

    key: str
    slots: tuple  # of (placeholder, surface form) in key order

    def binding(self) -> dict[str, str]:
        return dict(self.slots)


class _Abstractor:
    """Walks a query in render order, emitting key text and slot bindings."""

    def __init__(self):
        self.counts = {"TAB": 0, "COL": 0, "AGG": 0, "OP": 0, "LIT": 0}
        self.slots: list[tuple[str, str]] = []

    def slot(self, kind: str, surface: str) -> str:
        # Re-abstracting an already-abstract query must not re-wrap its
        # placeholders (idempotence); the numbering below reproduces them.
        self.counts[kind] += 1
        name = f"{kind}{self.counts[kind]}"
        self.slots.append((name, surface))
        return name

    def column(self, ref: ColumnRef) -> str:
        if ref.is_star and ref.table is None:
            return "*"
        parts = []
        if ref.table is not None:
            parts.append(self.slot("TAB", ref.table))
        parts.append("*" if ref.is_star else self.slot("COL", ref.column))
        return ".".join(parts)

    def value(self, agg: str, ref: ColumnRef, distinct: bool) -> str:
        inner = self.column(ref)
        if distinct:
            inner = f"DISTINCT {inner}"
        if agg == "none":
            return inner
        return f"{self.slot('AGG', agg)}({inner})"

    def literal(self, lit: Literal) -> str:
        from .render import render_literal

        return self.slot("LIT", render_literal(lit))

    def operand(self, operand) -> str:
        if isinstance(operand, Literal):
            return self.literal(operand)
        if isinstance(operand, CanonicalQuery):
            return f"( {self.query(operand)} )"
        return self.column(operand)

    def predicate(self, pred: Predicate) -> str:
        left = self.value(pred.left_agg, pred.left, pred.left_distinct)
        if pred.op == "between":
            low, high = pred.operands
            return f"{left} {self.slot('OP', 'between')} {self.literal(low)} AND {self.literal(high)}"
        return f"{left} {self.slot('OP', pred.op)} {self.operand(pred.operands[0])}"

    def condition(self, cond: Condition) -> str:
        if isinstance(cond, BoolExpr):
            joiner = f" {cond.op.upper()} "
            return joiner.join(self.condition(c) for c in cond.children)
        return self.predicate(cond)

    def query(self, query: CanonicalQuery) -> str:
        parts = ["SELECT " + ", ".join(
            self.value(s.agg, s.column, s.distinct) for s in query.select
        )]
        sources = []
        for entry in query.from_tables:
            if isinstance(entry, CanonicalQuery):
                sources.append(f"( {self.query(entry)} )")
            else:
                sources.append(self.slot("TAB", entry))
        from_text = " JOIN ".join(sources)
        if query.joins:
            conds = " AND ".join(
                f"{self.column(j.left)} = {self.column(j.right)}" for j in query.joins
            )
            from_text += f" ON {conds}"
        parts.append("FROM " + from_text)
        if query.where is not None:
            parts.append("WHERE " + self.condition(query.where))
        if query.group_by:
            parts.append("GROUP BY " + ", ".join(self.column(c) for c in query.group_by))
        if query.having is not None:
            parts.append("HAVING " + self.condition(query.having))
        if query.order_by:
            parts.append("ORDER BY " + ", ".join(self.order_item(o) for o in query.order_by))
        if query.limit is not None:
            parts.append(f"LIMIT {self.slot('LIT', str(query.limit))}")
        text = " ".join(parts)
        if query.compound is not None:
            op, rhs = query.compound
            text = f"{text} {op.upper()} {self.query(rhs)}"
        return text

    def order_item(self, item: OrderItem) -> str:
        return f"{self.value(item.agg, item.column, False)} {item.direction.upper()}"


def abstract_template(query: CanonicalQuery) -> QueryTemplate:
    """Abstract a query into its placeholder skeleton and stable key."""
    walker = _Abstractor()
    key = walker.query(query)
    return QueryTemplate(key=key, slots=tuple(walker.slots))
