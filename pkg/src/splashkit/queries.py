"""Canonical query model: the normalized structural form of a SQL parse."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

AGGREGATORS = ("none", "count", "sum", "avg", "min", "max")
COMPARISON_OPS = ("=", "!=", "<", "<=", ">", ">=", "like", "between", "in", "not in")
COMPOUND_OPS = ("intersect", "union", "except")
DIRECTIONS = ("asc", "desc")


class QueryError(ValueError):
    """Raised when a query value violates the canonical-form invariants."""


@dataclass(frozen=True)
class ColumnRef:
    """A table-qualified column reference; ``*`` has no table."""

    table: Optional[str]
    column: str

    def __str__(self) -> str:
        if self.table is None:
            return self.column
        return f"{self.table}.{self.column}"

    @property
    def is_star(self) -> bool:
        return self.column == "*"


STAR = ColumnRef(None, "*")


@dataclass(frozen=True)
class Literal:
    value: Union[int, float, str]

    @property
    def is_string(self) -> bool:
        return isinstance(self.value, str)


@dataclass(frozen=True)
class SelectItem:
    agg: str
    column: ColumnRef
    distinct: bool = False

    def __post_init__(self):
        if self.agg not in AGGREGATORS:
            raise QueryError(f"unknown aggregator {self.agg!r}")


@dataclass(frozen=True)
class JoinCondition:
    """An inner-join equality between two column refs, stored order-normalized."""

    left: ColumnRef
    right: ColumnRef

    @staticmethod
    def normalized(a: ColumnRef, b: ColumnRef) -> "JoinCondition":
        if (str(a).lower(), str(b).lower()) <= (str(b).lower(), str(a).lower()):
            return JoinCondition(a, b)
        return JoinCondition(b, a)


Operand = Union[Literal, ColumnRef, "CanonicalQuery"]


@dataclass(frozen=True)
class Predicate:
    """One atomic condition: column, comparison operator, operand(s)."""

    left: ColumnRef
    op: str
    operands: tuple  # of Operand
    left_agg: str = "none"  # aggregated column in HAVING, e.g. count(*) >= 2
    left_distinct: bool = False

    def __post_init__(self):
        if self.op not in COMPARISON_OPS:
            raise QueryError(f"unknown comparison operator {self.op!r}")
        if self.op == "between":
            if len(self.operands) != 2 or not all(
                isinstance(o, Literal) for o in self.operands
            ):
                raise QueryError("between requires exactly two literal operands")
        elif self.op in ("in", "not in"):
            if len(self.operands) != 1:
                raise QueryError(f"{self.op} requires one operand")
        elif len(self.operands) != 1:
            raise QueryError(f"operator {self.op!r} requires one operand")


@dataclass(frozen=True)
class BoolExpr:
    """AND/OR node over predicates and nested boolean expressions."""

    op: str  # "and" | "or"
    children: tuple  # of Predicate | BoolExpr

    def __post_init__(self):
        if self.op not in ("and", "or"):
            raise QueryError(f"unknown boolean operator {self.op!r}")
        if len(self.children) < 2:
            raise QueryError("boolean node needs at least two children")


Condition = Union[Predicate, BoolExpr]


@dataclass(frozen=True)
class OrderItem:
    agg: str
    column: ColumnRef
    direction: str = "asc"

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise QueryError(f"unknown direction {self.direction!r}")


@dataclass(frozen=True)
class CanonicalQuery:
    """Normalized structural form of one SQL query (possibly compound)."""

    select: tuple  # of SelectItem
    from_tables: tuple  # of str table names (or CanonicalQuery for derived tables)
    joins: tuple = ()  # of JoinCondition
    where: Optional[Condition] = None
    group_by: tuple = ()  # of ColumnRef
    having: Optional[Condition] = None
    order_by: tuple = ()  # of OrderItem
    limit: Optional[int] = None
    compound: Optional[tuple] = None  # (operator, CanonicalQuery)
    db_id: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if not self.select:
            raise QueryError("query must select at least one item")
        if not self.from_tables:
            raise QueryError("query must reference at least one table")
        if self.limit is not None and self.limit < 0:
            raise QueryError("limit must be non-negative")
        if self.compound is not None and self.compound[0] not in COMPOUND_OPS:
            raise QueryError(f"unknown compound operator {self.compound[0]!r}")


def _condition_items(cond: Condition, out: set) -> None:
    if isinstance(cond, BoolExpr):
        for child in cond.children:
            _condition_items(child, out)
        return
    if not cond.left.is_star:
        _ref_items(cond.left, out)
    for operand in cond.operands:
        if isinstance(operand, ColumnRef):
            _ref_items(operand, out)
        elif isinstance(operand, CanonicalQuery):
            out.update(schema_items(operand))


def _ref_items(ref: ColumnRef, out: set) -> None:
    if ref.table is not None:
        out.add(ref.table.lower())
    if not ref.is_star:
        out.add(ref.column.lower())


def schema_items(query: CanonicalQuery) -> set[str]:
    """Set of all table and column names referenced anywhere in the query."""
    items: set[str] = set()
    for entry in query.from_tables:
        if isinstance(entry, CanonicalQuery):
            items.update(schema_items(entry))
        else:
            items.add(entry.lower())
    for item in query.select:
        _ref_items(item.column, items)
    for join in query.joins:
        _ref_items(join.left, items)
        _ref_items(join.right, items)
    for cond in (query.where, query.having):
        if cond is not None:
            _condition_items(cond, items)
    for ref in query.group_by:
        _ref_items(ref, items)
    for item in query.order_by:
        _ref_items(item.column, items)
    if query.compound is not None:
        items.update(schema_items(query.compound[1]))
    return items
