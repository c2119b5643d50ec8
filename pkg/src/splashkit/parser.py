"""Recursive-descent parser for the Spider SQL subset.

Produces CanonicalQuery values with aliases resolved to declared table
names, identifiers normalized to schema casing, and column references
always table-qualified.
"""

from __future__ import annotations

from typing import Optional, Union

from .queries import (
    AGGREGATORS,
    STAR,
    BoolExpr,
    CanonicalQuery,
    ColumnRef,
    JoinCondition,
    Literal,
    OrderItem,
    Predicate,
    SelectItem,
)
from .schema import Schema
from .tokens import sql_lex

_CLAUSE_KEYWORDS = {
    "select", "from", "where", "group", "having", "order", "limit",
    "intersect", "union", "except",
}
_UNSUPPORTED = {
    "left": "LEFT JOIN", "right": "RIGHT JOIN", "full": "FULL JOIN",
    "outer": "OUTER JOIN", "cross": "CROSS JOIN", "exists": "EXISTS",
    "is": "IS", "case": "CASE expression", "over": "window function",
    "with": "common table expression",
}
_COMPARISONS = {"=", "!=", "<>", "<", "<=", ">", ">="}


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (position {position})")
        self.position = position


class ResolutionError(ParseError):
    """A table or column reference does not resolve against the schema."""


class UnsupportedConstructError(ParseError):
    """Input uses SQL outside the supported subset; names the construct."""


class _Scope:
    """Alias environment for one (sub)query's FROM clause."""

    def __init__(self, schema: Schema, parent: Optional["_Scope"] = None):
        self.schema = schema
        self.parent = parent
        self.sources: list[tuple[str, Union[str, CanonicalQuery]]] = []

    def add(self, alias: str, target: Union[str, CanonicalQuery]) -> None:
        self.sources.append((alias.lower(), target))

    def lookup_alias(self, name: str):
        for alias, target in self.sources:
            if alias == name.lower():
                return target
        if self.parent is not None:
            return self.parent.lookup_alias(name)
        return None


def _derived_output_names(query: CanonicalQuery) -> set[str]:
    return {item.column.column.lower() for item in query.select if not item.column.is_star}


class _Parser:
    def __init__(self, text: str, schema: Schema):
        self.text = text
        self.schema = schema
        self.tokens = sql_lex(text)
        self.i = 0

    # --- token stream helpers -------------------------------------------

    def peek(self, offset: int = 0) -> Optional[str]:
        idx = self.i + offset
        return self.tokens[idx][0] if idx < len(self.tokens) else None

    def pos(self) -> int:
        if self.i < len(self.tokens):
            return self.tokens[self.i][1]
        return len(self.text)

    def next(self) -> str:
        if self.i >= len(self.tokens):
            raise ParseError("unexpected end of input", len(self.text))
        token = self.tokens[self.i][0]
        self.i += 1
        return token

    def expect(self, token: str) -> None:
        got = self.peek()
        if got != token:
            raise ParseError(f"expected {token!r}, got {got!r}", self.pos())
        self.i += 1

    def accept(self, token: str) -> bool:
        if self.peek() == token:
            self.i += 1
            return True
        return False

    def fail_unsupported(self, token: str) -> None:
        raise UnsupportedConstructError(
            f"unsupported construct: {_UNSUPPORTED[token]}", self.pos()
        )

    # --- grammar ---------------------------------------------------------

    def parse(self) -> CanonicalQuery:
        query = self.parse_query(None)
        if self.accept(";"):
            pass
        if self.i < len(self.tokens):
            raise ParseError(f"unexpected token {self.peek()!r}", self.pos())
        return query

    def parse_query(self, parent: Optional[_Scope]) -> CanonicalQuery:
        core = self.parse_select_core(parent)
        for op in ("intersect", "union", "except"):
            if self.accept(op):
                rhs = self.parse_query(parent)
                return CanonicalQuery(
                    select=core.select,
                    from_tables=core.from_tables,
                    joins=core.joins,
                    where=core.where,
                    group_by=core.group_by,
                    having=core.having,
                    order_by=core.order_by,
                    limit=core.limit,
                    compound=(op, rhs),
                    db_id=self.schema.db_id,
                )
        return core

    def parse_select_core(self, parent: Optional[_Scope]) -> CanonicalQuery:
        self.expect("select")
        select_distinct = self.accept("distinct")

        # SELECT items reference the FROM clause, so scan ahead to build the
        # scope first, then come back and parse the item list.
        select_start = self.i
        self.skip_to_from()
        scope = self.parse_from(parent)
        after_from = self.i

        self.i = select_start
        select_items = [self.parse_select_item(scope, select_distinct)]
        while self.accept(","):
            select_items.append(self.parse_select_item(scope, select_distinct))

        self.i = after_from
        where = group_by = having = order_by = limit = None
        if self.accept("where"):
            where = self.parse_condition(scope)
        if self.accept("group"):
            self.expect("by")
            group_by = [self.parse_column_ref(scope)]
            while self.accept(","):
                group_by.append(self.parse_column_ref(scope))
        if self.accept("having"):
            having = self.parse_condition(scope)
        if self.accept("order"):
            self.expect("by")
            order_by = [self.parse_order_item(scope)]
            while self.accept(","):
                order_by.append(self.parse_order_item(scope))
        if self.accept("limit"):
            token = self.next()
            if not token.isdigit():
                raise ParseError(f"LIMIT requires an integer, got {token!r}", self.pos())
            limit = int(token)

        token = self.peek()
        if token in _UNSUPPORTED:
            self.fail_unsupported(token)
        if token is not None and token not in ("intersect", "union", "except", ")", ";"):
            raise ParseError(f"unexpected token {token!r}", self.pos())

        return CanonicalQuery(
            select=tuple(select_items),
            from_tables=tuple(target for _, target in scope.sources_ordered()),
            joins=tuple(scope.joins),
            where=where,
            group_by=tuple(group_by or ()),
            having=having,
            order_by=tuple(order_by or ()),
            limit=limit,
            db_id=self.schema.db_id,
        )

    def skip_to_from(self) -> None:
        depth = 0
        while self.i < len(self.tokens):
            token = self.peek()
            if token == "(":
                depth += 1
            elif token == ")":
                depth -= 1
            elif token == "from" and depth == 0:
                return
            self.i += 1
        raise ParseError("missing FROM clause", len(self.text))

    # --- FROM ------------------------------------------------------------

    def parse_from(self, parent: Optional[_Scope]) -> "_FromScope":
        self.expect("from")
        scope = _FromScope(self.schema, parent)
        self.parse_table_source(scope)
        while True:
            if self.accept("join"):
                self.parse_table_source(scope)
                if self.accept("on"):
                    scope.joins.append(self.parse_join_condition(scope))
                    while self.accept("and"):
                        scope.joins.append(self.parse_join_condition(scope))
            elif self.accept(","):
                self.parse_table_source(scope)
            else:
                break
        return scope

    def parse_table_source(self, scope: "_FromScope") -> None:
        if self.peek() in _UNSUPPORTED:
            self.fail_unsupported(self.peek())
        if self.accept("("):
            sub = self.parse_query(scope)
            self.expect(")")
            alias = self.parse_optional_alias()
            scope.add(alias or "__derived__", sub)
            scope.order.append((alias or "__derived__", sub))
            return
        pos = self.pos()
        name = self.next()
        if not self.schema.has_table(name):
            raise ResolutionError(f"unknown table {name!r}", pos)
        real = self.schema.table(name).name
        alias = self.parse_optional_alias()
        scope.add(alias or real, real)
        if alias:
            scope.add(real, real)  # the real name stays addressable
        scope.order.append((alias or real, real))

    def parse_optional_alias(self) -> Optional[str]:
        # Bare aliases (without AS) would swallow misspelled keywords, so the
        # supported subset requires AS, as Spider queries do.
        if self.accept("as"):
            return self.next()
        return None

    def parse_join_condition(self, scope: _Scope) -> JoinCondition:
        left = self.parse_column_ref(scope)
        self.expect("=")
        right = self.parse_column_ref(scope)
        return JoinCondition.normalized(left, right)

    # --- SELECT / ORDER items ---------------------------------------------

    def parse_select_item(self, scope: _Scope, global_distinct: bool) -> SelectItem:
        agg, ref, distinct = self.parse_value_expr(scope)
        return SelectItem(agg=agg, column=ref, distinct=distinct or global_distinct)

    def parse_order_item(self, scope: _Scope) -> OrderItem:
        agg, ref, _ = self.parse_value_expr(scope)
        direction = "asc"
        if self.accept("desc"):
            direction = "desc"
        elif self.accept("asc"):
            direction = "asc"
        return OrderItem(agg=agg, column=ref, direction=direction)

    def parse_value_expr(self, scope: _Scope) -> tuple[str, ColumnRef, bool]:
        """An optionally aggregated column: ``col``, ``agg(col)``, ``count(*)``."""
        token = self.peek()
        if token in AGGREGATORS[1:] and self.peek(1) == "(":
            agg = self.next()
            self.expect("(")
            distinct = self.accept("distinct")
            ref = self.parse_column_ref(scope, allow_star=True)
            self.expect(")")
            return agg, ref, distinct
        ref = self.parse_column_ref(scope, allow_star=True)
        return "none", ref, False

    # --- conditions --------------------------------------------------------

    def parse_condition(self, scope: _Scope):
        left = self.parse_conjunction(scope)
        if self.peek() != "or":
            return left
        children = [left]
        while self.accept("or"):
            children.append(self.parse_conjunction(scope))
        return BoolExpr("or", tuple(children))

    def parse_conjunction(self, scope: _Scope):
        left = self.parse_atom(scope)
        if self.peek() != "and":
            return left
        children = [left]
        while self.accept("and"):
            children.append(self.parse_atom(scope))
        return BoolExpr("and", tuple(children))

    def parse_atom(self, scope: _Scope) -> Predicate:
        if self.peek() in _UNSUPPORTED:
            self.fail_unsupported(self.peek())
        agg, left, distinct = self.parse_value_expr(scope)

        negated = self.accept("not")
        pos = self.pos()
        op = self.next() if self.peek() is not None else None
        if op == "<>":
            op = "!="
        if negated:
            if op != "in" and op != "like":
                raise UnsupportedConstructError(f"unsupported construct: NOT {op}", pos)
            if op == "like":
                raise UnsupportedConstructError("unsupported construct: NOT LIKE", pos)
            op = "not in"
        if op == "between":
            low = self.parse_literal()
            self.expect("and")
            high = self.parse_literal()
            return Predicate(left, "between", (low, high), left_agg=agg, left_distinct=distinct)
        if op in ("in", "not in"):
            self.expect("(")
            if self.peek() != "select":
                raise UnsupportedConstructError(
                    "unsupported construct: IN over a literal list", self.pos()
                )
            sub = self.parse_query(scope)
            self.expect(")")
            return Predicate(left, op, (sub,), left_agg=agg, left_distinct=distinct)
        if op == "like":
            return Predicate(left, "like", (self.parse_literal(),), left_agg=agg,
                             left_distinct=distinct)
        if op not in _COMPARISONS:
            raise ParseError(f"expected a comparison operator, got {op!r}", pos)
        operand = self.parse_operand(scope)
        return Predicate(left, op, (operand,), left_agg=agg, left_distinct=distinct)

    def parse_operand(self, scope: _Scope):
        token = self.peek()
        if token == "(":
            self.next()
            if self.peek() != "select":
                raise ParseError("expected a nested SELECT", self.pos())
            sub = self.parse_query(scope)
            self.expect(")")
            return sub
        if token is not None and (token[0].isdigit() or token[0] in "'\"" or token == "-"
                                  or token[0] == "."):
            return self.parse_literal()
        ref = self.parse_column_ref(scope)
        return ref

    def parse_literal(self) -> Literal:
        pos = self.pos()
        token = self.next()
        negative = False
        if token == "-":
            negative = True
            token = self.next()
        if token[0] in "'\"":
            inner = token[1:-1]
            if token[0] == "'":
                inner = inner.replace("''", "'")
            else:
                inner = inner.replace('""', '"')
            return Literal(inner)
        try:
            value = int(token)
        except ValueError:
            try:
                value = float(token)
            except ValueError:
                raise ParseError(f"expected a literal, got {token!r}", pos) from None
        return Literal(-value if negative else value)

    # --- column references ---------------------------------------------------

    def parse_column_ref(self, scope: _Scope, allow_star: bool = False) -> ColumnRef:
        pos = self.pos()
        first = self.next()
        if first == "*":
            if not allow_star:
                raise ParseError("'*' is not allowed here", pos)
            return STAR
        if self.accept("."):
            second = self.next()
            return self.resolve_qualified(scope, first, second, pos, allow_star)
        return self.resolve_unqualified(scope, first, pos)

    def resolve_qualified(self, scope: _Scope, qualifier: str, column: str, pos: int,
                          allow_star: bool) -> ColumnRef:
        target = qualifier if self.schema.has_table(qualifier) else None
        aliased = scope.lookup_alias(qualifier)
        if aliased is not None:
            target = aliased
        if target is None:
            raise ResolutionError(f"unknown table or alias {qualifier!r}", pos)
        if isinstance(target, CanonicalQuery):
            if column != "*" and column.lower() not in _derived_output_names(target):
                raise ResolutionError(
                    f"column {column!r} is not produced by the derived table {qualifier!r}", pos
                )
            return ColumnRef(qualifier.lower(), column.lower())
        table = self.schema.table(target)
        if column == "*":
            if not allow_star:
                raise ParseError("'*' is not allowed here", pos)
            return ColumnRef(table.name, "*")
        if not table.has_column(column):
            raise ResolutionError(f"no column {column!r} in table {table.name!r}", pos)
        real = next(c.name for c in table.columns if c.name.lower() == column.lower())
        return ColumnRef(table.name, real)

    def resolve_unqualified(self, scope: _Scope, column: str, pos: int) -> ColumnRef:
        while scope is not None:
            matches: list[ColumnRef] = []
            for _, target in scope.sources:
                if isinstance(target, CanonicalQuery):
                    if column.lower() in _derived_output_names(target):
                        alias = next(a for a, t in scope.sources if t is target)
                        matches.append(ColumnRef(alias, column.lower()))
                    continue
                table = self.schema.table(target)
                if table.has_column(column):
                    real = next(
                        c.name for c in table.columns if c.name.lower() == column.lower()
                    )
                    matches.append(ColumnRef(table.name, real))
            if len(matches) > 1:
                owners = ", ".join(sorted({m.table for m in matches}))
                raise ResolutionError(
                    f"ambiguous column reference {column!r} (candidates: {owners})", pos
                )
            if matches:
                return matches[0]
            scope = scope.parent
        raise ResolutionError(f"unresolvable column reference {column!r}", pos)


class _FromScope(_Scope):
    def __init__(self, schema: Schema, parent: Optional[_Scope] = None):
        super().__init__(schema, parent)
        self.joins: list[JoinCondition] = []
        self.order: list[tuple[str, Union[str, CanonicalQuery]]] = []

    def sources_ordered(self):
        seen = set()
        out = []
        for alias, target in self.order:
            key = target if isinstance(target, str) else id(target)
            if key not in seen:
                seen.add(key)
                out.append((alias, target))
        return out


def parse_sql(text: str, schema: Schema) -> CanonicalQuery:
    """Parse one statement of the supported SQL subset into canonical form."""
    return _Parser(text, schema).parse()
