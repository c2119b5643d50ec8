"""Synthetic query and beam generation for tests and fixtures."""

from __future__ import annotations

import random
from dataclasses import replace

from .queries import (
    BoolExpr,
    CanonicalQuery,
    ColumnRef,
    JoinCondition,
    Literal,
    OrderItem,
    Predicate,
    SelectItem,
    STAR,
)
from .rerank import BeamCandidate
from .schema import Schema

_AGGS = ("count", "sum", "avg", "min", "max")
_OPS = ("=", "!=", "<", "<=", ">", ">=")


def random_query(schema: Schema, rng: random.Random) -> CanonicalQuery:
    """A random single-table (sometimes joined) query over the schema."""
    table = rng.choice(schema.tables)
    from_tables = [table.name]
    joins = []
    if rng.random() < 0.3 and schema.foreign_keys:
        left, right = rng.choice(schema.foreign_keys)
        lt, lc = left.split(".", 1)
        rt, rc = right.split(".", 1)
        if lt.lower() == table.name.lower() or rt.lower() == table.name.lower():
            other = rt if lt.lower() == table.name.lower() else lt
            from_tables.append(schema.table(other).name)
            joins.append(JoinCondition.normalized(ColumnRef(lt, lc), ColumnRef(rt, rc)))

    def ref() -> ColumnRef:
        owner = schema.table(rng.choice(from_tables))
        return ColumnRef(owner.name, rng.choice(owner.columns).name)

    select = []
    for _ in range(rng.randint(1, 2)):
        if rng.random() < 0.2:
            agg = rng.choice(_AGGS)
            column = STAR if agg == "count" and rng.random() < 0.5 else ref()
            select.append(SelectItem(agg=agg, column=column, distinct=rng.random() < 0.2))
        else:
            select.append(SelectItem(agg="none", column=ref(), distinct=False))

    where = None
    if rng.random() < 0.6:
        atoms = [
            Predicate(ref(), rng.choice(_OPS), (Literal(rng.randint(0, 99)),))
            for _ in range(rng.randint(1, 2))
        ]
        where = atoms[0] if len(atoms) == 1 else BoolExpr(
            rng.choice(("and", "or")), tuple(atoms)
        )

    group_by = ()
    having = None
    if rng.random() < 0.2:
        group_by = (ref(),)
        if rng.random() < 0.5:
            having = Predicate(STAR, ">=", (Literal(rng.randint(1, 5)),), left_agg="count")

    order_by = ()
    limit = None
    if rng.random() < 0.3:
        order_by = (OrderItem(agg="none", column=ref(),
                              direction=rng.choice(("asc", "desc"))),)
        if rng.random() < 0.5:
            limit = rng.randint(1, 5)

    return CanonicalQuery(
        select=tuple(select),
        from_tables=tuple(from_tables),
        joins=tuple(joins),
        where=where,
        group_by=group_by,
        having=having,
        order_by=order_by,
        limit=limit,
        db_id=schema.db_id,
    )


def _mutate_condition(cond, rng):
    if isinstance(cond, BoolExpr):
        children = list(cond.children)
        index = rng.randrange(len(children))
        mutated = _mutate_condition(children[index], rng)
        if mutated is None:
            return None
        children[index] = mutated
        return BoolExpr(cond.op, tuple(children))
    new_operands = []
    changed = False
    for operand in cond.operands:
        if isinstance(operand, Literal) and isinstance(operand.value, int) and not changed:
            new_operands.append(Literal(operand.value + 1))
            changed = True
        else:
            new_operands.append(operand)
    if not changed:
        return None
    return replace(cond, operands=tuple(new_operands))


def mutate_literal(query: CanonicalQuery, rng: random.Random):
    """Change one literal in the query; None if it has no mutable literal."""
    if query.where is not None:
        mutated = _mutate_condition(query.where, rng)
        if mutated is not None:
            return replace(query, where=mutated)
    if query.having is not None:
        mutated = _mutate_condition(query.having, rng)
        if mutated is not None:
            return replace(query, having=mutated)
    if query.limit is not None:
        return replace(query, limit=query.limit + 1)
    return None


def mutate_column(query: CanonicalQuery, schema: Schema, rng: random.Random):
    """Swap one selected column for a different column of the same table."""
    select = list(query.select)
    for index, item in enumerate(select):
        if item.column.is_star or item.column.table is None:
            continue
        table = schema.table(item.column.table)
        others = [c.name for c in table.columns if c.name != item.column.column]
        if not others:
            continue
        new_ref = ColumnRef(table.name, rng.choice(others))
        select[index] = replace(item, column=new_ref)
        return replace(query, select=tuple(select))
    return None


def synthetic_beam(gold: CanonicalQuery, mispredicted: CanonicalQuery, schema: Schema,
                   rng: random.Random, size: int = 5, gold_rank: int = None):
    """A test beam: the mispredicted parse at rank 0, the gold somewhere in
    the tail, and literal/column mutations filling the rest."""
    if gold_rank is None:
        gold_rank = rng.randint(1, size - 1)
    queries = [mispredicted]
    fillers = []
    seed_query = gold
    for _ in range(size * 2):
        mutated = mutate_column(seed_query, schema, rng) or mutate_literal(seed_query, rng)
        if mutated is not None and mutated not in queries + fillers + [gold]:
            fillers.append(mutated)
        seed_query = mutated if mutated is not None else gold
        if len(fillers) >= size - 2:
            break
    while len(queries) < size:
        if len(queries) == gold_rank:
            queries.append(gold)
        elif fillers:
            queries.append(fillers.pop(0))
        else:
            queries.append(gold if gold not in queries else mispredicted)
    scores = sorted((round(rng.uniform(0.01, 0.99), 4) for _ in queries), reverse=True)
    return [
        BeamCandidate(query=q, score=s, rank=i)
        for i, (q, s) in enumerate(zip(queries, scores))
    ]
