"""Rendering canonical queries into ordered natural-language steps."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field, replace

from .library import (
    AGG_PHRASES,
    COMBINER_PHRASES,
    DIRECTION_PHRASES,
    DISTINCT_PHRASE,
    JOIN_PHRASE,
    LIMIT_PHRASE,
    OP_PHRASES,
    TemplateLibrary,
)
from .queries import (
    BoolExpr,
    CanonicalQuery,
    ColumnRef,
    Literal,
    OrderItem,
    Predicate,
    SelectItem,
)
from .render import render_literal
from .schema import Schema
from .template import abstract_template

_REF = re.compile(r"\{step:(\d+)\}")


class ExplainError(ValueError):
    pass


class NonExplainableError(ExplainError):
    """The query joins tables on something other than a PK/FK equality."""


@dataclass(frozen=True)
class Step:
    """One planned explanation step; text may hold {step:i} plan references."""

    kind: str
    text: str
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ExplanationSteps:
    steps: tuple  # of str

    def __post_init__(self):
        if not self.steps:
            raise ExplainError("explanation must have at least one step")


def split_compound(query: CanonicalQuery):
    """Split a compound query into independently explainable parts and pull
    the limit out so a limit step can be appended at the end."""
    limit = query.limit
    stripped = replace(query, limit=None)
    if stripped.compound is None:
        return [stripped], None, limit
    op, rhs = stripped.compound
    left = replace(stripped, compound=None)
    return [left, rhs], op, limit


def _shift_refs(text: str, offset: int) -> str:
    return _REF.sub(lambda m: f"{{step:{int(m.group(1)) + offset}}}", text)


def _shift_steps(steps: list[Step], offset: int) -> list[Step]:
    return [replace(s, text=_shift_refs(s.text, offset)) for s in steps]


def compress_steps(steps: list[Step]) -> list[Step]:
    """Apply mandatory compression: an ordering step immediately followed by
    a limit-1 step collapses into a single find-largest/smallest step."""
    out: list[Step] = []
    i = 0
    while i < len(steps):
        step = steps[i]
        if (
            step.kind == "order"
            and i + 1 < len(steps)
            and steps[i + 1].kind == "limit"
            and steps[i + 1].meta.get("n") == 1
        ):
            word = "largest" if step.meta.get("direction") == "desc" else "smallest"
            subject = step.meta.get("subject", "the ordering value")
            out.append(Step(kind="find_extreme", text=f"find the row with the {word} {subject}"))
            i += 2
            continue
        out.append(step)
        i += 1
    return out


def _surface_column(ref: ColumnRef) -> str:
    return "rows" if ref.is_star else ref.column.lower()


def _surface_value(agg: str, ref: ColumnRef, distinct: bool) -> str:
    col = _surface_column(ref)
    if agg != "none":
        phrase = f"the {AGG_PHRASES[agg]} of {col}"
    else:
        phrase = col
    if distinct and agg != "none":
        phrase = f"the {AGG_PHRASES[agg]} of distinct {col}"
    return phrase


def _surface_table(entry) -> str:
    if isinstance(entry, CanonicalQuery):
        return "the results"
    return entry.lower()


class _Planner:
    """Compositional fallback: builds a step plan straight from the query."""

    def __init__(self, schema: Schema, library: TemplateLibrary):
        self.schema = schema
        self.library = library

    def plan_query(self, query: CanonicalQuery) -> list[Step]:
        parts, combiner, limit = split_compound(query)
        plan: list[Step] = []
        ends = []
        for part in parts:
            part_plan = self.plan_part(part)
            plan.extend(_shift_steps(part_plan, len(plan)))
            ends.append(len(plan) - 1)
        if combiner is not None:
            text = COMBINER_PHRASES[combiner]
            text = text.replace("{step:X}", f"{{step:{ends[0]}}}")
            text = text.replace("{step:Y}", f"{{step:{ends[1]}}}")
            plan.append(Step(kind="combine", text=text))
        if limit is not None:
            text = LIMIT_PHRASE.replace("{n}", str(limit))
            text = text.replace("{step:P}", f"{{step:{len(plan) - 1}}}")
            plan.append(Step(kind="limit", text=text, meta={"n": limit}))
        return compress_steps(plan)

    def plan_part(self, part: CanonicalQuery) -> list[Step]:
        self.check_explainable(part)
        matched = self.library.get(abstract_template(part).key)
        if matched is not None:
            return fill_template(matched, part)
        return self.compose(part)

    def check_explainable(self, part: CanonicalQuery) -> None:
        fk_pairs = self.schema.fk_pairs()
        for join in part.joins:
            pair = frozenset((str(join.left).lower(), str(join.right).lower()))
            if pair not in fk_pairs:
                raise NonExplainableError(
                    f"join condition {join.left} = {join.right} is not a "
                    f"primary/foreign key equality"
                )

    # --- compositional steps ------------------------------------------------

    def compose(self, part: CanonicalQuery) -> list[Step]:
        plan: list[Step] = []
        sub_refs: dict[int, int] = {}

        for sub in _nested_queries(part):
            sub_plan = self.plan_query(sub)
            plan.extend(_shift_steps(sub_plan, len(plan)))
            sub_refs[id(sub)] = len(plan) - 1

        for join in part.joins:
            t1 = (join.left.table or "").lower()
            t2 = (join.right.table or "").lower()
            plan.append(Step(
                kind="join",
                text=JOIN_PHRASE.replace("{t1}", t1).replace("{t2}", t2),
            ))

        plan.append(self._main_step(part, sub_refs))

        if part.order_by:
            plan.append(self._order_step(part.order_by))
        return plan

    def _main_step(self, part: CanonicalQuery, sub_refs: dict) -> Step:
        table = _surface_table(part.from_tables[0])
        if part.group_by:
            group_cols = ", ".join(_surface_column(c) for c in part.group_by)
            aggregated = [s for s in part.select if s.agg != "none"]
            plain = [s for s in part.select if s.agg == "none"]
            pieces = [f"find each value of {group_cols} in {table}"]
            if aggregated:
                aggs = ", ".join(
                    _surface_value(s.agg, s.column, s.distinct) for s in aggregated
                )
                pieces.append(f"along with {aggs} of the corresponding rows to each value")
            text = " ".join(pieces)
            kind = "aggregate"
            if plain and any(
                _surface_column(s.column) not in {_surface_column(c) for c in part.group_by}
                for s in plain
            ):
                extra = ", ".join(
                    _surface_column(s.column) for s in plain
                    if _surface_column(s.column) not in {_surface_column(c) for c in part.group_by}
                )
                text += f", also keeping {extra}"
        else:
            items = ", ".join(
                _surface_value(s.agg, s.column, s.distinct) for s in part.select
            )
            text = f"find {items} of {table}"
            kind = "select"

        if part.where is not None:
            text += " whose " + self._surface_condition(part.where, sub_refs)
        if part.having is not None:
            having = self._surface_condition(part.having, sub_refs)
            text += f", and only keep values for which {having}"
        if any(s.distinct and s.agg == "none" for s in part.select):
            text += f" {DISTINCT_PHRASE}"
        return Step(kind=kind, text=text)

    def _order_step(self, order_by) -> Step:
        subject = ", ".join(
            _surface_value(o.agg, o.column, False) for o in order_by
        )
        direction = order_by[0].direction
        text = f"order the results {DIRECTION_PHRASES[direction]} by {subject}"
        return Step(
            kind="order", text=text,
            meta={"direction": direction, "subject": subject},
        )

    def _surface_condition(self, cond, sub_refs) -> str:
        if isinstance(cond, BoolExpr):
            joiner = f" {cond.op} "
            return joiner.join(self._surface_condition(c, sub_refs) for c in cond.children)
        return self._surface_predicate(cond, sub_refs)

    def _surface_predicate(self, pred: Predicate, sub_refs) -> str:
        left = _surface_value(pred.left_agg, pred.left, pred.left_distinct)
        if pred.op == "between":
            low, high = pred.operands
            return (
                f"{left} {OP_PHRASES['between']} {render_literal(low)} "
                f"and {render_literal(high)}"
            )
        operand = pred.operands[0]
        if isinstance(operand, CanonicalQuery):
            value = f"the results of step {{step:{sub_refs[id(operand)]}}}"
        elif isinstance(operand, Literal):
            value = render_literal(operand)
        else:
            value = _surface_column(operand)
        return f"{left} {OP_PHRASES[pred.op]} {value}"


def _nested_queries(part: CanonicalQuery) -> list[CanonicalQuery]:
    found: list[CanonicalQuery] = []

    def walk_condition(cond):
        if cond is None:
            return
        if isinstance(cond, BoolExpr):
            for child in cond.children:
                walk_condition(child)
            return
        for operand in cond.operands:
            if isinstance(operand, CanonicalQuery):
                found.append(operand)

    walk_condition(part.where)
    walk_condition(part.having)
    return found


_SLOT_REF = re.compile(r"\{((TAB|COL|AGG|OP|LIT)\d+)\}")


def fill_template(entry, part: CanonicalQuery) -> list[Step]:
    """Instantiate a library template's step patterns for a concrete query."""
    binding = abstract_template(part).binding()

    def fill(text: str) -> str:
        def sub(match):
            name, kind = match.group(1), match.group(2)
            surface = binding.get(name)
            if surface is None:
                raise ExplainError(f"unbound slot {{{name}}} in template {entry.template_key!r}")
            if kind == "OP":
                return OP_PHRASES[surface]
            if kind == "AGG":
                return AGG_PHRASES[surface]
            if kind == "TAB" or kind == "COL":
                return surface.lower()
            return surface

        return _SLOT_REF.sub(sub, text)

    steps = []
    for pattern in entry.step_patterns:
        meta = dict(pattern.meta)
        if "subject" in meta:
            meta["subject"] = fill(meta["subject"])
        steps.append(Step(kind=pattern.kind, text=fill(pattern.text), meta=meta))
    return steps


def _render_plan(plan: list[Step]) -> ExplanationSteps:
    texts = []
    for step in plan:
        text = _REF.sub(lambda m: str(int(m.group(1)) + 1), step.text)
        if "{step:" in text or _SLOT_REF.search(text):
            raise ExplainError(f"unresolved marker in step {text!r}")
        texts.append(text)
    return ExplanationSteps(steps=tuple(texts))


def explain(query: CanonicalQuery, schema: Schema, library: TemplateLibrary) -> ExplanationSteps:
    """Explain a query as numbered natural-language steps."""
    planner = _Planner(schema, library)
    return _render_plan(planner.plan_query(query))


@dataclass(frozen=True)
class CoverageReport:
    fraction: float
    matched: int
    total: int
    unmatched_keys: tuple  # of (key, count), most frequent first


def coverage(queries, library: TemplateLibrary) -> CoverageReport:
    """Fraction of queries whose (compound-split, limit-stripped) parts all
    match a library template, plus unmatched keys by frequency."""
    matched = 0
    unmatched: Counter = Counter()
    total = 0
    for query in queries:
        total += 1
        parts, _, _ = split_compound(query)
        keys = [abstract_template(p).key for p in parts]
        missing = [k for k in keys if library.get(k) is None]
        if not missing:
            matched += 1
        for key in missing:
            unmatched[key] += 1
    fraction = matched / total if total else 0.0
    ordered = tuple(sorted(unmatched.items(), key=lambda kv: (-kv[1], kv[0])))
    return CoverageReport(fraction=fraction, matched=matched, total=total,
                          unmatched_keys=ordered)
