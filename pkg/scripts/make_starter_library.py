#!/usr/bin/env python3
"""Regenerate the starter explanation template library.

Each entry is authored as a representative SQL query over a synthetic
schema with globally distinct names; the step text comes from the
compositional planner and is then re-abstracted into slot syntax. Run from
the repo root:

    python3 scripts/make_starter_library.py > src/splashkit/data/starter_templates.txt
"""

import sys

from splashkit.explain import _Planner, split_compound
from splashkit.library import AGG_PHRASES, OP_PHRASES, empty_library
from splashkit.parser import parse_sql
from splashkit.schema import Column, Schema, Table
from splashkit.template import abstract_template

AUTHORING_SCHEMA = Schema(
    "authoring",
    (
        Table("alpha", tuple(Column(f"c0{i}") for i in range(1, 6))),
        Table("beta", tuple(Column(f"b0{i}") for i in range(1, 6))),
        Table("gamma", tuple(Column(f"g0{i}") for i in range(1, 4))),
    ),
    (("alpha.c05", "beta.b05"), ("beta.b04", "gamma.g03")),
)

SHAPES = [
    "SELECT c01 FROM alpha",
    "SELECT c01, c02 FROM alpha",
    "SELECT * FROM alpha",
    "SELECT c01 FROM alpha WHERE c02 = 71",
    "SELECT c01, c02 FROM alpha WHERE c03 > 71",
    "SELECT * FROM alpha WHERE c01 < 71",
    "SELECT c01 FROM alpha WHERE c02 > 71 AND c03 < 72",
    # Within one shape every element must abstract to a distinct surface
    # (e.g. two different operators), or the slot rewrite would collide.
    "SELECT c01 FROM alpha WHERE c02 = 71 OR c03 > 72",
    "SELECT DISTINCT c01 FROM alpha",
    "SELECT DISTINCT c01 FROM alpha WHERE c02 = 71",
    "SELECT count(*) FROM alpha",
    "SELECT count(*) FROM alpha WHERE c01 = 71",
    "SELECT max(c01) FROM alpha",
    "SELECT avg(c01) FROM alpha WHERE c02 > 71",
    "SELECT min(c01), max(c02) FROM alpha",
    "SELECT count(DISTINCT c01) FROM alpha",
    "SELECT c01 FROM alpha ORDER BY c02 DESC",
    "SELECT c01 FROM alpha ORDER BY c02 ASC",
    "SELECT c01, c02 FROM alpha ORDER BY c03 DESC",
    "SELECT c01 FROM alpha WHERE c02 > 71 ORDER BY c03 ASC",
    # Group columns kept distinct from selected columns for the same reason.
    "SELECT c01 FROM alpha GROUP BY c02 HAVING count(*) >= 71",
    "SELECT c01, count(*) FROM alpha GROUP BY c02",
    "SELECT c01 FROM alpha GROUP BY c02 ORDER BY count(*) DESC",
    "SELECT sum(c02) FROM alpha GROUP BY c01",
    "SELECT c01 FROM alpha WHERE c02 BETWEEN 71 AND 72",
    "SELECT c01 FROM alpha WHERE c02 LIKE 'needle'",
    "SELECT c01 FROM alpha WHERE c02 IN (SELECT b01 FROM beta)",
    "SELECT c01 FROM alpha WHERE c02 NOT IN (SELECT b01 FROM beta)",
    "SELECT c01 FROM alpha WHERE c02 > (SELECT avg(b01) FROM beta)",
    "SELECT c01 FROM alpha WHERE c02 IN (SELECT b01 FROM beta WHERE b02 = 71)",
]

# Join shapes are authored with explicit step lines: the same table name
# fills several TAB slots, so a textual rewrite cannot tell the ON-clause
# slots (the joined tables) apart from the SELECT-ref slots.
JOIN_SHAPES = [
    (
        "SELECT c01 FROM alpha JOIN beta ON alpha.c05 = beta.b05",
        [
            "join | for each row in {TAB4}, find corresponding rows in {TAB5}",
            "select | find {COL1} of {TAB2}",
        ],
    ),
    (
        "SELECT c01, b01 FROM alpha JOIN beta ON alpha.c05 = beta.b05",
        [
            "join | for each row in {TAB5}, find corresponding rows in {TAB6}",
            "select | find {COL1}, {COL2} of {TAB3}",
        ],
    ),
    (
        "SELECT c01 FROM alpha JOIN beta ON alpha.c05 = beta.b05 WHERE b02 = 71",
        [
            "join | for each row in {TAB4}, find corresponding rows in {TAB5}",
            "select | find {COL1} of {TAB2} whose {COL4} {OP1} {LIT1}",
        ],
    ),
    (
        "SELECT count(*) FROM alpha JOIN beta ON alpha.c05 = beta.b05",
        [
            "join | for each row in {TAB3}, find corresponding rows in {TAB4}",
            "select | find the {AGG1} of rows of {TAB1}",
        ],
    ),
    (
        "SELECT c01 FROM alpha JOIN beta ON alpha.c05 = beta.b05 WHERE b02 > 71 AND c02 = 72",
        [
            "join | for each row in {TAB4}, find corresponding rows in {TAB5}",
            "select | find {COL1} of {TAB2} whose {COL4} {OP1} {LIT1} and {COL5} {OP2} {LIT2}",
        ],
    ),
    (
        "SELECT c01 FROM alpha JOIN beta ON alpha.c05 = beta.b05 ORDER BY b01 DESC",
        [
            "join | for each row in {TAB4}, find corresponding rows in {TAB5}",
            "select | find {COL1} of {TAB2}",
            "order | direction=desc | subject={COL4} | order the results descending by {COL4}",
        ],
    ),
    (
        "SELECT c01 FROM alpha JOIN beta ON alpha.c05 = beta.b05 GROUP BY c02 ORDER BY count(*) DESC",
        [
            "join | for each row in {TAB4}, find corresponding rows in {TAB5}",
            "aggregate | find each value of {COL4} in {TAB2}, also keeping {COL1}",
            "order | direction=desc | subject=the {AGG1} of rows | "
            "order the results descending by the {AGG1} of rows",
        ],
    ),
    (
        "SELECT c01 FROM alpha JOIN beta JOIN gamma "
        "ON alpha.c05 = beta.b05 AND beta.b04 = gamma.g03",
        [
            "join | for each row in {TAB5}, find corresponding rows in {TAB6}",
            "join | for each row in {TAB7}, find corresponding rows in {TAB8}",
            "select | find {COL1} of {TAB2}",
        ],
    ),
]


def slot_replacements(template):
    """Map each slot's composed surface text back to the slot marker."""
    replacements = []
    for name, surface in template.slots:
        kind = name.rstrip("0123456789")
        if kind == "OP":
            rendered = OP_PHRASES[surface]
        elif kind == "AGG":
            rendered = AGG_PHRASES[surface]
        elif kind in ("TAB", "COL"):
            rendered = surface.lower()
        else:
            rendered = surface
        replacements.append((rendered, "{" + name + "}"))
    # Longest surface first so e.g. "is greater than or equal to" is not
    # clobbered by "is greater than".
    replacements.sort(key=lambda pair: -len(pair[0]))
    return replacements


def main():
    planner = _Planner(AUTHORING_SCHEMA, empty_library())
    print("# Starter explanation template library.")
    print("# Regenerate with scripts/make_starter_library.py; edits welcome.")
    seen = set()
    entries = [(sql, None) for sql in SHAPES] + JOIN_SHAPES
    for sql, explicit_steps in entries:
        query = parse_sql(sql, AUTHORING_SCHEMA)
        parts, combiner, limit = split_compound(query)
        assert combiner is None and limit is None and len(parts) == 1, sql
        part = parts[0]
        template = abstract_template(part)
        if template.key in seen:
            print(f"skipping duplicate key for {sql!r}", file=sys.stderr)
            continue
        seen.add(template.key)

        print()
        print("[template]")
        print(f"key: {template.key}")
        if explicit_steps is not None:
            for line in explicit_steps:
                print(f"step: {line}")
            continue

        steps = planner.compose(part)
        replacements = slot_replacements(template)

        def abstracted(text):
            for surface, marker in replacements:
                text = text.replace(surface, marker)
            return text

        for step in steps:
            fields = [step.kind]
            if step.kind == "order":
                fields.append(f"direction={step.meta['direction']}")
                fields.append(f"subject={abstracted(step.meta['subject'])}")
            fields.append(abstracted(step.text))
            print("step: " + " | ".join(fields))


if __name__ == "__main__":
    main()
