"""Generate the test fixtures shipped under tests/fixtures/.

Produces:
  - sample_dataset.jsonl    50 validated wrong-parse records
  - beams.jsonl             synthetic beams aligned line-by-line with the dataset
  - explain_queries.json    25 queries spanning the explanation feature set
  - goldens/explain/qNN.txt frozen explanation steps for each of the 25
  - coverage_golden.json    template-library coverage on the 25-query fixture

The beam fixture is constructed so the handcrafted re-ranker picks the gold
parse on every line: feedback names the schema items in the gold-vs-predicted
diff, and lines where a filler candidate would tie ahead of the gold are
re-rolled with the next seed.
"""

from __future__ import annotations

import json
import pathlib
import random

from splashkit.dataset import load_dataset
from splashkit.diff import diff_schema_items
from splashkit.explain import coverage, explain
from splashkit.library import load_library
from splashkit.metrics import exact_set_match
from splashkit.render import render_sql
from splashkit.rerank import rerank_handcrafted
from splashkit.schema import load_schemas
from splashkit.synth import mutate_column, mutate_literal, random_query, synthetic_beam
from splashkit.tokens import feedback_token_count

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "tests" / "fixtures"
GOLDEN_DIR = FIXTURES / "goldens" / "explain"

SPLIT_PLAN = ["train"] * 30 + ["dev"] * 10 + ["test"] * 10
SOURCE_CYCLE = ["top1", "top1", "near_miss"]


def make_feedback(pred, gold) -> str:
    items = sorted(diff_schema_items(pred, gold))
    if not items:
        return ""
    words = " and ".join(item.replace("_", " ") for item in items[:3])
    text = f"you should use {words}"
    if feedback_token_count(text) > 15:
        return ""
    return text


def make_example(schema, seed: int):
    """One (gold, pred, feedback, beam) tuple, or None if the seed is unlucky."""
    rng = random.Random(seed)
    gold = random_query(schema, rng)
    pred = mutate_column(gold, schema, rng) or mutate_literal(gold, rng)
    if pred is None or exact_set_match(pred, gold):
        return None
    feedback = make_feedback(pred, gold)
    if not feedback:
        return None
    beam = synthetic_beam(gold, pred, schema, rng, size=5)
    choice = rerank_handcrafted(beam, pred, feedback)
    if not exact_set_match(choice.chosen.query, gold):
        return None
    return gold, pred, feedback, beam


def build_dataset():
    schemas = load_schemas(str(FIXTURES / "schemas.json"))
    db_cycle = sorted(schemas)
    records, beams = [], []
    seed = 0
    index = 0
    seen_pairs = set()
    while len(records) < 50:
        seed += 1
        schema = schemas[db_cycle[index % len(db_cycle)]]
        made = make_example(schema, seed)
        if made is None:
            continue
        gold, pred, feedback, beam = made
        pred_sql, gold_sql = render_sql(pred), render_sql(gold)
        if (schema.db_id, pred_sql, gold_sql) in seen_pairs:
            continue
        seen_pairs.add((schema.db_id, pred_sql, gold_sql))
        records.append({
            "db_id": schema.db_id,
            "question": f"sample question {len(records) + 1} over {schema.db_id}",
            "predicted_sql": pred_sql,
            "gold_sql": gold_sql,
            "feedback": feedback,
            "split": SPLIT_PLAN[len(records)],
            "source": SOURCE_CYCLE[len(records) % len(SOURCE_CYCLE)],
            "beam_ref": f"beam-{len(records):03d}",
        })
        beams.append({
            "db_id": schema.db_id,
            "candidates": [
                {"sql": render_sql(c.query), "score": c.score} for c in beam
            ],
        })
        index += 1

    with open(FIXTURES / "sample_dataset.jsonl", "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")
    with open(FIXTURES / "beams.jsonl", "w", encoding="utf-8") as fh:
        for beam in beams:
            fh.write(json.dumps(beam) + "\n")
    # sanity: the file must load back under strict validation
    loaded = load_dataset(str(FIXTURES / "sample_dataset.jsonl"), schemas)
    assert len(loaded) == 50
    print(f"dataset: {len(records)} records, {len(beams)} beams")


EXPLAIN_QUERIES = [
    # plain selects / conditions
    ("school_db", "SELECT first_name FROM students"),
    ("school_db", "SELECT first_name, last_name FROM students"),
    ("school_db", "SELECT name FROM school WHERE type = 'public'"),
    ("school_db", "SELECT first_name FROM students WHERE age > 16 AND gpa >= 3.5"),
    ("school_db", "SELECT name FROM school WHERE enrollment BETWEEN 500 AND 2000"),
    ("race_db", "SELECT name FROM circuits WHERE country LIKE 'Aus'"),
    ("shop_db", "SELECT product_name FROM products WHERE category = 'bags' OR price < 20"),
    # distinct
    ("school_db", "SELECT DISTINCT type FROM school"),
    # aggregation / group by / having
    ("school_db", "SELECT count(*) FROM students"),
    ("school_db", "SELECT avg(salary) FROM teachers"),
    ("race_db", "SELECT year, count(*) FROM races GROUP BY year"),
    ("school_db", "SELECT type FROM school GROUP BY type HAVING count(*) >= 2"),
    ("shop_db", "SELECT category, max(price) FROM products GROUP BY category"),
    # joins
    ("school_db", "SELECT students.first_name FROM students JOIN school ON students.school_id = school.id"),
    ("school_db", "SELECT t.last_name FROM teachers AS t JOIN school AS s ON t.school_id = s.id WHERE s.type = 'private'"),
    ("race_db", "SELECT races.name FROM races JOIN circuits ON races.circuitid = circuits.circuitid WHERE circuits.country = 'France'"),
    ("shop_db", "SELECT orders.customer_name FROM orders JOIN products ON orders.product_id = products.product_id WHERE products.price > 30"),
    # order by / limit
    ("school_db", "SELECT first_name FROM students ORDER BY gpa DESC"),
    ("shop_db", "SELECT product_name FROM products ORDER BY price ASC LIMIT 3"),
    ("school_db", "SELECT last_name FROM teachers ORDER BY salary DESC LIMIT 1"),
    ("school_db", "SELECT first_name FROM students ORDER BY age ASC LIMIT 1"),
    # nesting and compounds
    ("school_db", "SELECT name FROM school WHERE id IN (SELECT school_id FROM students WHERE gpa > 3.5)"),
    ("race_db", "SELECT name FROM circuits INTERSECT SELECT name FROM races"),
    ("school_db", "SELECT first_name FROM students UNION SELECT first_name FROM teachers"),
    ("school_db", "SELECT last_name FROM students EXCEPT SELECT last_name FROM teachers"),
]


def build_goldens():
    from splashkit.parser import parse_sql

    schemas = load_schemas(str(FIXTURES / "schemas.json"))
    library = load_library(str(ROOT / "src" / "splashkit" / "data" / "starter_templates.txt"))
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    with open(FIXTURES / "explain_queries.json", "w", encoding="utf-8") as fh:
        json.dump([{"db_id": d, "sql": s} for d, s in EXPLAIN_QUERIES], fh, indent=2)
        fh.write("\n")
    queries = []
    for number, (db_id, sql) in enumerate(EXPLAIN_QUERIES, start=1):
        query = parse_sql(sql, schemas[db_id])
        queries.append(query)
        steps = explain(query, schemas[db_id], library)
        path = GOLDEN_DIR / f"q{number:02d}.txt"
        path.write_text(
            "".join(f"{i}. {s}\n" for i, s in enumerate(steps.steps, start=1)),
            encoding="utf-8",
        )
    report = coverage(queries, library)
    with open(FIXTURES / "coverage_golden.json", "w", encoding="utf-8") as fh:
        json.dump({
            "fraction": report.fraction,
            "matched": report.matched,
            "total": report.total,
        }, fh, indent=2)
        fh.write("\n")
    print(f"goldens: {len(queries)} queries, coverage {report.fraction:.4f}")


if __name__ == "__main__":
    build_dataset()
    build_goldens()
