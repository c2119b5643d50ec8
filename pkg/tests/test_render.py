import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from splashkit.metrics import exact_set_match
from splashkit.parser import parse_sql
from splashkit.render import render_sql
from splashkit.synth import random_query

from conftest import DATASET_PATH, FIXTURES


def corpus_sql():
    """Every SQL string shipped in the fixtures (dataset + explanation set)."""
    out = []
    with open(DATASET_PATH, encoding="utf-8") as fh:
        for line in fh:
            record = json.loads(line)
            out.append((record["db_id"], record["predicted_sql"]))
            out.append((record["db_id"], record["gold_sql"]))
    with open(FIXTURES / "explain_queries.json", encoding="utf-8") as fh:
        for entry in json.load(fh):
            out.append((entry["db_id"], entry["sql"]))
    return out


def test_minimal_round_trip_form(school):
    query = parse_sql("select first_name from students", school)
    assert render_sql(query) == "SELECT students.first_name FROM students"


def test_order_by_precedes_limit(school):
    query = parse_sql(
        "SELECT last_name FROM teachers ORDER BY salary DESC LIMIT 1", school
    )
    text = render_sql(query)
    assert "ORDER BY teachers.salary DESC" in text
    assert text.index("ORDER BY") < text.index("LIMIT 1")


def test_having_example_round_trips_to_esm_equal(school):
    query = parse_sql(
        "SELECT TYPE FROM school GROUP BY TYPE HAVING count(*) >= 2", school
    )
    again = parse_sql(render_sql(query), school)
    assert exact_set_match(again, query)


def test_string_literal_escaping_round_trips(shop):
    query = parse_sql(
        "SELECT price FROM products WHERE product_name = 'O''Brien'", shop
    )
    again = parse_sql(render_sql(query), shop)
    assert exact_set_match(again, query)


@pytest.mark.parametrize("db_id,sql", corpus_sql())
def test_corpus_round_trip(schemas, db_id, sql):
    schema = schemas[db_id]
    query = parse_sql(sql, schema)
    again = parse_sql(render_sql(query), schema)
    assert exact_set_match(again, query)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10**9))
def test_generated_round_trip(schemas, seed):
    rng = random.Random(seed)
    schema = schemas[sorted(schemas)[seed % len(schemas)]]
    query = random_query(schema, rng)
    again = parse_sql(render_sql(query), schema)
    assert exact_set_match(again, query)


def test_render_deterministic(schemas):
    rng = random.Random(7)
    query = random_query(schemas["race_db"], rng)
    assert render_sql(query) == render_sql(query)
