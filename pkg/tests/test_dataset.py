import json

import pytest

from splashkit.dataset import (
    DatasetError,
    load_dataset,
    split_by_database,
    summary_stats,
)

from conftest import DATASET_PATH


@pytest.fixture(scope="module")
def examples(schemas):
    return load_dataset(str(DATASET_PATH), schemas)


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")


def valid_record(**overrides):
    record = {
        "db_id": "school_db",
        "question": "how many students are there?",
        "predicted_sql": "SELECT count(*) FROM teachers",
        "gold_sql": "SELECT count(*) FROM students",
        "feedback": "count students not teachers",
        "split": "train",
        "source": "top1",
    }
    record.update(overrides)
    return record


class TestLoad:
    def test_shipped_sample_validates(self, examples):
        assert len(examples) == 50
        assert all(e.predicted is not None and e.gold is not None for e in examples)

    def test_line_count_matches(self, examples):
        with open(DATASET_PATH, encoding="utf-8") as fh:
            lines = [line for line in fh if line.strip()]
        assert len(lines) == len(examples)

    def test_esm_equal_pair_rejected_strict(self, schemas, tmp_path):
        path = tmp_path / "bad.jsonl"
        write_jsonl(path, [valid_record(predicted_sql="SELECT count(*) FROM students")])
        with pytest.raises(DatasetError, match="exact-set-equal"):
            load_dataset(str(path), schemas)

    def test_unknown_db_rejected(self, schemas, tmp_path):
        path = tmp_path / "bad.jsonl"
        write_jsonl(path, [valid_record(db_id="mystery_db")])
        with pytest.raises(DatasetError, match="mystery_db"):
            load_dataset(str(path), schemas)

    def test_empty_field_rejected(self, schemas, tmp_path):
        path = tmp_path / "bad.jsonl"
        write_jsonl(path, [valid_record(feedback="  ")])
        with pytest.raises(DatasetError, match="feedback"):
            load_dataset(str(path), schemas)

    def test_unparseable_sql_rejected(self, schemas, tmp_path):
        path = tmp_path / "bad.jsonl"
        write_jsonl(path, [valid_record(gold_sql="SELECT FROM WHERE")])
        with pytest.raises(DatasetError, match="gold_sql"):
            load_dataset(str(path), schemas)

    def test_lenient_mode_skips_and_reports(self, schemas, tmp_path):
        path = tmp_path / "mixed.jsonl"
        write_jsonl(path, [valid_record(), valid_record(db_id="mystery_db")])
        loaded, problems = load_dataset(str(path), schemas, strict=False)
        assert len(loaded) == 1
        assert len(problems) == 1 and problems[0][0] == 2

    def test_field_map_adapter(self, schemas, tmp_path):
        record = valid_record()
        external = {
            "database_id": record["db_id"],
            "nl_question": record["question"],
            "wrong_sql": record["predicted_sql"],
            "correct_sql": record["gold_sql"],
            "feedback": record["feedback"],
            "split": record["split"],
        }
        path = tmp_path / "external.jsonl"
        write_jsonl(path, [external])
        loaded = load_dataset(str(path), schemas, field_map={
            "database_id": "db_id",
            "nl_question": "question",
            "wrong_sql": "predicted_sql",
            "correct_sql": "gold_sql",
        })
        assert len(loaded) == 1 and loaded[0].db_id == "school_db"


class TestSummary:
    def test_empty_input(self):
        assert summary_stats([]).per_split == {}

    def test_shared_question_counts_once(self, schemas, tmp_path):
        path = tmp_path / "dupes.jsonl"
        write_jsonl(path, [
            valid_record(),
            valid_record(predicted_sql="SELECT count(*) FROM school"),
            valid_record(predicted_sql="SELECT sum(id) FROM students"),
        ])
        summary = summary_stats(load_dataset(str(path), schemas))
        train = summary.per_split["train"]
        assert train.examples == 3
        assert train.unique_questions == 1
        assert train.unique_wrong_parses == 3

    def test_sample_dataset_summary(self, examples):
        summary = summary_stats(examples)
        assert {"train", "dev", "test"} == set(summary.per_split)
        assert summary.per_split["train"].examples == 30
        assert summary.per_split["dev"].examples == 10
        assert summary.per_split["test"].examples == 10
        for split in summary.per_split.values():
            assert split.unique_questions <= split.examples
            assert 0 < split.avg_feedback_tokens <= 15


class TestSplitByDatabase:
    def test_partition_is_exact(self, examples):
        train, dev = split_by_database(examples, holdout_fraction=0.2, seed=1)
        assert len(train) + len(dev) == len(examples)
        assert {e.db_id for e in train}.isdisjoint({e.db_id for e in dev})

    def test_seed_determinism(self, examples):
        first = split_by_database(examples, holdout_fraction=0.2, seed=5)
        second = split_by_database(examples, holdout_fraction=0.2, seed=5)
        assert first == second

    def test_bad_fraction(self, examples):
        with pytest.raises(DatasetError):
            split_by_database(examples, holdout_fraction=1.5, seed=0)

    def test_single_database_rejected(self, examples):
        school_only = [e for e in examples if e.db_id == "school_db"]
        with pytest.raises(DatasetError):
            split_by_database(school_only, holdout_fraction=0.2, seed=0)
