"""SPLASH-format dataset ingestion, validation, splitting, and statistics.

The canonical record format is line-delimited JSON with the fields of
SplashExample; an import adapter config maps external field names onto the
canonical ones.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Optional

from .metrics import exact_set_match
from .parser import ParseError, parse_sql
from .queries import CanonicalQuery
from .tokens import tokenize

SPLITS = ("train", "dev", "test")
SOURCES = ("top1", "near_miss", "paraphrase")


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class SplashExample:
    db_id: str
    question: str
    predicted_sql: str
    gold_sql: str
    feedback: str
    split: str
    beam_ref: Optional[str] = None
    source: Optional[str] = None
    predicted: Optional[CanonicalQuery] = field(default=None, compare=False)
    gold: Optional[CanonicalQuery] = field(default=None, compare=False)


@dataclass(frozen=True)
class SplitSummary:
    examples: int
    databases: int
    unique_questions: int
    unique_wrong_parses: int
    unique_gold_parses: int
    unique_feedbacks: int
    avg_feedback_tokens: float


@dataclass(frozen=True)
class DatasetSummary:
    per_split: dict  # split -> SplitSummary


def _validate_record(record: dict, schemas, line_no: int) -> SplashExample:
    for key in ("db_id", "question", "predicted_sql", "gold_sql", "feedback", "split"):
        value = record.get(key)
        if not isinstance(value, str) or not value.strip():
            raise DatasetError(f"line {line_no}: field {key!r} is missing or empty")
    if record["split"] not in SPLITS:
        raise DatasetError(f"line {line_no}: unknown split {record['split']!r}")
    source = record.get("source")
    if source is not None and source not in SOURCES:
        raise DatasetError(f"line {line_no}: unknown source tag {source!r}")
    db_id = record["db_id"]
    if db_id not in schemas:
        raise DatasetError(f"line {line_no}: no schema for db_id {db_id!r}")
    schema = schemas[db_id]
    try:
        predicted = parse_sql(record["predicted_sql"], schema)
    except (ParseError, ValueError) as exc:
        raise DatasetError(f"line {line_no}: predicted_sql does not parse: {exc}") from exc
    try:
        gold = parse_sql(record["gold_sql"], schema)
    except (ParseError, ValueError) as exc:
        raise DatasetError(f"line {line_no}: gold_sql does not parse: {exc}") from exc
    if exact_set_match(predicted, gold):
        raise DatasetError(
            f"line {line_no}: predicted and gold parses are exact-set-equal "
            f"(wrong-parse records must differ)"
        )
    return SplashExample(
        db_id=db_id,
        question=record["question"],
        predicted_sql=record["predicted_sql"],
        gold_sql=record["gold_sql"],
        feedback=record["feedback"],
        split=record["split"],
        beam_ref=record.get("beam_ref"),
        source=source,
        predicted=predicted,
        gold=gold,
    )


def load_dataset(path: str, schemas, strict: bool = True,
                 field_map: Optional[dict] = None):
    """Load and validate a line-delimited dataset file.

    With ``strict`` false, invalid records are skipped and returned as a
    second list of (line_no, reason) pairs instead of raising.
    ``field_map`` maps external field names to canonical ones for importing
    third-party releases.
    """
    examples: list[SplashExample] = []
    problems: list[tuple[int, str]] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"line {line_no}: invalid JSON: {exc}") from exc
            if field_map:
                record = {field_map.get(k, k): v for k, v in record.items()}
            try:
                examples.append(_validate_record(record, schemas, line_no))
            except DatasetError as exc:
                if strict:
                    raise
                problems.append((line_no, str(exc)))
    if strict:
        return examples
    return examples, problems


def _split_summary(examples) -> SplitSummary:
    token_counts = [len(tokenize(e.feedback, mode="feedback")) for e in examples]
    return SplitSummary(
        examples=len(examples),
        databases=len({e.db_id for e in examples}),
        unique_questions=len({e.question for e in examples}),
        unique_wrong_parses=len({e.predicted_sql for e in examples}),
        unique_gold_parses=len({e.gold_sql for e in examples}),
        unique_feedbacks=len({e.feedback for e in examples}),
        avg_feedback_tokens=sum(token_counts) / len(token_counts) if token_counts else 0.0,
    )


def summary_stats(examples) -> DatasetSummary:
    """Per-split example counts, uniqueness counts, and feedback length."""
    per_split = {}
    for split in SPLITS:
        subset = [e for e in examples if e.split == split]
        if subset:
            per_split[split] = _split_summary(subset)
    return DatasetSummary(per_split=per_split)


def split_by_database(examples, holdout_fraction: float, seed: int):
    """Partition examples into (train, dev) with no database on both sides.

    Databases are shuffled with the given seed, then moved to dev until the
    dev example share is as close as possible to the requested fraction.
    """
    if not 0.0 < holdout_fraction < 1.0:
        raise DatasetError("holdout fraction must be strictly between 0 and 1")
    db_ids = sorted({e.db_id for e in examples})
    if len(db_ids) < 2:
        raise DatasetError("need at least 2 databases to split by database")
    counts = {db: sum(1 for e in examples if e.db_id == db) for db in db_ids}
    rng = random.Random(seed)
    rng.shuffle(db_ids)

    total = len(examples)
    target = holdout_fraction * total
    dev_dbs: set[str] = set()
    dev_count = 0
    for db in db_ids:
        if len(dev_dbs) == len(db_ids) - 1:
            break  # keep at least one database in train
        new_count = dev_count + counts[db]
        if abs(new_count - target) <= abs(dev_count - target) or not dev_dbs:
            dev_dbs.add(db)
            dev_count = new_count
        if dev_count >= target:
            break
    train = [e for e in examples if e.db_id not in dev_dbs]
    dev = [e for e in examples if e.db_id in dev_dbs]
    return train, dev
