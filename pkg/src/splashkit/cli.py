"""Command-line front door for explanations, diffs, evaluation, re-ranking,
dataset statistics, coverage audits, and the annotation service."""

from __future__ import annotations

import json
import sys
from importlib import resources

import click

from . import diff as diff_mod
from .dataset import load_dataset, summary_stats
from .explain import NonExplainableError, coverage as coverage_op, explain
from .library import load_library
from .metrics import correction_accuracy, end_to_end_accuracy, exact_set_match
from .parser import ParseError, parse_sql
from .rerank import (
    load_beams,
    rerank_handcrafted,
    rerank_score,
    rerank_second,
    rerank_uniform,
)
from .schema import load_schemas


def default_templates_path() -> str:
    return str(resources.files("splashkit").joinpath("data/starter_templates.txt"))


def _load_schemas_or_die(path: str):
    if not path:
        raise click.UsageError("a schema file is required (--schemas or SPLASHKIT_SCHEMAS)")
    return load_schemas(path)


@click.group(context_settings={"auto_envvar_prefix": "SPLASHKIT"})
def main():
    """splashkit: explain, diff, evaluate, and correct SQL parses."""


_schemas_option = click.option("--schemas", envvar="SPLASHKIT_SCHEMAS",
                               help="Path to the schema file.")
_format_option = click.option("--format", "fmt", type=click.Choice(["human", "machine"]),
                              default="human", show_default=True)


@main.command("explain")
@click.option("--sql", required=True)
@click.option("--db", "db_id", required=True)
@click.option("--templates", default=None, help="Template library path.")
@_schemas_option
@_format_option
def explain_cmd(sql, db_id, templates, schemas, fmt):
    """Explain a SQL query as numbered natural-language steps."""
    schema_map = _load_schemas_or_die(schemas)
    if db_id not in schema_map:
        raise click.ClickException(f"no schema for db {db_id!r}")
    library = load_library(templates or default_templates_path())
    try:
        query = parse_sql(sql, schema_map[db_id])
        steps = explain(query, schema_map[db_id], library)
    except (ParseError, NonExplainableError) as exc:
        raise click.ClickException(str(exc))
    if fmt == "machine":
        click.echo(json.dumps({"steps": list(steps.steps)}))
    else:
        for number, step in enumerate(steps.steps, start=1):
            click.echo(f"{number}. {step}")


@main.command("diff")
@click.option("--pred", default=None, help="Predicted SQL text.")
@click.option("--gold", default=None, help="Gold SQL text.")
@click.option("--db", "db_id", default=None)
@click.option("--report", is_flag=True, help="Emit a corpus ErrorReport over --data.")
@click.option("--data", default=None, help="Dataset file for --report.")
@_schemas_option
@_format_option
def diff_cmd(pred, gold, db_id, report, data, schemas, fmt):
    """Edit segments between two parses, or a corpus error report."""
    schema_map = _load_schemas_or_die(schemas)
    if report:
        if not data:
            raise click.UsageError("--report requires --data")
        examples = load_dataset(data, schema_map)
        error_report = diff_mod.keyword_histogram(
            [(e.predicted, e.gold) for e in examples], schema_map
        )
        for row in diff_mod.report_rows(error_report):
            click.echo(row)
        return
    if not (pred and gold and db_id):
        raise click.UsageError("--pred, --gold and --db are required without --report")
    if db_id not in schema_map:
        raise click.ClickException(f"no schema for db {db_id!r}")
    schema = schema_map[db_id]
    try:
        pred_q = parse_sql(pred, schema)
        gold_q = parse_sql(gold, schema)
    except ParseError as exc:
        raise click.ClickException(str(exc))
    segments = diff_mod.diff_segments(pred_q, gold_q)
    items = diff_mod.diff_schema_items(pred_q, gold_q)
    if fmt == "machine":
        click.echo(json.dumps({
            "edit_distance": len(segments),
            "segments": [
                {"kind": s.kind, "position": s.position,
                 "removed": list(s.removed), "added": list(s.added),
                 "class": diff_mod.classify_edit(s, schema)}
                for s in segments
            ],
            "schema_item_diff": sorted(items),
        }))
        return
    if not segments:
        click.echo("0 edits")
        return
    click.echo(f"{len(segments)} edit segment(s)")
    for segment in segments:
        detail = diff_mod.classify_edit(segment, schema)
        click.echo(
            f"  {segment.kind} @ {segment.position}: "
            f"{' '.join(segment.removed) or '-'} -> {' '.join(segment.added) or '-'} "
            f"[{detail}]"
        )
    click.echo("schema item diff: {" + ", ".join(sorted(items)) + "}")


@main.command("eval")
@click.option("--pred-file", required=True, help="File of predicted SQL, one per line.")
@click.option("--data", required=True, help="Dataset file with gold parses.")
@click.option("--base-correct", type=int, default=None)
@click.option("--supported", type=int, default=None)
@click.option("--total", type=int, default=None)
@_schemas_option
@_format_option
def eval_cmd(pred_file, data, base_correct, supported, total, schemas, fmt):
    """Correction accuracy of predictions against a dataset's gold parses."""
    schema_map = _load_schemas_or_die(schemas)
    examples = load_dataset(data, schema_map)
    with open(pred_file, encoding="utf-8") as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if not lines:
        raise click.ClickException(f"prediction file {pred_file!r} is empty")
    if len(lines) != len(examples):
        raise click.ClickException(
            f"{len(lines)} predictions but {len(examples)} dataset examples"
        )
    predictions = [parse_sql(sql, schema_map[e.db_id]) for sql, e in zip(lines, examples)]
    outcome = correction_accuracy(predictions, [e.gold for e in examples])
    result = {
        "flags": [bool(f) for f in outcome.flags],
        "correction_accuracy": outcome.correction_accuracy,
    }
    if None not in (base_correct, supported, total):
        result["end_to_end_accuracy"] = end_to_end_accuracy(
            base_correct, supported, total, outcome.correction_accuracy * 100.0
        )
    if fmt == "machine":
        click.echo(json.dumps(result))
    else:
        click.echo(f"correction accuracy: {100.0 * outcome.correction_accuracy:.2f}")
        if "end_to_end_accuracy" in result:
            click.echo(f"end-to-end accuracy: {result['end_to_end_accuracy']:.2f}")


@main.command("rerank")
@click.option("--beams", "beams_path", required=True)
@click.option("--data", required=True)
@click.option("--method", required=True,
              type=click.Choice(["uniform", "score", "second", "handcrafted"]))
@click.option("--seed", type=int, default=0, show_default=True)
@_schemas_option
@_format_option
def rerank_cmd(beams_path, data, method, seed, schemas, fmt):
    """Re-rank beam candidates and score the method's correction accuracy."""
    schema_map = _load_schemas_or_die(schemas)
    examples = load_dataset(data, schema_map)
    beams = load_beams(beams_path, schema_map)
    if len(beams) != len(examples):
        raise click.ClickException(
            f"{len(beams)} beams but {len(examples)} dataset examples"
        )
    choices = []
    for index, (example, beam) in enumerate(zip(examples, beams)):
        if method == "uniform":
            choice = rerank_uniform(beam, rng_seed=seed + index)
        elif method == "score":
            choice = rerank_score(beam, rng_seed=seed + index)
        elif method == "second":
            choice = rerank_second(beam)
        else:
            choice = rerank_handcrafted(beam, example.predicted, example.feedback)
        choices.append(choice)
    outcome = correction_accuracy(
        [c.chosen.query for c in choices], [e.gold for e in examples]
    )
    if fmt == "machine":
        click.echo(json.dumps({
            "method": method,
            "chosen_ranks": [c.chosen.rank for c in choices],
            "correction_accuracy": outcome.correction_accuracy,
        }))
    else:
        click.echo(f"method: {method}")
        click.echo("chosen ranks: " + " ".join(str(c.chosen.rank) for c in choices))
        click.echo(f"correction accuracy: {100.0 * outcome.correction_accuracy:.2f}")


@main.command("stats")
@click.option("--data", required=True)
@_schemas_option
@_format_option
def stats_cmd(data, schemas, fmt):
    """Dataset summary statistics per split."""
    schema_map = _load_schemas_or_die(schemas)
    examples = load_dataset(data, schema_map)
    summary = summary_stats(examples)
    if fmt == "machine":
        click.echo(json.dumps({
            split: vars(s) for split, s in summary.per_split.items()
        }))
        return
    for split, s in summary.per_split.items():
        click.echo(f"[{split}]")
        click.echo(f"  examples: {s.examples}")
        click.echo(f"  databases: {s.databases}")
        click.echo(f"  unique questions: {s.unique_questions}")
        click.echo(f"  unique wrong parses: {s.unique_wrong_parses}")
        click.echo(f"  unique gold parses: {s.unique_gold_parses}")
        click.echo(f"  unique feedbacks: {s.unique_feedbacks}")
        click.echo(f"  avg feedback tokens: {s.avg_feedback_tokens:.1f}")


@main.command("coverage")
@click.option("--data", required=True)
@click.option("--templates", default=None)
@_schemas_option
@_format_option
def coverage_cmd(data, templates, schemas, fmt):
    """Template-library coverage over a dataset's gold parses."""
    schema_map = _load_schemas_or_die(schemas)
    examples = load_dataset(data, schema_map)
    library = load_library(templates or default_templates_path())
    report = coverage_op([e.gold for e in examples], library)
    if fmt == "machine":
        click.echo(json.dumps({
            "fraction": report.fraction,
            "matched": report.matched,
            "total": report.total,
            "unmatched_keys": list(report.unmatched_keys),
        }))
        return
    click.echo(f"coverage: {report.matched}/{report.total} ({100.0 * report.fraction:.1f}%)")
    for key, count in report.unmatched_keys:
        click.echo(f"  {count}x  {key}")


@main.command("serve")
@click.option("--config", "config_path", required=True)
def serve_cmd(config_path):
    """Run the correction/annotation HTTP service."""
    from .service import ServiceConfig, serve

    serve(ServiceConfig.from_file(config_path))


if __name__ == "__main__":
    main(sys.argv[1:])
