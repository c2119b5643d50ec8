"""Explanation template library: data model, file format, and phrasebook."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

_SLOT = re.compile(r"\{((?:TAB|COL|AGG|OP|LIT)\d+)\}")


class LibraryError(ValueError):
    pass


# Per-clause phrasings used both by the compositional fallback and by the
# starter library entries.
OP_PHRASES = {
    "=": "equals",
    "!=": "does not equal",
    "<": "is less than",
    "<=": "is less than or equal to",
    ">": "is greater than",
    ">=": "is greater than or equal to",
    "like": "contains",
    "between": "is between",
    "in": "is in",
    "not in": "is not in",
}

AGG_PHRASES = {
    "count": "number",
    "sum": "sum",
    "avg": "average",
    "min": "minimum",
    "max": "maximum",
}

DIRECTION_PHRASES = {"asc": "ascending", "desc": "descending"}

COMBINER_PHRASES = {
    "intersect": "show the rows that are in both the results of step {step:X} and step {step:Y}",
    "union": "show the rows that are in any of the results of step {step:X} and step {step:Y}",
    "except": "show the rows that are in the results of step {step:X} but not in the results of step {step:Y}",
}

LIMIT_PHRASE = "only keep the first {n} rows of the results in step {step:P}"
JOIN_PHRASE = "for each row in {t1}, find corresponding rows in {t2}"
DISTINCT_PHRASE = "without repetition"


@dataclass(frozen=True)
class TemplateStep:
    kind: str  # join | select | aggregate | order
    text: str
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ExplanationTemplate:
    template_key: str
    step_patterns: tuple  # of TemplateStep

    def __post_init__(self):
        if not self.step_patterns:
            raise LibraryError(f"template {self.template_key!r} has no steps")


def _key_slots(key: str) -> set[str]:
    return set(re.findall(r"\b((?:TAB|COL|AGG|OP|LIT)\d+)\b", key))


@dataclass(frozen=True)
class TemplateLibrary:
    templates: dict  # key -> ExplanationTemplate

    def get(self, key: str):
        return self.templates.get(key)

    def __len__(self) -> int:
        return len(self.templates)


def _parse_step(line: str, key: str) -> TemplateStep:
    parts = [p.strip() for p in line.split("|")]
    if len(parts) < 2:
        raise LibraryError(f"template {key!r}: malformed step line {line!r}")
    kind = parts[0]
    meta = {}
    for part in parts[1:-1]:
        if "=" not in part:
            raise LibraryError(f"template {key!r}: malformed step field {part!r}")
        name, value = part.split("=", 1)
        meta[name.strip()] = value.strip()
    return TemplateStep(kind=kind, text=parts[-1], meta=meta)


def load_library(path: str) -> TemplateLibrary:
    """Load a template library file.

    Format: ``[template]`` blocks with one ``key:`` line and one or more
    ``step:`` lines of the form ``kind | name=value ... | step text`` where
    slots are written ``{COL1}``, ``{TAB1}``, ``{AGG1}``, ``{OP1}``, ``{LIT1}``.
    """
    templates: dict[str, ExplanationTemplate] = {}
    key = None
    steps: list[TemplateStep] = []

    def flush():
        nonlocal key, steps
        if key is None:
            if steps:
                raise LibraryError("step lines before any key")
            return
        if key in templates:
            raise LibraryError(f"duplicate template key {key!r}")
        entry = ExplanationTemplate(template_key=key, step_patterns=tuple(steps))
        _check_bound(entry)
        templates[key] = entry
        key, steps = None, []

    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line == "[template]":
                flush()
            elif line.startswith("key:"):
                if key is not None:
                    raise LibraryError(f"template {key!r}: repeated key line")
                key = line[len("key:"):].strip()
            elif line.startswith("step:"):
                if key is None:
                    raise LibraryError("step line before key line")
                steps.append(_parse_step(line[len("step:"):].strip(), key))
            else:
                raise LibraryError(f"unrecognized library line {line!r}")
    flush()
    return TemplateLibrary(templates=templates)


def _check_bound(entry: ExplanationTemplate) -> None:
    bound = _key_slots(entry.template_key)
    for step in entry.step_patterns:
        used = set(_SLOT.findall(step.text)) | set(_SLOT.findall(step.meta.get("subject", "")))
        unbound = used - bound
        if unbound:
            raise LibraryError(
                f"template {entry.template_key!r}: slot {{{sorted(unbound)[0]}}} "
                f"is not bound by the key"
            )


def empty_library() -> TemplateLibrary:
    return TemplateLibrary(templates={})
