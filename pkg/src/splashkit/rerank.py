"""Beam-based correction baselines and the near-miss harvesting filter."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .diff import diff_schema_items
from .queries import CanonicalQuery
from .tokens import tokenize

NEAR_MISS_GAP = 0.2


class BeamError(ValueError):
    pass


@dataclass(frozen=True)
class BeamCandidate:
    query: CanonicalQuery
    score: float
    rank: int


@dataclass(frozen=True)
class RerankChoice:
    chosen: BeamCandidate
    method: str
    candidate_scores: Optional[tuple] = None  # handcrafted only


def _check_beam(beam, minimum: int = 2) -> None:
    if len(beam) < minimum:
        raise BeamError(f"beam of size {len(beam)} is too small (need >= {minimum})")
    for i, candidate in enumerate(beam):
        if candidate.rank != i:
            raise BeamError(f"candidate at position {i} has rank {candidate.rank}")
        if i and candidate.score > beam[i - 1].score:
            raise BeamError("beam scores must be non-increasing with rank")


def rerank_uniform(beam, rng_seed: int) -> RerankChoice:
    """Discard the top candidate and draw uniformly from the rest."""
    _check_beam(beam)
    rng = random.Random(rng_seed)
    return RerankChoice(chosen=rng.choice(beam[1:]), method="uniform")


def rerank_score(beam, rng_seed: int) -> RerankChoice:
    """Discard the top candidate and draw from the rest with probability
    proportional to the parser score."""
    _check_beam(beam)
    tail = beam[1:]
    total = sum(c.score for c in tail)
    if total <= 0:
        raise BeamError("scores of the non-top candidates are all zero")
    rng = random.Random(rng_seed)
    return RerankChoice(chosen=rng.choices(tail, weights=[c.score for c in tail])[0],
                        method="score")


def rerank_second(beam) -> RerankChoice:
    """Deterministically pick the second-best candidate."""
    _check_beam(beam)
    return RerankChoice(chosen=beam[1], method="second_best")


def feedback_match_score(candidate: CanonicalQuery, mispredicted: CanonicalQuery,
                         feedback: str) -> int:
    """Count diff schema items all of whose sub-tokens occur in the feedback."""
    feedback_tokens = set(tokenize(feedback, mode="feedback"))
    score = 0
    for item in diff_schema_items(candidate, mispredicted):
        item_tokens = tokenize(item, mode="feedback")
        if item_tokens and all(token in feedback_tokens for token in item_tokens):
            score += 1
    return score


def rerank_handcrafted(beam, mispredicted: CanonicalQuery, feedback: str) -> RerankChoice:
    """Pick the candidate whose diff with the mispredicted parse matches the
    feedback best; ties go to the lower rank (higher parser score)."""
    if not beam:
        raise BeamError("beam is empty")
    scores = tuple(
        feedback_match_score(c.query, mispredicted, feedback) for c in beam
    )
    best = max(range(len(beam)), key=lambda i: (scores[i], -i))
    return RerankChoice(chosen=beam[best], method="handcrafted", candidate_scores=scores)


def load_beams(path: str, schemas) -> list[list[BeamCandidate]]:
    """Load a beam file: one JSON object per line with ``db_id`` and ordered
    ``candidates`` of ``{sql, score}``."""
    import json

    from .parser import parse_sql

    beams = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            doc = json.loads(line)
            schema = schemas.get(doc["db_id"])
            if schema is None:
                raise BeamError(f"line {line_no}: no schema for db_id {doc['db_id']!r}")
            beam = [
                BeamCandidate(
                    query=parse_sql(c["sql"], schema),
                    score=float(c["score"]),
                    rank=i,
                )
                for i, c in enumerate(doc["candidates"])
            ]
            _check_beam(beam, minimum=1)
            beams.append(beam)
    return beams


def near_miss_filter(beam) -> Optional[BeamCandidate]:
    """When harvesting erroneous parses: keep the runner-up only if it was
    almost chosen (score gap to the top strictly below 0.2)."""
    _check_beam(beam)
    if beam[0].score - beam[1].score < NEAR_MISS_GAP:
        return beam[1]
    return None
