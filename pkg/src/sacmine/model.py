"""Core temporal entities: symbols, intervals, entity records, databases, folds.

Timestamps are plain integers in whatever base unit the dataset was ingested
with (hours, days, ...); all downstream arithmetic is exact.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import NamedTuple


class Symbol(NamedTuple):
    """A discrete state of a concept. The semantic type is the concept alone."""

    concept_id: str
    value_id: str

    @property
    def sem_type(self) -> str:
        return self.concept_id

    def __str__(self) -> str:
        return f"{self.concept_id}={self.value_id}"


class SymbolicInterval(NamedTuple):
    """A time span [start, end] over which a symbol holds.

    Field order makes tuple comparison the lexicographic interval order:
    start, then end, then symbol.
    """

    start: int
    end: int
    symbol: Symbol

    @property
    def sem_type(self) -> str:
        return self.symbol.concept_id


def lex_compare(a: SymbolicInterval, b: SymbolicInterval) -> int:
    """Total order by (start, end, concept_id, value_id). Returns -1, 0 or 1."""
    if a < b:
        return -1
    if a == b:
        return 0
    return 1


@dataclass(frozen=True)
class EntityRecord:
    entity_id: str
    intervals: tuple[SymbolicInterval, ...]
    label: str | None = None


def normalize_entity(record: EntityRecord) -> EntityRecord:
    """Sort intervals lexicographically and drop exact duplicates. Idempotent.

    Rejects intervals with start > end.
    """
    for iv in record.intervals:
        if iv.start > iv.end:
            raise ValueError(
                f"entity {record.entity_id!r}: interval start {iv.start} > end {iv.end}"
            )
    return EntityRecord(record.entity_id, tuple(sorted(set(record.intervals))), record.label)


@dataclass(frozen=True)
class ConceptMeta:
    concept_id: str
    values: frozenset[str]
    validity: tuple[int, int] | None = None


@dataclass(frozen=True)
class IntervalDatabase:
    """An immutable, normalized collection of entity records."""

    entities: tuple[EntityRecord, ...]
    concepts: dict[str, ConceptMeta] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entities)


def build_database(records, validity=None) -> IntervalDatabase:
    """Normalize records, enforce unique entity ids, build the concept registry.

    validity: optional map concept_id -> (before, after) recorded as metadata.
    """
    normalized = []
    seen = set()
    values: dict[str, set[str]] = {}
    for rec in records:
        if rec.entity_id in seen:
            raise ValueError(f"duplicate entity id {rec.entity_id!r}")
        seen.add(rec.entity_id)
        rec = normalize_entity(rec)
        normalized.append(rec)
        for iv in rec.intervals:
            values.setdefault(iv.symbol.concept_id, set()).add(iv.symbol.value_id)
    concepts = {
        cid: ConceptMeta(cid, frozenset(vals), (validity or {}).get(cid))
        for cid, vals in sorted(values.items())
    }
    return IntervalDatabase(tuple(normalized), concepts)


@dataclass(frozen=True)
class FoldSpec:
    mining_folds: int = 3
    cv_folds: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.mining_folds < 2 or self.cv_folds < 2:
            raise ValueError("fold counts must be >= 2")


def assign_folds(db: IntervalDatabase, spec: FoldSpec) -> dict[str, tuple[int, int]]:
    """Deterministic stratified split: entity_id -> (mining_fold, cv_fold).

    Entities are grouped by label, shuffled with the seeded RNG, and dealt
    round-robin with one global counter per fold dimension, so both per-label
    and total fold sizes differ by at most one.
    """
    ids = [e.entity_id for e in db.entities]
    for name, n in (("mining", spec.mining_folds), ("cv", spec.cv_folds)):
        if len(ids) < n:
            raise ValueError(f"{len(ids)} entities cannot fill {n} {name} folds")
    groups: dict[str, list[str]] = {}
    for e in db.entities:
        groups.setdefault(e.label or "", []).append(e.entity_id)
    mining = _deal(groups, spec.mining_folds, random.Random(f"{spec.seed}|mining"))
    cv = _deal(groups, spec.cv_folds, random.Random(f"{spec.seed}|cv"))
    return {eid: (mining[eid], cv[eid]) for eid in ids}


def _deal(groups: dict[str, list[str]], n_folds: int, rng: random.Random) -> dict[str, int]:
    out = {}
    cursor = 0
    for label in sorted(groups):
        ids = sorted(groups[label])
        rng.shuffle(ids)
        for eid in ids:
            out[eid] = cursor % n_folds
            cursor += 1
    return out
