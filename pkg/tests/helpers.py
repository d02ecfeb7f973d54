"""Shared test construction helpers."""

from __future__ import annotations

import random

from sacmine.model import EntityRecord, IntervalDatabase, Symbol, SymbolicInterval, build_database


def iv(start: int, end: int, concept: str, value: str = "0") -> SymbolicInterval:
    return SymbolicInterval(start, end, Symbol(concept, value))


def entity(eid: str, *intervals: SymbolicInterval, label=None) -> EntityRecord:
    return EntityRecord(eid, tuple(intervals), label)


def db_of(*entities: EntityRecord) -> IntervalDatabase:
    return build_database(list(entities))


def random_db(seed, max_entities: int = 8, max_intervals: int = 12,
              n_concepts: int = 4, n_values: int = 3,
              time_range: int = 40, max_len: int = 8,
              min_len: int = 0) -> IntervalDatabase:
    """Small random database within the reference-miner size caps."""
    rng = random.Random(seed)
    records = []
    for e in range(rng.randint(2, max_entities)):
        intervals = []
        for _ in range(rng.randint(3, max_intervals)):
            start = rng.randint(0, time_range)
            intervals.append(SymbolicInterval(
                start, start + rng.randint(min_len, max_len),
                Symbol(f"C{rng.randrange(n_concepts)}", f"V{rng.randrange(n_values)}")))
        records.append(EntityRecord(f"e{e}", tuple(intervals)))
    return build_database(records)
