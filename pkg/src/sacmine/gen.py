"""Synthetic interval databases with controllable contradiction density.

Each entity carries a planted chain of concept-cycling intervals whose gaps
receive, at a configurable rate, a same-concept different-value intruder — the
exact situation the semantic-adjacency criteria prune. Labeled mode adds a
class-discriminative three-interval sequence whose order flips with the label
and whose gaps stay clean, so adjacency filtering leaves class signal intact.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .abstraction import RawPoint
from .errors import DataError
from .model import EntityRecord, IntervalDatabase, Symbol, SymbolicInterval, build_database

_STEP = 10          # chain spacing; element p occupies [10p, 10p+4]
_CHAIN_SPAN = 4
_INTRUDER_OFF = 6   # intruder occupies [10p+6, 10p+8], strictly inside the gap
_INTRUDER_SPAN = 2


@dataclass(frozen=True)
class GenSpec:
    entities: int = 30
    concepts: int = 3
    values: int = 3
    chain_len: int = 5
    contradiction_rate: float = 0.9
    noise: int = 2
    labeled: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.entities < 1 or self.concepts < 1 or self.values < 2:
            raise DataError("gen needs entities >= 1, concepts >= 1, values >= 2")
        if self.chain_len < 2:
            raise DataError("gen needs chain length >= 2")
        if not 0.0 <= self.contradiction_rate <= 1.0:
            raise DataError("contradiction rate must be within [0, 1]")
        if self.noise < 0:
            raise DataError("noise must be non-negative")


def _chain_symbol(spec: GenSpec, p: int) -> Symbol:
    concept = p % spec.concepts
    value = (p // spec.concepts) % spec.values
    return Symbol(f"C{concept}", f"V{value}")


def _entity_intervals(spec: GenSpec, rng: random.Random, even_noise: bool):
    ivs = []
    for p in range(spec.chain_len):
        start = p * _STEP
        ivs.append(SymbolicInterval(start, start + _CHAIN_SPAN, _chain_symbol(spec, p)))
        if p + 1 < spec.chain_len and rng.random() < spec.contradiction_rate:
            left = _chain_symbol(spec, p)
            intruder = Symbol(left.concept_id,
                              f"V{(int(left.value_id[1:]) + 1) % spec.values}")
            ivs.append(SymbolicInterval(start + _INTRUDER_OFF,
                                        start + _INTRUDER_OFF + _INTRUDER_SPAN, intruder))
    horizon = spec.chain_len * _STEP
    for _ in range(spec.noise):
        start = rng.randrange(0, horizon)
        length = rng.choice((2, 4)) if even_noise else rng.randrange(1, 5)
        sym = Symbol(f"C{rng.randrange(spec.concepts)}", f"V{rng.randrange(spec.values)}")
        ivs.append(SymbolicInterval(start, start + length, sym))
    return ivs


def _discriminative(label_pos: bool):
    order = ("D0", "D1", "D2") if label_pos else ("D2", "D1", "D0")
    return [SymbolicInterval(2 + 10 * i, 6 + 10 * i, Symbol(cid, "V0"))
            for i, cid in enumerate(order)]


def generate(spec: GenSpec):
    """Returns (IntervalDatabase, labels dict; empty dict when unlabeled)."""
    rng = random.Random(f"{spec.seed}|gen")
    records = []
    labels: dict[str, str] = {}
    for e in range(spec.entities):
        eid = f"e{e:03d}"
        ivs = _entity_intervals(spec, rng, even_noise=False)
        if spec.labeled:
            label = "1" if e % 2 == 0 else "0"
            labels[eid] = label
            ivs.extend(_discriminative(label == "1"))
        records.append(EntityRecord(eid, tuple(ivs), labels.get(eid)))
    return build_database(records), labels


def generate_points(spec: GenSpec):
    """Raw-point rendition of the same construction.

    Intervals become odd-timestamp point runs whose +/-1 validity windows
    interpolate back into the intended spans; the numeric value 10*v + 5
    encodes state v so width-based discretization recovers distinct states.
    """
    rng = random.Random(f"{spec.seed}|gen")
    points: list[RawPoint] = []
    labels: dict[str, str] = {}
    for e in range(spec.entities):
        eid = f"e{e:03d}"
        ivs = _entity_intervals(spec, rng, even_noise=True)
        if spec.labeled:
            label = "1" if e % 2 == 0 else "0"
            labels[eid] = label
            ivs.extend(_discriminative(label == "1"))
        seen = set()
        for iv in sorted(set(ivs)):
            value = int(iv.symbol.value_id[1:]) * 10 + 5
            for t in range(iv.start + 1, iv.end, 2):
                key = (iv.symbol.concept_id, t)
                if key not in seen:
                    seen.add(key)
                    points.append(RawPoint(eid, iv.symbol.concept_id, t, float(value)))
    return points, labels
