"""Detect previously mined patterns in (possibly held-out) entities.

Depth-first constrained search over each entity's sorted intervals, honoring
every pairwise relation of the pattern and the configured semantic-adjacency
mode, then feature-matrix assembly under the binary / horizontal-support /
mean-duration representations.
"""

from __future__ import annotations

import numpy as np

from . import sac
from .karmalego import MiningConfig, TIRP, _parallel_map
from .kernels import gap_clear_idx
from .model import EntityRecord, IntervalDatabase
from .relations import classify_endpoints, map_code

BINARY = "binary"
HOR_SUP = "hs"
MEAN_DUR = "meand"
REPRESENTATIONS = (BINARY, HOR_SUP, MEAN_DUR)


class _EntityIndex:
    """Per-entity search support: position lists by symbol, arrays for gap scans."""

    __slots__ = ("intervals", "by_symbol", "starts", "ends", "concepts", "_gap_memo")

    def __init__(self, entity: EntityRecord):
        self.intervals = entity.intervals
        self.by_symbol: dict = {}
        for idx, iv in enumerate(self.intervals):
            self.by_symbol.setdefault(iv.symbol, []).append(idx)
        self.starts = np.asarray([iv.start for iv in self.intervals], dtype=np.int64)
        self.ends = np.asarray([iv.end for iv in self.intervals], dtype=np.int64)
        concept_ids = {}
        codes = []
        for iv in self.intervals:
            codes.append(concept_ids.setdefault(iv.symbol.concept_id, len(concept_ids)))
        self.concepts = np.asarray(codes, dtype=np.int64)
        self._gap_memo: dict = {}

    def gap_ok(self, i: int, j: int) -> bool:
        got = self._gap_memo.get((i, j))
        if got is None:
            got = bool(gap_clear_idx(self.starts, self.ends, self.concepts, i, j))
            self._gap_memo[(i, j)] = got
        return got


def _sac_ok(index: _EntityIndex, mode: str, partial: list, j: int) -> bool:
    """Adjacency check for the pairs a new index j forms with the partial instance."""
    if mode == sac.NONE or not partial:
        return True
    ivs = index.intervals
    b = ivs[j]
    pairs = partial[-1:] if mode == sac.SSAC else partial
    for i in pairs:
        a = ivs[i]
        if a.end >= b.start:
            continue
        if mode == sac.LSAC and a.symbol.sem_type == b.symbol.sem_type:
            continue
        if not index.gap_ok(i, j):
            return False
    return True


def detect(tirp: TIRP, entity: EntityRecord, cfg: MiningConfig) -> list[tuple[int, ...]]:
    """All instances of the pattern in the entity, as ascending index tuples."""
    index = _EntityIndex(entity)
    return _detect_indexed(tirp, index, cfg)


def _detect_indexed(tirp: TIRP, index: _EntityIndex, cfg: MiningConfig):
    k = tirp.size
    rel_cfg = cfg.relation
    mode = rel_cfg.mode
    ivs = index.intervals
    out: list[tuple[int, ...]] = []

    def extend(partial: list):
        m = len(partial)
        if m == k:
            out.append(tuple(partial))
            return
        positions = index.by_symbol.get(tirp.symbols[m], ())
        floor = partial[-1] + 1 if partial else 0
        for j in positions:
            if j < floor:
                continue
            ok = True
            for a, ia in enumerate(partial):
                code = classify_endpoints(ivs[ia].start, ivs[ia].end,
                                          ivs[j].start, ivs[j].end,
                                          rel_cfg.epsilon, rel_cfg.max_gap)
                if code is None or map_code(code, mode) != tirp.relation(a, m):
                    ok = False
                    break
            if ok and _sac_ok(index, cfg.sac_mode, partial, j):
                extend(partial + [j])

    extend([])
    return out


def instance_span(entity: EntityRecord, inst: tuple[int, ...]) -> int:
    """Max end minus first start over the instance's intervals."""
    ivs = entity.intervals
    return max(ivs[t].end for t in inst) - ivs[inst[0]].start


def feature_matrix(tirps: list[TIRP], db: IntervalDatabase, representation: str,
                   cfg: MiningConfig, threads: int = 1):
    """Entity-by-pattern matrix; rows follow db order, columns follow tirps order.

    Returns (entity_ids, labels, numpy float matrix). Cells: binary presence,
    instance count, or mean instance span; entities without instances get 0
    under every representation.
    """
    if representation not in REPRESENTATIONS:
        raise ValueError(f"unknown representation {representation!r}")

    def row(entity: EntityRecord):
        index = _EntityIndex(entity)
        cells = np.zeros(len(tirps), dtype=float)
        for col, tirp in enumerate(tirps):
            instances = _detect_indexed(tirp, index, cfg)
            if not instances:
                continue
            if representation == BINARY:
                cells[col] = 1.0
            elif representation == HOR_SUP:
                cells[col] = float(len(instances))
            else:
                cells[col] = sum(
                    instance_span(entity, inst) for inst in instances
                ) / len(instances)
        return cells

    rows = _parallel_map(threads, row, db.entities)
    matrix = np.vstack(rows) if rows else np.zeros((0, len(tirps)))
    entity_ids = [e.entity_id for e in db.entities]
    labels = [e.label for e in db.entities]
    return entity_ids, labels, matrix
