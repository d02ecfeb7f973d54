"""Two-phase frequent-TIRP mining: pair indexing, then recursive extension.

Phase one scans every entity's ordered interval pairs into a vertical index
keyed by (symbol, relation, symbol), applying the configured adjacency mode
per pair. Phase two grows each frequent 2-sized pattern by one interval at a
time: candidate relation columns come from the composition table, instances
are extended through the pair index, and the relations of the non-successive
new pairs are re-verified arithmetically (plus their gap scans under csac and
lsac; ssac constrains successive pairs only, which the index already covers).

Support thresholds compare exact integer counts (cross-multiplied rationals);
nothing here goes through floating point.

With epsilon > 0 candidate columns still come from the exact-boundary
composition table, so relation structures that exist only because of the
boundary tolerance can be missed; the reference definitions and acceptance
checks use epsilon = 0.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from time import perf_counter

import numpy as np

from . import kernels, sac
from .model import IntervalDatabase, Symbol
from .relations import (
    ABSTRACT3,
    ALLEN7,
    TO_ABSTRACT,
    RelationConfig,
    classify_endpoints,
    compose,
    compose_set,
)


@dataclass(frozen=True)
class TIRP:
    """k symbols in instance order plus the column-wise relation half-matrix.

    relations holds, for each added interval j, the codes for pairs
    (0,j), (1,j), ..., (j-1,j) appended in that order.
    """

    symbols: tuple[Symbol, ...]
    relations: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.symbols)

    def relation(self, i: int, j: int) -> int:
        """Relation between positions i < j (0-based)."""
        return self.relations[j * (j - 1) // 2 + i]


@dataclass(frozen=True)
class MiningConfig:
    min_ver_sup: Fraction
    relation: RelationConfig = field(default_factory=RelationConfig)
    sac_mode: str = sac.NONE
    max_tirp_size: int | None = None
    threads: int = 1

    def __post_init__(self):
        object.__setattr__(self, "min_ver_sup", Fraction(self.min_ver_sup))
        if not 0 < self.min_ver_sup <= 1:
            raise ValueError("min_ver_sup must be in (0, 1]")
        if self.sac_mode not in sac.MODES:
            raise ValueError(f"unknown sac mode {self.sac_mode!r}")
        if self.max_tirp_size is not None and self.max_tirp_size < 1:
            raise ValueError("max_tirp_size must be >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


@dataclass
class TIRPNode:
    tirp: TIRP
    instances: dict[int, list[tuple[int, ...]]]  # entity index -> ascending index tuples
    children: list["TIRPNode"] = field(default_factory=list)

    @property
    def supporting(self) -> int:
        return len(self.instances)


@dataclass
class EnumerationTree:
    db: IntervalDatabase
    config: MiningConfig
    roots: list[TIRPNode]
    runtime_ms: int = 0
    peak_candidates: int = 0

    @property
    def n_entities(self) -> int:
        return len(self.db.entities)

    def nodes(self):
        """Depth-first iteration over every frequent node."""
        stack = list(reversed(self.roots))
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def vertical_support(self, node: TIRPNode) -> Fraction:
        return Fraction(node.supporting, self.n_entities)

    def stats(self, node: TIRPNode) -> tuple[Fraction, float, float]:
        """(vertical support, mean horizontal support, mean duration).

        Both means average the per-entity statistic over supporting entities;
        per-entity duration is the mean instance span (max end - first start).
        """
        hor = []
        dur = []
        for e_idx, insts in node.instances.items():
            iv = self.db.entities[e_idx].intervals
            hor.append(len(insts))
            spans = [max(iv[i].end for i in inst) - iv[inst[0]].start for inst in insts]
            dur.append(sum(spans) / len(spans))
        if not hor:
            return Fraction(0), 0.0, 0.0
        return (
            self.vertical_support(node),
            sum(hor) / len(hor),
            sum(dur) / len(dur),
        )


def meets_threshold(count: int, total: int, min_vs: Fraction) -> bool:
    """count/total >= min_vs, compared exactly on integers."""
    return count * min_vs.denominator >= min_vs.numerator * total


class _EntityArrays:
    __slots__ = ("starts", "ends", "concepts", "sym_codes", "starts_np", "ends_np", "concepts_np")

    def __init__(self, record, sym_code, concept_code):
        self.starts = [iv.start for iv in record.intervals]
        self.ends = [iv.end for iv in record.intervals]
        self.concepts = [concept_code[iv.symbol.concept_id] for iv in record.intervals]
        self.sym_codes = [sym_code[iv.symbol] for iv in record.intervals]
        self.starts_np = np.asarray(self.starts, dtype=np.int64)
        self.ends_np = np.asarray(self.ends, dtype=np.int64)
        self.concepts_np = np.asarray(self.concepts, dtype=np.int64)


class _Prepared:
    __slots__ = ("symbols", "sym_code", "entities")

    def __init__(self, db: IntervalDatabase):
        self.symbols = sorted({iv.symbol for e in db.entities for iv in e.intervals})
        self.sym_code = {s: i for i, s in enumerate(self.symbols)}
        concept_code = {c: i for i, c in enumerate(sorted({s.concept_id for s in self.symbols}))}
        self.entities = [_EntityArrays(e, self.sym_code, concept_code) for e in db.entities]


def _parallel_map(threads, fn, items):
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def _karma(prep: _Prepared, cfg: MiningConfig):
    """Scan all pairs into the vertical index: key -> entity -> [(i, j), ...]."""
    eps = cfg.relation.epsilon
    mg = -1 if cfg.relation.max_gap is None else cfg.relation.max_gap
    code = sac.SAC_CODES[cfg.sac_mode]
    abstract = cfg.relation.mode == ABSTRACT3

    def scan(ea):
        return kernels.pair_scan(ea.starts_np, ea.ends_np, ea.concepts_np, eps, mg, code)

    results = _parallel_map(cfg.threads, scan, prep.entities)
    t2: dict[tuple[int, int, int], dict[int, list[tuple[int, int]]]] = {}
    for e_idx, (ii, jj, rr) in enumerate(results):
        sym_codes = prep.entities[e_idx].sym_codes
        for i, j, r in zip(ii.tolist(), jj.tolist(), rr.tolist()):
            if abstract:
                r = TO_ABSTRACT[r]
            key = (sym_codes[i], r, sym_codes[j])
            t2.setdefault(key, {}).setdefault(e_idx, []).append((i, j))
    return t2


def _level1(prep: _Prepared, cfg: MiningConfig, n_entities: int):
    occ: dict[int, dict[int, list[tuple[int, ...]]]] = {}
    for e_idx, ea in enumerate(prep.entities):
        for i, code in enumerate(ea.sym_codes):
            occ.setdefault(code, {}).setdefault(e_idx, []).append((i,))
    return [
        (code, occ[code])
        for code in sorted(occ)
        if meets_threshold(len(occ[code]), n_entities, cfg.min_ver_sup)
    ]


def generate_candidates(parent: TIRP, new_symbol: Symbol, r: int, mode: str = ALLEN7) -> list[TIRP]:
    """All internally consistent one-column extensions of parent by new_symbol.

    r relates the parent's last interval to the new one; each remaining column
    slot ranges over the composition set of (relation to the last interval, r),
    and assignments violating any other middle's composition set are dropped.
    """
    k = parent.size
    per_slot = [compose(parent.relation(i, k - 1), r, mode) for i in range(k - 1)]
    out = []
    for combo in itertools.product(*per_slot):
        column = combo + (r,)
        if _column_consistent(parent, column, mode):
            out.append(TIRP(parent.symbols + (new_symbol,), parent.relations + column))
    return out


def _column_consistent(parent: TIRP, column: tuple[int, ...], mode: str) -> bool:
    last = len(column) - 1
    for p in range(last):
        for m in range(p + 1, last):
            if column[p] not in compose_set(parent.relation(p, m), column[m], mode):
                return False
    return True


class _LegoCtx:
    __slots__ = (
        "prep", "cfg", "n_entities", "keys_by_first", "next_index", "live_keys",
        "gap_memo", "peak",
    )

    def __init__(self, prep, cfg, n_entities, keys_by_first, next_index, live_keys):
        self.prep = prep
        self.cfg = cfg
        self.n_entities = n_entities
        self.keys_by_first = keys_by_first
        self.next_index = next_index
        self.live_keys = live_keys
        self.gap_memo: dict[tuple[int, int, int], bool] = {}
        self.peak = 0


def _gap_ok(ctx: _LegoCtx, e_idx: int, i: int, j: int) -> bool:
    key = (e_idx, i, j)
    v = ctx.gap_memo.get(key)
    if v is None:
        ea = ctx.prep.entities[e_idx]
        v = bool(kernels.gap_clear_idx(ea.starts_np, ea.ends_np, ea.concepts_np, i, j))
        ctx.gap_memo[key] = v
    return v


def _middles_ok(ctx: _LegoCtx, ea: _EntityArrays, e_idx: int, pinst, jdx: int, column) -> bool:
    """Verify the new interval against every non-last parent position."""
    rel_cfg = ctx.cfg.relation
    abstract = rel_cfg.mode == ABSTRACT3
    mode = ctx.cfg.sac_mode
    sj = ea.starts[jdx]
    ej = ea.ends[jdx]
    for p in range(len(pinst) - 1):
        i_idx = pinst[p]
        r = classify_endpoints(ea.starts[i_idx], ea.ends[i_idx], sj, ej,
                               rel_cfg.epsilon, rel_cfg.max_gap)
        if r is None:
            return False
        if abstract:
            r = TO_ABSTRACT[r]
        if r != column[p]:
            return False
        if mode in (sac.CSAC, sac.LSAC) and ea.ends[i_idx] < sj:
            if mode == sac.LSAC and ea.concepts[i_idx] == ea.concepts[jdx]:
                continue
            if not _gap_ok(ctx, e_idx, i_idx, jdx):
                return False
    return True


def _search(ctx: _LegoCtx, node: TIRPNode, column, next_by_entity):
    out: dict[int, list[tuple[int, ...]]] = {}
    for e_idx, plist in node.instances.items():
        nxt = next_by_entity.get(e_idx)
        if not nxt:
            continue
        ea = ctx.prep.entities[e_idx]
        found = []
        for pinst in plist:
            for jdx in nxt.get(pinst[-1], ()):
                if _middles_ok(ctx, ea, e_idx, pinst, jdx, column):
                    found.append(pinst + (jdx,))
        if found:
            out[e_idx] = found
    return out


def _keys_alive(ctx: _LegoCtx, sym_codes, column, new_code) -> bool:
    for p in range(len(column) - 1):
        if (sym_codes[p], column[p], new_code) not in ctx.live_keys:
            return False
    return True


def _extend(ctx: _LegoCtx, node: TIRPNode, sym_codes: tuple[int, ...]):
    cfg = ctx.cfg
    if cfg.max_tirp_size is not None and node.tirp.size >= cfg.max_tirp_size:
        return
    # Under ssac the non-successive pairs of an instance need no gap scan, so
    # a pruned middle key does not bound the candidate's support; skip the
    # key-liveness shortcut there.
    check_keys = cfg.sac_mode != sac.SSAC
    for r_last, new_code in ctx.keys_by_first.get(sym_codes[-1], ()):
        key = (sym_codes[-1], r_last, new_code)
        new_symbol = ctx.prep.symbols[new_code]
        candidates = generate_candidates(node.tirp, new_symbol, r_last, cfg.relation.mode)
        if len(candidates) > ctx.peak:
            ctx.peak = len(candidates)
        next_by_entity = ctx.next_index[key]
        base = len(node.tirp.relations)
        for cand in candidates:
            column = cand.relations[base:]
            if check_keys and not _keys_alive(ctx, sym_codes, column, new_code):
                continue
            instances = _search(ctx, node, column, next_by_entity)
            if meets_threshold(len(instances), ctx.n_entities, cfg.min_ver_sup):
                child = TIRPNode(cand, instances)
                node.children.append(child)
                _extend(ctx, child, sym_codes + (new_code,))


def mine(db: IntervalDatabase, cfg: MiningConfig) -> EnumerationTree:
    """Run both phases and return the frequent-TIRP enumeration tree.

    Deterministic for a fixed database and config regardless of cfg.threads:
    entities are scanned in database order and subtrees are grown from
    canonically ordered 2-sized roots with no shared mutable state.
    """
    t0 = perf_counter()
    n = len(db.entities)
    roots: list[TIRPNode] = []
    peak = 0
    if n:
        prep = _Prepared(db)
        level1 = _level1(prep, cfg, n)
        for code, inst in level1:
            roots.append(TIRPNode(TIRP((prep.symbols[code],), ()), inst))
        if cfg.max_tirp_size is None or cfg.max_tirp_size >= 2:
            t2 = _karma(prep, cfg)
            t2 = {
                k: v
                for k, v in sorted(t2.items())
                if meets_threshold(len(v), n, cfg.min_ver_sup)
            }
            keys_by_first: dict[int, list[tuple[int, int]]] = {}
            for a, r, b in t2:
                keys_by_first.setdefault(a, []).append((r, b))
            next_index = {
                key: {e: _group_by_first(pairs) for e, pairs in per_e.items()}
                for key, per_e in t2.items()
            }
            live_keys = frozenset(t2)
            node1 = {roots[i].tirp.symbols[0]: roots[i] for i in range(len(roots))}
            subtrees = []
            for (a, r, b), per_e in t2.items():
                parent = node1[prep.symbols[a]]
                child = TIRPNode(
                    TIRP((prep.symbols[a], prep.symbols[b]), (r,)),
                    {e: list(pairs) for e, pairs in per_e.items()},
                )
                parent.children.append(child)
                subtrees.append((child, (a, b)))

            def grow(item):
                node2, codes = item
                ctx = _LegoCtx(prep, cfg, n, keys_by_first, next_index, live_keys)
                _extend(ctx, node2, codes)
                return ctx.peak

            peaks = _parallel_map(cfg.threads, grow, subtrees)
            peak = max(peaks, default=0)
    runtime_ms = max(1, round((perf_counter() - t0) * 1000.0))
    return EnumerationTree(db, cfg, roots, runtime_ms, peak)


def _group_by_first(pairs):
    nxt: dict[int, list[int]] = {}
    for i, j in pairs:
        nxt.setdefault(i, []).append(j)
    return nxt
