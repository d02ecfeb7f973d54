"""Brute-force reference miner for desk-scale correctness checks.

Enumerates every strictly increasing interval-index subset of every entity,
classifies all pairs arithmetically, and filters instances with the reference
gap predicate before counting support. Deliberately shares nothing with the
mining engine's incremental scans. Exponential by design; guarded to small
inputs.

The adjacency verdicts quantify sac.gap_clear results (memoized per pair)
exactly as the definitions do; equivalence with sac.instance_satisfies is
property-tested.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from . import sac
from .karmalego import TIRP, MiningConfig, meets_threshold
from .model import IntervalDatabase
from .relations import ABSTRACT3, classify_pair, to_abstract

_MAX_INTERVALS = 16

_SAC_BIT = {sac.NONE: None, sac.SSAC: 0, sac.CSAC: 1, sac.LSAC: 2}


def enumerate_instances(db: IntervalDatabase, relation_cfg, k_max=None):
    """Per entity index: list of (indices, tirp, (ssac_ok, csac_ok, lsac_ok)).

    Subsets containing a pair with no defined relation (gap beyond max_gap)
    are not instances of anything and are skipped.
    """
    out = []
    abstract = relation_cfg.mode == ABSTRACT3
    for entity in db.entities:
        iv = entity.intervals
        n = len(iv)
        if n > _MAX_INTERVALS:
            raise ValueError(f"entity {entity.entity_id!r} has {n} intervals; oracle cap is {_MAX_INTERVALS}")
        rel = [[None] * n for _ in range(n)]
        gap = [[False] * n for _ in range(n)]
        clear = [[True] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                code = classify_pair(iv[i], iv[j], relation_cfg)
                if code is not None and abstract:
                    code = to_abstract(code)
                rel[i][j] = code
                if iv[i].end < iv[j].start:
                    gap[i][j] = True
                    clear[i][j] = sac.gap_clear(entity, i, j)
        rows = []
        top = n if k_max is None else min(k_max, n)
        for k in range(1, top + 1):
            for combo in combinations(range(n), k):
                rels = []
                ok = True
                for jpos in range(1, k):
                    for ipos in range(jpos):
                        code = rel[combo[ipos]][combo[jpos]]
                        if code is None:
                            ok = False
                            break
                        rels.append(code)
                    if not ok:
                        break
                if not ok:
                    continue
                ssac_ok = all(
                    clear[i][j] for i, j in zip(combo, combo[1:]) if gap[i][j]
                )
                csac_ok = True
                lsac_ok = True
                for i, j in combinations(combo, 2):
                    if not gap[i][j] or clear[i][j]:
                        continue
                    csac_ok = False
                    if iv[i].sem_type != iv[j].sem_type:
                        lsac_ok = False
                tirp = TIRP(tuple(iv[i].symbol for i in combo), tuple(rels))
                rows.append((combo, tirp, (ssac_ok, csac_ok, lsac_ok)))
        out.append(rows)
    return out


def group_instances(enumerated, mode: str):
    """TIRP -> entity index -> instance list, keeping mode-admissible instances."""
    bit = _SAC_BIT[mode]
    grouped: dict[TIRP, dict[int, list[tuple[int, ...]]]] = {}
    for e_idx, rows in enumerate(enumerated):
        for combo, tirp, bits in rows:
            if bit is not None and not bits[bit]:
                continue
            grouped.setdefault(tirp, {}).setdefault(e_idx, []).append(combo)
    return grouped


def threshold(grouped, n_entities: int, min_vs: Fraction):
    return {
        tirp: insts
        for tirp, insts in grouped.items()
        if meets_threshold(len(insts), n_entities, min_vs)
    }


def brute_force_mine(db: IntervalDatabase, cfg: MiningConfig, k_max=None):
    """Frequent TIRP -> entity index -> sorted instance lists, by exhaustion."""
    enumerated = enumerate_instances(db, cfg.relation, k_max)
    grouped = group_instances(enumerated, cfg.sac_mode)
    return threshold(grouped, len(db.entities), cfg.min_ver_sup)
