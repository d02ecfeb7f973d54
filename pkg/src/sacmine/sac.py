"""Semantic adjacency predicates over concrete entity records.

These are the reference definitions: the oracle and the tests post-filter
instances with them, independently of the incremental scans inside mining.
A pair is constrained only when an arithmetic strict gap exists between its
intervals; quantifier bounds are inclusive (first and last intervals count).
"""

from __future__ import annotations

from itertools import combinations

from .model import EntityRecord

NONE = "none"
SSAC = "ssac"
CSAC = "csac"
LSAC = "lsac"
MODES = (NONE, SSAC, CSAC, LSAC)
SAC_CODES = {NONE: 0, SSAC: 1, CSAC: 2, LSAC: 3}


def gap_clear(entity: EntityRecord, i: int, j: int) -> bool:
    """True iff nothing of either endpoint's sem_type intrudes into the gap.

    An interval t (t not in {i, j}) intrudes when t.end > intervals[i].end and
    t.start < intervals[j].start and its concept matches either endpoint's;
    value copies of an endpoint's concept count as intrusions too.
    """
    iv = entity.intervals
    a, b = iv[i], iv[j]
    if not a.end < b.start:
        raise ValueError("gap_clear requires a strict gap")
    types = (a.sem_type, b.sem_type)
    for t, other in enumerate(iv):
        if t == i or t == j:
            continue
        if other.end > a.end and other.start < b.start and other.sem_type in types:
            return False
    return True


def instance_satisfies(mode: str, entity: EntityRecord, indices) -> bool:
    """Evaluate the mode's adjacency definition on one instance.

    none: always true. ssac: every successive index pair with a strict gap is
    gap-clear. csac: every index pair with a strict gap is gap-clear. lsac:
    like csac but pairs sharing a sem_type are exempt.
    """
    if mode == NONE:
        return True
    iv = entity.intervals
    if mode == SSAC:
        pairs = zip(indices, indices[1:])
    else:
        pairs = combinations(indices, 2)
    for i, j in pairs:
        if not iv[i].end < iv[j].start:
            continue
        if mode == LSAC and iv[i].sem_type == iv[j].sem_type:
            continue
        if not gap_clear(entity, i, j):
            return False
    return True


def karma_pair_admissible(mode: str, entity: EntityRecord, i: int, j: int) -> bool:
    """Whether the index pair (i, j) may enter the 2-sized pair index."""
    if mode == NONE:
        return True
    iv = entity.intervals
    if mode == LSAC and iv[i].sem_type == iv[j].sem_type:
        return True
    if not iv[i].end < iv[j].start:
        return True
    return gap_clear(entity, i, j)
