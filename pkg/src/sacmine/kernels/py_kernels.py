"""Pure-Python fallback implementations of the scan kernels."""

from __future__ import annotations

import numpy as np

from ..relations import classify_endpoints


def gap_clear_idx(starts, ends, concepts, i, j) -> bool:
    """Gap scan for the pair (i, j); assumes a strict gap.

    Scans only t < j: intervals are lexicographically sorted, so anything at
    or after j starts at or after intervals[j] and cannot intrude.
    """
    ei = ends[i]
    sj = starts[j]
    ci = concepts[i]
    cj = concepts[j]
    for t in range(j):
        if t == i:
            continue
        if ends[t] > ei and starts[t] < sj and (concepts[t] == ci or concepts[t] == cj):
            return False
    return True


def pair_scan(starts, ends, concepts, epsilon, max_gap, sac_code):
    """Classify and filter every ordered index pair of one entity.

    max_gap < 0 means unbounded. sac_code: 0 none, 1 ssac, 2 csac, 3 lsac;
    pairs with a strict gap that fail the mode's gap scan are dropped (lsac
    exempts same-concept pairs). Returns (i, j, rel) int64 arrays holding the
    surviving pairs in ascending (i, j) order; rel uses the seven base codes.
    """
    s = [int(x) for x in starts]
    e = [int(x) for x in ends]
    c = [int(x) for x in concepts]
    mg = None if max_gap < 0 else max_gap
    n = len(s)
    out_i: list[int] = []
    out_j: list[int] = []
    out_r: list[int] = []
    for i in range(n - 1):
        for j in range(i + 1, n):
            r = classify_endpoints(s[i], e[i], s[j], e[j], epsilon, mg)
            if r is None:
                continue
            if sac_code and e[i] < s[j] and not (sac_code == 3 and c[i] == c[j]):
                if not gap_clear_idx(s, e, c, i, j):
                    continue
            out_i.append(i)
            out_j.append(j)
            out_r.append(r)
    return (
        np.asarray(out_i, dtype=np.int64),
        np.asarray(out_j, dtype=np.int64),
        np.asarray(out_r, dtype=np.int64),
    )
