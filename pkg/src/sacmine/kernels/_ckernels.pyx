# cython: boundscheck=False, wraparound=False, nonecheck=False, cdivision=True
"""Compiled scan kernels; semantics mirror py_kernels exactly."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64


cdef inline i64 _iabs(i64 x) nogil:
    return -x if x < 0 else x


cdef inline int _classify(i64 a_start, i64 a_end, i64 b_start, i64 b_end,
                          i64 epsilon, i64 max_gap) nogil:
    # First-match decision list over ordered endpoint pairs; -1 means absent.
    cdef bint eq_s = _iabs(a_start - b_start) <= epsilon
    cdef bint eq_e = _iabs(a_end - b_end) <= epsilon
    if eq_s and eq_e:
        return 6  # EQUAL
    if eq_s and a_end < b_end:
        return 5  # STARTS
    if a_start < b_start and eq_e:
        return 3  # FINISHED_BY
    if a_start < b_start and b_end < a_end:
        return 4  # CONTAINS
    if a_start < b_start and b_start < a_end and a_end < b_end:
        return 2  # OVERLAPS
    if _iabs(a_end - b_start) <= epsilon:
        return 1  # MEETS
    if a_end < b_start and (max_gap < 0 or b_start - a_end <= max_gap):
        return 0  # BEFORE
    return -1


cdef inline bint _gap_clear(const i64[::1] s, const i64[::1] e, const i64[::1] c,
                            Py_ssize_t i, Py_ssize_t j) nogil:
    # Scan t < j only: later intervals start at or after intervals[j].
    cdef Py_ssize_t t
    for t in range(j):
        if t == i:
            continue
        if e[t] > e[i] and s[t] < s[j] and (c[t] == c[i] or c[t] == c[j]):
            return False
    return True


def gap_clear_idx(const i64[::1] starts, const i64[::1] ends, const i64[::1] concepts,
                  Py_ssize_t i, Py_ssize_t j):
    return bool(_gap_clear(starts, ends, concepts, i, j))


def pair_scan(const i64[::1] starts, const i64[::1] ends, const i64[::1] concepts,
              i64 epsilon, i64 max_gap, int sac_code):
    cdef Py_ssize_t n = starts.shape[0]
    cdef Py_ssize_t cap = n * (n - 1) // 2 if n > 1 else 0
    out_i = np.empty(cap, dtype=np.int64)
    out_j = np.empty(cap, dtype=np.int64)
    out_r = np.empty(cap, dtype=np.int64)
    cdef i64[::1] vi = out_i
    cdef i64[::1] vj = out_j
    cdef i64[::1] vr = out_r
    cdef Py_ssize_t i, j, m = 0
    cdef int r
    with nogil:
        for i in range(n - 1):
            for j in range(i + 1, n):
                r = _classify(starts[i], ends[i], starts[j], ends[j], epsilon, max_gap)
                if r < 0:
                    continue
                if sac_code != 0 and ends[i] < starts[j]:
                    if not (sac_code == 3 and concepts[i] == concepts[j]):
                        if not _gap_clear(starts, ends, concepts, i, j):
                            continue
                vi[m] = i
                vj[m] = j
                vr[m] = r
                m += 1
    return out_i[:m].copy(), out_j[:m].copy(), out_r[:m].copy()
