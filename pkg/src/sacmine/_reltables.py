"""Static relation composition tables.

Generated once by exhaustive enumeration of every ordered interval triple on
the integer grid [0, 8] (zero-length intervals included); cell (r1, r2)
holds exactly the relations witnessed between the outer pair. The generator is
duplicated in the test suite and the tables are re-derived there on every run.

Base code order: BEFORE, MEETS, OVERLAPS, FINISHED_BY, CONTAINS, STARTS, EQUAL.
Abstract code order: A_BEFORE, A_OVERLAPS, A_CONTAINS.
"""

COMPOSE7 = (
    ((0,), (0,), (0,), (0,), (0,), (0,), (0,)),
    ((0,), (0,), (0,), (0,), (0,), (1,), (1,)),
    ((0,), (0,), (0, 1, 2), (0, 1, 2), (0, 1, 2, 3, 4), (2,), (2,)),
    ((0,), (1,), (2,), (3,), (4,), (1, 2), (3,)),
    ((0, 1, 2, 3, 4), (2, 3, 4), (2, 3, 4), (4,), (4,), (2, 3, 4), (4,)),
    ((0,), (0,), (0, 1, 2), (0, 1, 2), (0, 1, 2, 3, 4), (5,), (5,)),
    ((0,), (1,), (2,), (3,), (4,), (5,), (6,)),
)

COMPOSE3 = (
    ((0,), (0,), (0,)),
    ((0,), (0, 1), (0, 1, 2)),
    ((0, 1, 2), (0, 1, 2), (0, 1, 2)),
)
