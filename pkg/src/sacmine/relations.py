"""Allen relation classification for lexicographically ordered interval pairs.

Only seven relations can occur between ordered pairs; the abstract mode
collapses them to three. Composition tables ship as static data generated by
exhaustive enumeration over a small integer grid (the generator is kept in the
test suite as an independent oracle).
"""

from __future__ import annotations

from dataclasses import dataclass

from ._reltables import COMPOSE3, COMPOSE7
from .model import SymbolicInterval, lex_compare

BEFORE, MEETS, OVERLAPS, FINISHED_BY, CONTAINS, STARTS, EQUAL = range(7)
A_BEFORE, A_OVERLAPS, A_CONTAINS = range(3)

ALLEN7 = "allen7"
ABSTRACT3 = "abstract3"
MODES = (ALLEN7, ABSTRACT3)

REL_CHARS = "<mofcs="
ABS_CHARS = "BOC"

TO_ABSTRACT = (A_BEFORE, A_BEFORE, A_OVERLAPS, A_CONTAINS, A_CONTAINS, A_CONTAINS, A_CONTAINS)

_COMPOSE7_SETS = tuple(tuple(frozenset(cell) for cell in row) for row in COMPOSE7)
_COMPOSE3_SETS = tuple(tuple(frozenset(cell) for cell in row) for row in COMPOSE3)

_CHAR_TO_CODE = {c: i for i, c in enumerate(REL_CHARS)}
_CHAR_TO_CODE.update({c: i for i, c in enumerate(ABS_CHARS)})


@dataclass(frozen=True)
class RelationConfig:
    epsilon: int = 0
    max_gap: int | None = None
    mode: str = ALLEN7

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        if self.max_gap is not None and self.max_gap < 0:
            raise ValueError("max_gap must be non-negative")
        if self.mode not in MODES:
            raise ValueError(f"unknown relation mode {self.mode!r}")


def classify_endpoints(a_start, a_end, b_start, b_end, epsilon=0, max_gap=None):
    """Base relation code for an ordered endpoint pair, or None.

    First-match decision list; the ordering makes the seven tests exhaustive
    for lexicographically ordered pairs at any epsilon >= 0. None means a
    BEFORE gap wider than max_gap. Callers guarantee the ordering.
    """
    eq_s = abs(a_start - b_start) <= epsilon
    eq_e = abs(a_end - b_end) <= epsilon
    if eq_s and eq_e:
        return EQUAL
    if eq_s and a_end < b_end:
        return STARTS
    if a_start < b_start and eq_e:
        return FINISHED_BY
    if a_start < b_start and b_end < a_end:
        return CONTAINS
    if a_start < b_start < a_end < b_end:
        return OVERLAPS
    if abs(a_end - b_start) <= epsilon:
        return MEETS
    if a_end < b_start and (max_gap is None or b_start - a_end <= max_gap):
        return BEFORE
    return None


def classify_pair(a: SymbolicInterval, b: SymbolicInterval, cfg: RelationConfig):
    """Classify an ordered interval pair; always returns a base (7) code or None."""
    if lex_compare(a, b) > 0:
        raise ValueError("pair is not lexicographically ordered")
    return classify_endpoints(a.start, a.end, b.start, b.end, cfg.epsilon, cfg.max_gap)


def to_abstract(code: int) -> int:
    """Map a base relation code onto the three abstract codes."""
    return TO_ABSTRACT[code]


def map_code(code, mode: str):
    """Project a base code into the configured relation mode (None passes through)."""
    if code is None or mode == ALLEN7:
        return code
    return TO_ABSTRACT[code]


def compose(r1: int, r2: int, mode: str = ALLEN7) -> tuple[int, ...]:
    """All relations possible between (A, C) given rel(A,B)=r1 and rel(B,C)=r2."""
    table = COMPOSE7 if mode == ALLEN7 else COMPOSE3
    return table[r1][r2]


def compose_set(r1: int, r2: int, mode: str = ALLEN7) -> frozenset:
    table = _COMPOSE7_SETS if mode == ALLEN7 else _COMPOSE3_SETS
    return table[r1][r2]


def rel_char(code: int, mode: str = ALLEN7) -> str:
    return (REL_CHARS if mode == ALLEN7 else ABS_CHARS)[code]


def code_from_char(ch: str) -> int:
    try:
        return _CHAR_TO_CODE[ch]
    except KeyError:
        raise ValueError(f"unknown relation character {ch!r}") from None


def mode_of_char(ch: str) -> str:
    """Which relation mode a serialized relation character belongs to."""
    if ch in REL_CHARS:
        return ALLEN7
    if ch in ABS_CHARS:
        return ABSTRACT3
    raise ValueError(f"unknown relation character {ch!r}")
