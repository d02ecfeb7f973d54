"""Pair classification and composition tables, validated against an
independent exhaustive builder (duplicated here on purpose)."""

import random
from itertools import product

import pytest
from hypothesis import given, strategies as st

from helpers import iv
from sacmine.relations import (
    ABS_CHARS,
    ABSTRACT3,
    ALLEN7,
    A_BEFORE,
    A_CONTAINS,
    A_OVERLAPS,
    BEFORE,
    CONTAINS,
    EQUAL,
    FINISHED_BY,
    MEETS,
    OVERLAPS,
    REL_CHARS,
    STARTS,
    RelationConfig,
    classify_endpoints,
    classify_pair,
    code_from_char,
    compose,
    compose_set,
    map_code,
    mode_of_char,
    rel_char,
    to_abstract,
)

# --- independent classifier + table builder (test-side oracle) -------------


def _oracle_classify(a_s, a_e, b_s, b_e):
    """Epsilon-0 classification by direct endpoint case analysis."""
    assert (a_s, a_e) <= (b_s, b_e)
    if a_s == b_s and a_e == b_e:
        return EQUAL
    if a_s == b_s and a_e < b_e:
        return STARTS
    if a_s < b_s and a_e == b_e:
        return FINISHED_BY
    if a_s < b_s and b_e < a_e:
        return CONTAINS
    if a_s < b_s < a_e < b_e:
        return OVERLAPS
    if a_e == b_s:
        return MEETS
    if a_e < b_s:
        return BEFORE
    raise AssertionError((a_s, a_e, b_s, b_e))


def _oracle_tables(grid=8):
    spans = [(s, e) for s in range(grid + 1) for e in range(s, grid + 1)]
    table7 = [[set() for _ in range(7)] for _ in range(7)]
    table3 = [[set() for _ in range(3)] for _ in range(3)]
    for a in spans:
        for b in spans:
            if b < a:
                continue
            r1 = _oracle_classify(*a, *b)
            for c in spans:
                if c < b:
                    continue
                r2 = _oracle_classify(*b, *c)
                r13 = _oracle_classify(*a, *c)
                table7[r1][r2].add(r13)
                table3[to_abstract(r1)][to_abstract(r2)].add(to_abstract(r13))
    return table7, table3


# --- classification -------------------------------------------------------


def test_classify_spec_examples():
    cfg = RelationConfig()
    assert classify_pair(iv(0, 5, "A"), iv(7, 9, "B"), cfg) == BEFORE
    assert classify_pair(iv(0, 5, "A"), iv(5, 9, "B"), cfg) == MEETS
    assert classify_pair(iv(0, 9, "A"), iv(2, 7, "B"), cfg) == CONTAINS
    gap1 = RelationConfig(max_gap=1)
    assert classify_pair(iv(0, 5, "A"), iv(7, 9, "B"), gap1) is None
    assert classify_pair(iv(0, 5, "A"), iv(6, 9, "B"), gap1) == BEFORE


def test_classify_rejects_unordered_pair():
    with pytest.raises(ValueError):
        classify_pair(iv(5, 9, "B"), iv(0, 5, "A"), RelationConfig())


def test_classify_all_seven_reachable():
    cfg = RelationConfig()
    cases = {
        BEFORE: ((0, 1), (3, 4)),
        MEETS: ((0, 2), (2, 4)),
        OVERLAPS: ((0, 3), (1, 4)),
        FINISHED_BY: ((0, 4), (2, 4)),
        CONTAINS: ((0, 5), (1, 4)),
        STARTS: ((0, 2), (0, 4)),
        EQUAL: ((0, 3), (0, 3)),
    }
    for code, (a, b) in cases.items():
        assert classify_pair(iv(*a, "A"), iv(*b, "B"), cfg) == code


@given(st.integers(0, 20), st.integers(0, 8), st.integers(0, 20), st.integers(0, 8),
       st.integers(0, 3))
def test_partition_exactly_one_code(s1, l1, s2, l2, eps):
    a = (s1, s1 + l1)
    b = (s2, s2 + l2)
    if b < a:
        a, b = b, a
    code = classify_endpoints(*a, *b, epsilon=eps)
    assert code in range(7)
    if eps == 0:
        assert code == _oracle_classify(*a, *b)


def test_classify_epsilon_tolerance():
    assert classify_endpoints(0, 5, 1, 5, epsilon=1) == EQUAL
    assert classify_endpoints(0, 5, 1, 7, epsilon=1) == STARTS
    assert classify_endpoints(0, 5, 6, 9, epsilon=1) == MEETS
    assert classify_endpoints(0, 5, 7, 9, epsilon=1) == BEFORE


def test_abstract_partition():
    assert to_abstract(BEFORE) == A_BEFORE
    assert to_abstract(MEETS) == A_BEFORE
    assert to_abstract(OVERLAPS) == A_OVERLAPS
    for code in (FINISHED_BY, CONTAINS, STARTS, EQUAL):
        assert to_abstract(code) == A_CONTAINS
    assert sorted({to_abstract(c) for c in range(7)}) == [0, 1, 2]


def test_map_code_modes():
    assert map_code(MEETS, ALLEN7) == MEETS
    assert map_code(MEETS, ABSTRACT3) == A_BEFORE
    assert map_code(EQUAL, ABSTRACT3) == A_CONTAINS


# --- composition tables ----------------------------------------------------


def test_composition_tables_match_oracle_builder():
    table7, table3 = _oracle_tables()
    for r1, r2 in product(range(7), range(7)):
        assert compose(r1, r2, ALLEN7) == tuple(sorted(table7[r1][r2])), (r1, r2)
    for r1, r2 in product(range(3), range(3)):
        assert compose(r1, r2, ABSTRACT3) == tuple(sorted(table3[r1][r2])), (r1, r2)


def test_compose_spec_examples():
    assert compose(BEFORE, BEFORE, ALLEN7) == (BEFORE,)
    assert compose(CONTAINS, CONTAINS, ALLEN7) == (CONTAINS,)
    assert compose(OVERLAPS, BEFORE, ALLEN7) == (BEFORE,)


def test_compose_set_matches_compose():
    for r1, r2 in product(range(7), range(7)):
        assert compose_set(r1, r2, ALLEN7) == frozenset(compose(r1, r2, ALLEN7))
    for r1, r2 in product(range(3), range(3)):
        assert compose_set(r1, r2, ABSTRACT3) == frozenset(compose(r1, r2, ABSTRACT3))


def test_abstract_table_consistency():
    # compose_abstract(x, y) == union of to_abstract over the base compositions
    by_abstract = {0: [], 1: [], 2: []}
    for code in range(7):
        by_abstract[to_abstract(code)].append(code)
    for x, y in product(range(3), range(3)):
        derived = set()
        for r1 in by_abstract[x]:
            for r2 in by_abstract[y]:
                derived.update(to_abstract(c) for c in compose(r1, r2, ALLEN7))
        assert set(compose(x, y, ABSTRACT3)) == derived, (x, y)


def test_composition_soundness_fuzz():
    rng = random.Random(42)
    for _ in range(20000):
        spans = sorted(
            ((s, s + rng.randint(0, 8)) for s in (rng.randint(0, 20) for _ in range(3))))
        r1 = _oracle_classify(*spans[0], *spans[1])
        r2 = _oracle_classify(*spans[1], *spans[2])
        r13 = _oracle_classify(*spans[0], *spans[2])
        assert r13 in compose(r1, r2, ALLEN7)
        assert to_abstract(r13) in compose(to_abstract(r1), to_abstract(r2), ABSTRACT3)


# --- serialization ---------------------------------------------------------


def test_relation_characters():
    assert [rel_char(c, ALLEN7) for c in range(7)] == ["<", "m", "o", "f", "c", "s", "="]
    assert [rel_char(c, ABSTRACT3) for c in range(3)] == ["B", "O", "C"]
    for ch in REL_CHARS:
        assert rel_char(code_from_char(ch), ALLEN7) == ch
        assert mode_of_char(ch) == ALLEN7
    for ch in ABS_CHARS:
        assert rel_char(code_from_char(ch), ABSTRACT3) == ch
        assert mode_of_char(ch) == ABSTRACT3
    with pytest.raises(ValueError):
        code_from_char("?")
    with pytest.raises(ValueError):
        mode_of_char("x")


def test_relation_config_validation():
    with pytest.raises(ValueError):
        RelationConfig(epsilon=-1)
    with pytest.raises(ValueError):
        RelationConfig(max_gap=-2)
    with pytest.raises(ValueError):
        RelationConfig(mode="nope")
