"""Words, cylinder relations, shift maps, tail points."""

import itertools

import pytest

from cuntzrep.errors import ValidationError
from cuntzrep.words import (
    CylinderRelation,
    TailPoint,
    cylinder_relation,
    format_word,
    index_of,
    iter_words,
    make_tail_point,
    parse_word,
    prepend,
    shift_preimage,
    tail_prepend,
    tail_shift,
    word_of_index,
)


def test_parse_and_format_roundtrip():
    assert parse_word("011", 2) == (0, 1, 1)
    assert parse_word("", 3) == ()
    assert format_word((0, 1, 1)) == "011"
    with pytest.raises(ValidationError):
        parse_word("012", 2)
    with pytest.raises(ValidationError):
        parse_word("0a", 2)


def test_index_word_roundtrip():
    for n in (2, 3):
        for k in range(4):
            for w in iter_words(n, k):
                assert word_of_index(index_of(w, n), n, k) == w


def test_cylinder_relation_examples():
    assert cylinder_relation((0, 1), (0, 1)) is CylinderRelation.EQUAL
    assert cylinder_relation((0,), (0, 1)) is CylinderRelation.CONTAINS
    assert cylinder_relation((0, 1), (0,)) is CylinderRelation.CONTAINED_IN
    assert cylinder_relation((0, 1), (1, 0)) is CylinderRelation.DISJOINT
    assert cylinder_relation((), (1, 0)) is CylinderRelation.CONTAINS


def test_shift_word_maps():
    assert prepend(0, (1, 1)) == (0, 1, 1)
    assert shift_preimage((1,), 2) == ((0, 1), (1, 1))
    assert prepend(1, ()) == (1,)


def test_partition_refinement_consistency():
    # the N preimage cylinders of each word partition the shift preimage:
    # pairwise disjoint, each contained in no other, and their letters cover Z_N
    for n in (2, 3):
        for k in range(4):
            for w in iter_words(n, k):
                pre = shift_preimage(w, n)
                assert len(pre) == n
                for a, b in itertools.combinations(pre, 2):
                    assert cylinder_relation(a, b) is CylinderRelation.DISJOINT


def test_tail_point_canonical_form():
    with pytest.raises(ValidationError):
        TailPoint((0, 1, 0), 0)
    p = make_tail_point((0, 1, 0, 0), 0)
    assert p == TailPoint((0, 1), 0)
    # uniqueness: equality iff fields equal
    assert make_tail_point((0, 1), 0) == p
    assert make_tail_point((0, 1), 0) != make_tail_point((0, 1), 1)


def test_tail_shift_examples():
    assert tail_shift(TailPoint((0, 1), 0)) == TailPoint((1,), 0)
    fixed = TailPoint((), 0)
    assert tail_shift(fixed) == fixed


def test_tail_prepend_absorption():
    fixed = TailPoint((), 0)
    assert tail_prepend(0, fixed) == fixed
    assert tail_prepend(1, fixed) == TailPoint((1,), 0)


def test_shift_after_prepend_is_identity():
    points = [TailPoint((), 0), TailPoint((1,), 0), TailPoint((0, 1), 0), TailPoint((2, 1), 0)]
    for p in points:
        n = 3
        for i in range(n):
            assert tail_shift(tail_prepend(i, p)) == p


def test_truncate_and_membership():
    p = TailPoint((1, 0, 1), 0)
    assert p.truncate(2) == (1, 0)
    assert p.truncate(5) == (1, 0, 1, 0, 0)
    assert p.in_cylinder((1, 0, 1, 0))
    assert not p.in_cylinder((1, 1))
    assert p.first_letter() == 1
    assert TailPoint((), 2).first_letter() == 2
