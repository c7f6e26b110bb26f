"""Finite words over {0..N-1}, cylinder combinatorics, and tail points.

Words are plain tuples of ints; the alphabet size is always carried alongside
by the objects that need it, never inferred from the letters.  A word ``I``
names the cylinder set C(I) of infinite words beginning with ``I``.  The left
shift drops the first letter; its right inverses prepend one letter.
Eventually-constant infinite words ("tail points") are the atoms of the
atomic measures: a finite prefix followed by a constant tail letter.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

from .errors import ValidationError

Letters = tuple[int, ...]

EMPTY_WORD: Letters = ()


def check_alphabet(n: int) -> int:
    if not isinstance(n, int) or n < 2:
        raise ValidationError(f"alphabet size must be an integer >= 2, got {n!r}")
    return n


def check_word(word, n: int) -> Letters:
    w = tuple(int(x) for x in word)
    if any(x < 0 or x >= n for x in w):
        raise ValidationError(f"word {w} has letters outside the alphabet of size {n}")
    return w


def parse_word(text: str, n: int) -> Letters:
    """Parse a digit string like '011' into a word (empty string allowed)."""
    if text and not text.isdigit():
        raise ValidationError(f"word string must consist of digits, got {text!r}")
    return check_word(tuple(int(ch) for ch in text), n)


def format_word(word) -> str:
    return "".join(str(x) for x in word)


def iter_words(n: int, length: int):
    """All words of the given length in lexicographic (= index) order."""
    return itertools.product(range(n), repeat=length)


def index_of(word, n: int) -> int:
    """Base-N value of a word, most significant letter first.

    This is the table index used throughout: a step function of depth k
    stores the entry for word w at ``index_of(w, n)``.
    """
    idx = 0
    for x in word:
        idx = idx * n + x
    return idx


def word_of_index(idx: int, n: int, length: int) -> Letters:
    out = []
    for _ in range(length):
        idx, r = divmod(idx, n)
        out.append(r)
    return tuple(reversed(out))


class CylinderRelation(Enum):
    DISJOINT = "disjoint"
    EQUAL = "equal"
    CONTAINS = "contains"
    CONTAINED_IN = "contained_in"


def cylinder_relation(a, b) -> CylinderRelation:
    """Set relation of the cylinders C(a) and C(b): nested or disjoint."""
    a, b = tuple(a), tuple(b)
    k = min(len(a), len(b))
    if a[:k] != b[:k]:
        return CylinderRelation.DISJOINT
    if len(a) == len(b):
        return CylinderRelation.EQUAL
    return CylinderRelation.CONTAINS if len(a) < len(b) else CylinderRelation.CONTAINED_IN


def prepend(letter: int, word) -> Letters:
    """The image of C(word) under the right inverse that prepends ``letter``."""
    return (letter,) + tuple(word)


def shift_preimage(word, n: int) -> tuple[Letters, ...]:
    """The shift preimage of C(word), as the list of cylinders {C(j word)}."""
    w = tuple(word)
    return tuple((j,) + w for j in range(n))


@dataclass(frozen=True)
class TailPoint:
    """The infinite word ``prefix . tail tail tail ...`` in canonical form.

    Canonical means the prefix does not end with the tail letter, which makes
    the representation unique: two tail points are equal iff their fields are.
    """

    prefix: Letters
    tail: int

    def __post_init__(self):
        if self.prefix and self.prefix[-1] == self.tail:
            raise ValidationError(
                f"non-canonical tail point: prefix {self.prefix} ends with tail letter {self.tail}"
            )

    def truncate(self, k: int) -> Letters:
        """The first k letters of the infinite word."""
        if k <= len(self.prefix):
            return self.prefix[:k]
        return self.prefix + (self.tail,) * (k - len(self.prefix))

    def in_cylinder(self, word) -> bool:
        word = tuple(word)
        return self.truncate(len(word)) == word

    def first_letter(self) -> int:
        return self.prefix[0] if self.prefix else self.tail

    def __str__(self):
        return f"{format_word(self.prefix)}|{self.tail}^inf"


def make_tail_point(prefix, tail: int) -> TailPoint:
    """Canonicalize by absorbing trailing copies of the tail letter."""
    p = tuple(prefix)
    while p and p[-1] == tail:
        p = p[:-1]
    return TailPoint(p, tail)


def tail_shift(p: TailPoint) -> TailPoint:
    """Drop the first letter; the all-tail word is a fixed point of the shift."""
    if not p.prefix:
        return p
    return TailPoint(p.prefix[1:], p.tail)


def tail_prepend(letter: int, p: TailPoint) -> TailPoint:
    """Prepend a letter, absorbing it into the tail when that keeps it canonical."""
    if not p.prefix and letter == p.tail:
        return p
    return TailPoint((letter,) + p.prefix, p.tail)
