"""Step functions: the dense operator domain.

A step function of depth k on the symbol space depends only on the first k
letters; it stores one scalar per length-k word, in a dense table indexed by
``index_of(word, n)``.  Composition with the shift raises the depth by one
(the table is tiled), composition with a prepend map lowers it (one block is
selected).  Pointwise algebra refines both operands to a common depth first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ResolutionError, ValidationError
from .scalars import SC_ONE, SC_ZERO, RadicalSum, Scalar, isclose
from .words import check_alphabet, check_word, index_of, iter_words


def _as_scalar(value) -> Scalar:
    if isinstance(value, Scalar):
        return value
    if isinstance(value, (int, Fraction)):
        return Scalar.rational(value)
    if isinstance(value, RadicalSum):
        return Scalar.radical(value)
    if isinstance(value, (float, complex)):
        return Scalar.approx(value)
    raise ValidationError(f"cannot interpret {value!r} as a scalar")


@dataclass(frozen=True, eq=False)
class StepFunction:
    n: int
    depth: int
    table: tuple

    def __post_init__(self):
        check_alphabet(self.n)
        if self.depth < 0:
            raise ValidationError("depth must be >= 0")
        if len(self.table) != self.n**self.depth:
            raise ValidationError(
                f"table must have exactly {self.n ** self.depth} entries, got {len(self.table)}"
            )

    # -- constructors --------------------------------------------------------

    @classmethod
    def constant(cls, n: int, value) -> "StepFunction":
        return cls(n, 0, (_as_scalar(value),))

    @classmethod
    def one(cls, n: int) -> "StepFunction":
        return cls(n, 0, (SC_ONE,))

    @classmethod
    def zero(cls, n: int) -> "StepFunction":
        return cls(n, 0, (SC_ZERO,))

    @classmethod
    def indicator(cls, n: int, word) -> "StepFunction":
        """The characteristic function of the cylinder C(word)."""
        w = check_word(word, n)
        size = n ** len(w)
        table = [SC_ZERO] * size
        table[index_of(w, n)] = SC_ONE
        return cls(n, len(w), tuple(table))

    @classmethod
    def from_map(cls, n: int, depth: int, mapping) -> "StepFunction":
        """Build from a {word: scalar} mapping; missing words default to zero."""
        table = [SC_ZERO] * (n**depth)
        for word, value in mapping.items():
            w = check_word(word, n)
            if len(w) != depth:
                raise ValidationError(f"word {w} does not have depth {depth}")
            table[index_of(w, n)] = _as_scalar(value)
        return cls(n, depth, tuple(table))

    # -- evaluation and depth ------------------------------------------------

    def evaluate(self, word) -> Scalar:
        w = tuple(word)
        if len(w) < self.depth:
            raise ResolutionError(
                f"word of length {len(w)} cannot resolve a depth-{self.depth} function"
            )
        return self.table[index_of(w[: self.depth], self.n)]

    def refine(self, depth: int) -> "StepFunction":
        """The same function re-tabulated at a finer depth."""
        if depth < self.depth:
            raise ResolutionError(f"cannot refine from depth {self.depth} down to {depth}")
        if depth == self.depth:
            return self
        factor = self.n ** (depth - self.depth)
        table = tuple(self.table[j // factor] for j in range(self.n**depth))
        return StepFunction(self.n, depth, table)

    def compose_shift(self) -> "StepFunction":
        """f o shift: depth k+1, value at (i, w) equals f(w).  Table is tiled."""
        return StepFunction(self.n, self.depth + 1, self.table * self.n)

    def compose_section(self, letter: int) -> "StepFunction":
        """f o (prepend letter): depth max(k-1, 0); constants are unchanged."""
        if not 0 <= letter < self.n:
            raise ValidationError(f"letter {letter} outside alphabet of size {self.n}")
        if self.depth == 0:
            return self
        size = self.n ** (self.depth - 1)
        return StepFunction(self.n, self.depth - 1, self.table[letter * size : (letter + 1) * size])

    # -- pointwise algebra ----------------------------------------------------

    def _common(self, other: "StepFunction") -> tuple["StepFunction", "StepFunction"]:
        if self.n != other.n:
            raise ValidationError("step functions live over different alphabets")
        d = max(self.depth, other.depth)
        return self.refine(d), other.refine(d)

    def __add__(self, other):
        if not isinstance(other, StepFunction):
            return NotImplemented
        a, b = self._common(other)
        return StepFunction(a.n, a.depth, tuple(x + y for x, y in zip(a.table, b.table)))

    def __sub__(self, other):
        if not isinstance(other, StepFunction):
            return NotImplemented
        a, b = self._common(other)
        return StepFunction(a.n, a.depth, tuple(x - y for x, y in zip(a.table, b.table)))

    def __neg__(self):
        return StepFunction(self.n, self.depth, tuple(-x for x in self.table))

    def __mul__(self, other):
        if isinstance(other, StepFunction):
            a, b = self._common(other)
            return StepFunction(a.n, a.depth, tuple(x * y for x, y in zip(a.table, b.table)))
        return self.scale(other)

    def __rmul__(self, other):
        if isinstance(other, StepFunction):
            return NotImplemented
        return self.scale(other)

    def scale(self, value) -> "StepFunction":
        c = _as_scalar(value)
        return StepFunction(self.n, self.depth, tuple(c * x for x in self.table))

    def conj(self) -> "StepFunction":
        return StepFunction(self.n, self.depth, tuple(x.conj() for x in self.table))

    def abs2(self) -> "StepFunction":
        return StepFunction(self.n, self.depth, tuple(x.abs2() for x in self.table))

    # -- comparison ------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, StepFunction):
            return NotImplemented
        if self.n != other.n:
            return False
        a, b = self._common(other)
        return a.table == b.table

    def allclose(self, other: "StepFunction", tol: float = 1e-9) -> bool:
        a, b = self._common(other)
        return all(isclose(x, y, tol) for x, y in zip(a.table, b.table))

    def is_zero(self) -> bool:
        return all(x.is_zero() for x in self.table)

    def is_exact(self) -> bool:
        return all(x.is_exact for x in self.table)

    def max_abs(self) -> float:
        return max(abs(x.to_complex()) for x in self.table)

    def items(self):
        """Iterate (word, value) pairs in index order."""
        return zip(iter_words(self.n, self.depth), self.table)

    def __repr__(self):
        return f"StepFunction(n={self.n}, depth={self.depth})"
