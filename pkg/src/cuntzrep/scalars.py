"""Exact scalar arithmetic: rationals, finite radical sums, complex values.

The exact ring consists of finite sums ``sum_r q_r * sqrt(r)`` where the
radicands ``r`` are square-free positive integers (radicand 1 is the rational
part) and the coefficients ``q_r`` are rationals.  The representation is
canonical -- square roots of distinct square-free integers are linearly
independent over the rationals -- so equality is decided by comparing term
maps.  The ring is closed under addition and multiplication; general division
is deliberately not provided, only reciprocals of single-term values
``q*sqrt(r)`` (every formula in scope needs nothing more).

:class:`Scalar` is a complex value over this ring, with an alternative
floating-point mode.  Arithmetic involving any approximate operand produces
an approximate result, so a computation started exact stays exact until it
explicitly mixes in floats.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .errors import ValidationError

Rational = Fraction

#: Trial-division bound for radicand canonicalization.  Radicands whose
#: square-free part cannot be certified below this bound are rejected;
#: desk-scale inputs keep radicands tiny.
FACTOR_LIMIT = 10**6


@lru_cache(maxsize=None)
def square_free_split(n: int) -> tuple[int, int]:
    """Write ``n = s*s*r`` with ``r`` square-free; return ``(s, r)``.

    Factors by trial division.  A cofactor surviving division up to
    ``FACTOR_LIMIT`` is either a certified prime, a perfect square of a large
    prime (absorbed into ``s``), or rejected.
    """
    if n <= 0:
        raise ValidationError(f"radicand must be positive, got {n}")
    s, r, m = 1, 1, n
    d = 2
    while d * d <= m and d <= FACTOR_LIMIT:
        if m % d == 0:
            e = 0
            while m % d == 0:
                m //= d
                e += 1
            s *= d ** (e // 2)
            if e % 2:
                r *= d
        d += 1 if d == 2 else 2
    if m > 1:
        root = math.isqrt(m)
        if root * root == m:
            s *= root
        elif m < FACTOR_LIMIT * FACTOR_LIMIT:
            # survived trial division below its own square root: prime
            r *= m
        else:
            raise ValidationError(f"radicand {n} exceeds the factorization bound {FACTOR_LIMIT}")
    return s, r


@lru_cache(maxsize=None)
def _float_sqrt(r: int) -> float:
    return math.sqrt(r)


class RadicalSum:
    """A finite sum ``sum_r q_r * sqrt(r)`` over square-free radicands.

    ``terms`` maps each radicand to its nonzero rational coefficient.
    Instances are immutable by convention; all operations return new values.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean: dict[int, Fraction] = {}
        for rad, coeff in dict(terms or {}).items():
            coeff = Fraction(coeff)
            if coeff == 0:
                continue
            s, r = square_free_split(int(rad))
            acc = clean.get(r, _F0) + coeff * s
            if acc == 0:
                clean.pop(r, None)
            else:
                clean[r] = acc
        self.terms = clean

    @classmethod
    def _raw(cls, terms: dict[int, Fraction]) -> "RadicalSum":
        # trusted constructor: terms already canonical
        obj = object.__new__(cls)
        obj.terms = terms
        return obj

    @classmethod
    def from_fraction(cls, q) -> "RadicalSum":
        q = Fraction(q)
        return cls._raw({1: q} if q else {})

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return not self.terms or set(self.terms) == {1}

    def rational_part(self) -> Fraction:
        return self.terms.get(1, _F0)

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValidationError(f"{self!r} is not rational")
        return self.rational_part()

    def is_nonnegative_combination(self) -> bool:
        """True when every coefficient is >= 0 (a sufficient certificate of
        nonnegativity; single-term values make it necessary as well)."""
        return all(c >= 0 for c in self.terms.values())

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RadicalSum.from_fraction(other)
        if not isinstance(other, RadicalSum):
            return NotImplemented
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for r, c in other.terms.items():
            acc = out.get(r, _F0) + c
            if acc == 0:
                out.pop(r, None)
            else:
                out[r] = acc
        return RadicalSum._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return RadicalSum._raw({r: -c for r, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RadicalSum.from_fraction(other)
        if not isinstance(other, RadicalSum):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            if q == 0 or not self.terms:
                return RS_ZERO
            return RadicalSum._raw({r: c * q for r, c in self.terms.items()})
        if not isinstance(other, RadicalSum):
            return NotImplemented
        a, b = self.terms, other.terms
        if not a or not b:
            return RS_ZERO
        out: dict[int, Fraction] = {}
        for r, c in a.items():
            for s, d in b.items():
                if r == s:
                    rad, mult = 1, r
                elif r == 1:
                    rad, mult = s, 1
                elif s == 1:
                    rad, mult = r, 1
                else:
                    g = math.gcd(r, s)
                    rad, mult = (r // g) * (s // g), g
                coeff = c * d * mult
                acc = out.get(rad, _F0) + coeff
                if acc == 0:
                    out.pop(rad, None)
                else:
                    out[rad] = acc
        return RadicalSum._raw(out)

    __rmul__ = __mul__

    def reciprocal(self) -> "RadicalSum":
        """Reciprocal of a single-term value: 1/(q*sqrt(r)) = (1/(q*r))*sqrt(r)."""
        if len(self.terms) != 1:
            raise ValidationError("reciprocal is only defined for single-term radical values")
        (r, q), = self.terms.items()
        return RadicalSum._raw({r: 1 / (q * r)})

    # -- conversions --------------------------------------------------------

    def to_float(self) -> float:
        total = 0.0
        for r, c in self.terms.items():
            total += float(c) if r == 1 else float(c) * _float_sqrt(r)
        return total

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RadicalSum.from_fraction(other)
        if not isinstance(other, RadicalSum):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for r in sorted(self.terms):
            c = self.terms[r]
            bits.append(str(c) if r == 1 else f"{c}*sqrt({r})")
        return " + ".join(bits)


_F0 = Fraction(0)
RS_ZERO = RadicalSum._raw({})
RS_ONE = RadicalSum._raw({1: Fraction(1)})


def sqrt_positive_rational(q) -> RadicalSum:
    """Exact square root of a positive rational, as a single radical term.

    sqrt(p/q) = sqrt(p*q)/q; the radicand is canonicalized to square-free form.
    """
    q = Fraction(q)
    if q <= 0:
        raise ValidationError(f"square root requires a positive rational, got {q}")
    s, r = square_free_split(q.numerator * q.denominator)
    return RadicalSum._raw({r: Fraction(s, q.denominator)})


class Scalar:
    """A complex scalar, exact (RadicalSum real/imaginary parts) or floating.

    Exact values keep ``re``/``im`` as :class:`RadicalSum` and ``z = None``;
    approximate values keep a complex ``z``.  Mixing modes demotes to
    approximate.
    """

    __slots__ = ("re", "im", "z")

    def __init__(self, re=None, im=None, z=None):
        if z is not None:
            self.re = self.im = None
            self.z = complex(z)
        else:
            self.re = re if re is not None else RS_ZERO
            self.im = im if im is not None else RS_ZERO
            self.z = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def exact(cls, re: RadicalSum, im: RadicalSum | None = None) -> "Scalar":
        return cls(re=re, im=im)

    @classmethod
    def rational(cls, q) -> "Scalar":
        return cls(re=RadicalSum.from_fraction(q))

    @classmethod
    def radical(cls, rs: RadicalSum) -> "Scalar":
        return cls(re=rs)

    @classmethod
    def approx(cls, z) -> "Scalar":
        return cls(z=complex(z))

    # -- predicates ---------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.z is None

    def is_zero(self) -> bool:
        if self.is_exact:
            return self.re.is_zero() and self.im.is_zero()
        return self.z == 0

    def is_real(self) -> bool:
        return self.im.is_zero() if self.is_exact else self.z.imag == 0.0

    def is_rational(self) -> bool:
        return self.is_exact and self.im.is_zero() and self.re.is_rational()

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValidationError(f"{self!r} is not an exact rational")
        return self.re.rational_part()

    def is_nonnegative_real(self) -> bool:
        """Sufficient certificate: exact, real, all coefficients >= 0."""
        if self.is_exact:
            return self.im.is_zero() and self.re.is_nonnegative_combination()
        return self.z.imag == 0.0 and self.z.real >= 0.0

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_exact and other.is_exact:
            return Scalar(re=self.re + other.re, im=self.im + other.im)
        return Scalar(z=self.to_complex() + other.to_complex())

    __radd__ = __add__

    def __neg__(self):
        if self.is_exact:
            return Scalar(re=-self.re, im=-self.im)
        return Scalar(z=-self.z)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_exact and other.is_exact:
            if self.is_zero() or other.is_zero():
                return SC_ZERO
            a, b, c, d = self.re, self.im, other.re, other.im
            if b.is_zero() and d.is_zero():
                return Scalar(re=a * c)
            return Scalar(re=a * c - b * d, im=a * d + b * c)
        return Scalar(z=self.to_complex() * other.to_complex())

    __rmul__ = __mul__

    def scale(self, q) -> "Scalar":
        """Multiply by an exact rational without leaving the current mode."""
        q = Fraction(q)
        if self.is_exact:
            if q == 0 or self.is_zero():
                return SC_ZERO
            return Scalar(re=self.re * q, im=self.im * q)
        return Scalar(z=self.z * float(q))

    def conj(self) -> "Scalar":
        if self.is_exact:
            return Scalar(re=self.re, im=-self.im)
        return Scalar(z=self.z.conjugate())

    def abs2(self) -> "Scalar":
        """|z|^2, exact in exact mode (always a real scalar)."""
        if self.is_exact:
            return Scalar(re=self.re * self.re + self.im * self.im)
        return Scalar(z=complex(abs(self.z) ** 2))

    def reciprocal(self) -> "Scalar":
        """1/z via conj(z)/|z|^2; exact when |z|^2 is a single radical term."""
        if self.is_zero():
            raise ZeroDivisionError("reciprocal of zero scalar")
        if self.is_exact:
            inv = (self.re * self.re + self.im * self.im).reciprocal()
            return Scalar(re=self.re * inv, im=-self.im * inv)
        return Scalar(z=1 / self.z)

    # -- conversions ---------------------------------------------------------

    def to_complex(self) -> complex:
        if self.is_exact:
            return complex(self.re.to_float(), self.im.to_float())
        return self.z

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_exact and other.is_exact:
            return self.re == other.re and self.im == other.im
        return self.to_complex() == other.to_complex()

    def __repr__(self):
        if not self.is_exact:
            return f"Scalar~({self.z})"
        if self.im.is_zero():
            return f"Scalar({self.re})"
        return f"Scalar({self.re} + ({self.im})i)"


def _coerce(value) -> Scalar:
    if isinstance(value, Scalar):
        return value
    if isinstance(value, (int, Fraction)):
        return Scalar.rational(value)
    if isinstance(value, RadicalSum):
        return Scalar.radical(value)
    if isinstance(value, (float, complex)):
        return Scalar.approx(value)
    return NotImplemented


SC_ZERO = Scalar(re=RS_ZERO)
SC_ONE = Scalar(re=RS_ONE)


def to_float(value) -> complex:
    """Floating projection of a Scalar, RadicalSum, or rational."""
    if isinstance(value, Scalar):
        return value.to_complex()
    if isinstance(value, RadicalSum):
        return complex(value.to_float())
    return complex(Fraction(value))


def isclose(a, b, tol: float = 1e-9) -> bool:
    """Absolute-tolerance comparison after floating projection."""
    return abs(to_float(a) - to_float(b)) <= tol
