"""Shared fixtures: the worked examples used across the suite.

M1 is the two-letter Markov spec with transitions [[1/2,1/2],[1/4,3/4]] and
stationary vector (1/3, 2/3); A1 the atomic tail spec with tail letter 0 and
weights (1/3, 1/3).  Random spec generators are seeded and produce exact
rational stochastic matrices.
"""

import random
from fractions import Fraction

import pytest

from cuntzrep.measures import AtomicTailSpec, MarkovSpec, ProductSpec
from cuntzrep.monic import kakutani_monic_system, markov_monic_system
from cuntzrep.scalars import RS_ZERO, Scalar, sqrt_positive_rational


@pytest.fixture
def m1_spec() -> MarkovSpec:
    return MarkovSpec.with_stationary(
        [[Fraction(1, 2), Fraction(1, 2)], [Fraction(1, 4), Fraction(3, 4)]]
    )


@pytest.fixture
def m1_system(m1_spec):
    return markov_monic_system(m1_spec)


@pytest.fixture
def product_13_spec() -> ProductSpec:
    return ProductSpec((Fraction(1, 3), Fraction(2, 3)))


@pytest.fixture
def a1_spec() -> AtomicTailSpec:
    return AtomicTailSpec(2, 0, (Fraction(1, 3), Fraction(1, 3)))


@pytest.fixture
def kakutani_phase_system():
    """z = (1/sqrt(2), i/sqrt(2)): uniform Bernoulli measure, one imaginary phase."""
    half_root_two = sqrt_positive_rational(Fraction(1, 2))
    z = [Scalar.radical(half_root_two), Scalar.exact(RS_ZERO, half_root_two)]
    return kakutani_monic_system(z)


@pytest.fixture
def kakutani_plain_system():
    half_root_two = sqrt_positive_rational(Fraction(1, 2))
    z = [Scalar.radical(half_root_two), Scalar.radical(half_root_two)]
    return kakutani_monic_system(z)


def random_stochastic_matrix(n: int, rng: random.Random):
    """A strictly positive row-stochastic matrix with small rational entries."""
    rows = []
    for _ in range(n):
        raw = [rng.randint(1, 9) for _ in range(n)]
        total = sum(raw)
        rows.append(tuple(Fraction(x, total) for x in raw))
    return tuple(rows)


def random_markov_spec(n: int, rng: random.Random) -> MarkovSpec:
    return MarkovSpec.with_stationary(random_stochastic_matrix(n, rng))
