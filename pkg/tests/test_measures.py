"""Cylinder measures: masses, pushforwards, derivatives, integration, affinity."""

import itertools
import math
import random
from fractions import Fraction

import pytest

from conftest import random_markov_spec, random_stochastic_matrix
from cuntzrep.errors import NotAbsolutelyContinuousError, ValidationError
from cuntzrep.measures import (
    BRUTE_FORCE_DEPTH,
    AtomicTailMeasure,
    MarkovMeasure,
    MarkovSpec,
    ProductSpec,
    TableMeasure,
    affinity,
    affinity_sequence,
    consistency_check,
    inner_product,
    integrate,
    markov_affinity_crossing,
    masses_equal,
    product_measure,
    rn_derivative,
    stationary_vector,
)
from cuntzrep.scalars import Scalar
from cuntzrep.stepfuncs import StepFunction
from cuntzrep.words import iter_words


def brute_markov_mass(spec: MarkovSpec, word) -> Fraction:
    """Oracle: multiply the chain factors directly."""
    if not word:
        return Fraction(1)
    m = spec.stationary[word[0]]
    for a, b in zip(word, word[1:]):
        m *= spec.transitions[a][b]
    return m


def test_markov_mass_examples(m1_spec):
    mu = MarkovMeasure(m1_spec)
    # 1/3 * 1/2 * 3/4, evaluated by hand
    assert mu.mass((0, 1, 1)) == Fraction(1, 8)
    assert mu.mass(()) == 1
    assert mu.mass((0, 1, 1)) == brute_markov_mass(m1_spec, (0, 1, 1))


def test_product_mass():
    mu = product_measure([Fraction(1, 2), Fraction(1, 2)])
    for w in iter_words(2, 3):
        assert mu.mass(w) == Fraction(1, 8)


def test_stationary_vector_m1(m1_spec):
    # oracle: solve v0/2 + v1/4 = v0 with v0 + v1 = 1 by hand -> (1/3, 2/3)
    assert stationary_vector(m1_spec.transitions) == (Fraction(1, 3), Fraction(2, 3))


def test_stationary_vector_product_rows():
    p = (Fraction(1, 5), Fraction(2, 5), Fraction(2, 5))
    assert stationary_vector((p, p, p)) == p


def test_stationary_vector_symmetric():
    t = ((Fraction(1, 2), Fraction(1, 2)), (Fraction(1, 2), Fraction(1, 2)))
    assert stationary_vector(t) == (Fraction(1, 2), Fraction(1, 2))


def test_stationary_vector_random_is_stationary():
    rng = random.Random(21)
    for n in (2, 3):
        for _ in range(10):
            T = random_stochastic_matrix(n, rng)
            lam = stationary_vector(T)
            assert sum(lam) == 1 and all(x > 0 for x in lam)
            for i in range(n):
                assert sum(lam[j] * T[j][i] for j in range(n)) == lam[i]


def test_stationary_vector_validation():
    with pytest.raises(ValidationError):
        stationary_vector(((Fraction(1, 2), Fraction(1, 2)), (Fraction(1, 3), Fraction(1, 3))))
    with pytest.raises(ValidationError):
        stationary_vector(((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))))


def test_markov_spec_validation():
    with pytest.raises(ValidationError):
        MarkovSpec(((Fraction(1, 2), Fraction(1, 2)),) * 2, (Fraction(1, 4), Fraction(3, 4)))


def test_pushforward_section(m1_spec):
    mu = MarkovMeasure(m1_spec)
    pushed = mu.pushforward_section(0)
    assert pushed.mass((0, 1)) == mu.mass((1,)) == Fraction(2, 3)
    assert pushed.mass((1,)) == 0
    assert pushed.total() == mu.total()


def test_pushforward_shift_invariance(m1_spec):
    mu = MarkovMeasure(m1_spec)
    pushed = mu.pushforward_shift()
    # hand: mass(C(1)) = mu(C(01)) + mu(C(11)) = 1/6 + 1/2 = 2/3
    assert pushed.mass((1,)) == Fraction(2, 3) == mu.mass((1,))
    assert masses_equal(pushed, mu, 6)


def test_shift_invariance_random():
    rng = random.Random(17)
    for n in (2, 3):
        for _ in range(10):
            spec = random_markov_spec(n, rng)
            mu = MarkovMeasure(spec)
            assert masses_equal(mu.pushforward_shift(), mu, 6 if n == 2 else 4)


def test_restrict_then_shift(m1_spec):
    mu = MarkovMeasure(m1_spec)
    r = mu.restrict_then_shift(0)
    assert r.mass((1,)) == mu.mass((0, 1)) == Fraction(1, 6)
    assert r.total() == mu.mass((0,)) == Fraction(1, 3)


def test_restrict_then_shift_product_factorizes():
    p = (Fraction(1, 4), Fraction(3, 4))
    mu = product_measure(p)
    for i in range(2):
        r = mu.restrict_then_shift(i)
        for w in iter_words(2, 3):
            assert r.mass(w) == p[i] * mu.mass(w)


def test_section_then_shift_chain(m1_spec):
    # shift pushforward undoes the section pushforward exactly
    mu = MarkovMeasure(m1_spec)
    for i in range(2):
        chained = mu.pushforward_section(i).pushforward_shift()
        assert masses_equal(chained, mu, 5)


def test_atomic_pushforward_fixes_fixed_point(a1_spec):
    mu = AtomicTailMeasure(a1_spec)
    pushed = mu.pushforward_shift()
    # the all-tail word is fixed by the shift, so its cylinder masses are
    # reproduced in the pushforward on the all-tail cylinders
    assert pushed.total() == mu.total()
    for k in range(1, 6):
        word = (0,) * k
        assert pushed.mass(word) >= mu.mass(word + (0,))


def test_rn_derivative_m1(m1_spec):
    mu = MarkovMeasure(m1_spec)
    deriv, exact = rn_derivative(mu.pushforward_section(0), mu, 2)
    assert exact
    values = {w: v for w, v in deriv.items()}
    # hand ratios: (1/3)/(1/6) and (2/3)/(1/6)
    assert values[(0, 0)] == Scalar.rational(2)
    assert values[(0, 1)] == Scalar.rational(4)
    assert values[(1, 0)] == Scalar.rational(0)
    assert values[(1, 1)] == Scalar.rational(0)


def test_rn_derivative_closed_form_random():
    # cross-check the section-pushforward derivative against the chain
    # closed form stat[x2] / (stat[j] T[j][x2]) on the branch cylinder
    rng = random.Random(23)
    for n in (2, 3):
        for _ in range(10):
            spec = random_markov_spec(n, rng)
            mu = MarkovMeasure(spec)
            for j in range(n):
                deriv, exact = rn_derivative(mu.pushforward_section(j), mu, 2)
                assert exact
                for w, value in deriv.items():
                    expected = (
                        spec.stationary[w[1]] / (spec.stationary[j] * spec.transitions[j][w[1]])
                        if w[0] == j
                        else Fraction(0)
                    )
                    assert value == Scalar.rational(expected)


def test_rn_derivative_self_is_one(m1_spec):
    mu = MarkovMeasure(m1_spec)
    deriv, exact = rn_derivative(mu, mu, 2)
    assert exact
    assert deriv == StepFunction.one(2)


def test_rn_derivative_inexact_for_different_measures(m1_spec, product_13_spec):
    from cuntzrep.measures import ProductMeasure

    deriv, exact = rn_derivative(ProductMeasure(product_13_spec), MarkovMeasure(m1_spec), 2)
    assert not exact


def test_rn_derivative_absolute_continuity_error(m1_spec):
    mu = MarkovMeasure(m1_spec)
    pushed = mu.pushforward_section(0)
    with pytest.raises(NotAbsolutelyContinuousError) as err:
        rn_derivative(mu, pushed, 1)
    assert err.value.witness == "1"


def test_integrate_examples(m1_spec):
    mu = MarkovMeasure(m1_spec)
    assert integrate(StepFunction.one(2), mu) == Scalar.rational(1)
    assert integrate(StepFunction.indicator(2, (0, 1)), mu) == Scalar.rational(Fraction(1, 6))
    # the squared root-derivative integrates to the pushforward total mass
    deriv, _ = rn_derivative(mu.pushforward_section(0), mu, 2)
    assert integrate(deriv, mu) == Scalar.rational(1)


def test_inner_product_conjugates_first():
    mu = product_measure([Fraction(1, 2), Fraction(1, 2)])
    from cuntzrep.scalars import RS_ONE, RS_ZERO

    i_unit = Scalar.exact(RS_ZERO, RS_ONE)
    f = StepFunction.constant(2, i_unit)
    assert inner_product(f, StepFunction.one(2), mu) == Scalar.exact(RS_ZERO, -RS_ONE)


def test_affinity_self_is_one(m1_spec):
    mu = MarkovMeasure(m1_spec)
    for d in range(6):
        assert affinity(mu, mu, d) == pytest.approx(1.0, abs=1e-12)


def test_affinity_bernoulli_pair():
    a = product_measure([Fraction(1, 2), Fraction(1, 2)])
    b = product_measure([Fraction(1, 4), Fraction(3, 4)])
    base = math.sqrt(1 / 8) + math.sqrt(3 / 8)
    assert affinity(a, b, 1) == pytest.approx(base, abs=1e-12)
    assert affinity(a, b, 2) == pytest.approx(base**2, abs=1e-12)


def test_affinity_recursion_matches_enumeration(m1_spec, product_13_spec):
    mu = MarkovMeasure(m1_spec)
    nu = MarkovMeasure(product_13_spec.to_markov())
    for d in range(9):
        assert affinity(mu, nu, d, method="recursion") == pytest.approx(
            affinity(mu, nu, d, method="enumerate"), abs=1e-10
        )


def test_affinity_enumeration_depth_guard(m1_spec):
    mu = MarkovMeasure(m1_spec)
    with pytest.raises(ValidationError):
        affinity(mu, mu, BRUTE_FORCE_DEPTH + 1, method="enumerate")


def test_affinity_monotone_and_decaying():
    rng = random.Random(29)
    for n in (2, 3):
        for _ in range(5):
            a = MarkovMeasure(random_markov_spec(n, rng))
            b = MarkovMeasure(random_markov_spec(n, rng))
            profile = affinity_sequence(a, b, 10)
            for d in range(10):
                assert profile[d + 1] <= profile[d] + 1e-12


def test_markov_affinity_crossing(m1_spec, product_13_spec):
    d = markov_affinity_crossing(m1_spec, product_13_spec.to_markov(), 0.01)
    assert d is not None
    profile = affinity_sequence(
        MarkovMeasure(m1_spec), MarkovMeasure(product_13_spec.to_markov()), d
    )
    assert profile[d] < 0.01 and profile[d - 1] >= 0.01


def test_consistency_check_passes(m1_spec, a1_spec):
    assert consistency_check(MarkovMeasure(m1_spec), 6).passed
    assert consistency_check(AtomicTailMeasure(a1_spec), 6).passed


def test_consistency_check_names_corrupted_cylinder(m1_spec):
    mu = MarkovMeasure(m1_spec)
    table = {}
    for d in range(4):
        for w in iter_words(2, d):
            table[w] = mu.mass(w)
    table[(0, 1)] += Fraction(1, 100)
    report = consistency_check(TableMeasure(2, table), 3)
    assert not report.passed
    witness = report.failures()[0].witness
    assert "C(0)" in witness or "C(01)" in witness


def test_affinity_jobs_parameter_matches_serial():
    a = product_measure([Fraction(1, 2), Fraction(1, 2)])
    b = product_measure([Fraction(1, 4), Fraction(3, 4)])
    assert affinity(a, b, 6, method="enumerate", jobs=2) == pytest.approx(
        affinity(a, b, 6, method="enumerate", jobs=1), abs=1e-12
    )
