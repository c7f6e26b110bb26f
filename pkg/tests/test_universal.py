"""The finite-depth universal representation on square-root densities."""

import math
import random
from fractions import Fraction

import pytest

from cuntzrep.errors import ResolutionError, ValidationError
from cuntzrep.measures import MarkovMeasure, inner_product, product_measure
from cuntzrep.monic import apply_isometry, markov_monic_system, random_step_function
from cuntzrep.scalars import Scalar
from cuntzrep.stepfuncs import StepFunction
from cuntzrep.universal import (
    CommutantFamily,
    SigmaVector,
    commutant_family_check,
    embed,
    inner_product_depth,
    intertwine_check,
    norm_sq_depth,
    projection_covariance_gap,
    universal_adjoint,
    universal_isometry,
    universal_projection,
)
from cuntzrep.words import iter_words


def unit_vector(measure) -> SigmaVector:
    return SigmaVector.single(StepFunction.one(measure.n), measure)


def test_unit_norm_any_depth(m1_spec):
    x = unit_vector(MarkovMeasure(m1_spec))
    for d in range(6):
        assert inner_product_depth(x, x, d) == Scalar.rational(1)


def test_inner_product_equals_affinity():
    x = unit_vector(product_measure([Fraction(1, 2), Fraction(1, 2)]))
    y = unit_vector(product_measure([Fraction(1, 4), Fraction(3, 4)]))
    value = inner_product_depth(x, y, 1)
    assert value.to_complex().real == pytest.approx(
        math.sqrt(1 / 8) + math.sqrt(3 / 8), abs=1e-12
    )
    assert not value.is_exact


def test_inner_product_exact_on_shared_measure(m1_spec):
    mu = MarkovMeasure(m1_spec)
    rng = random.Random(79)
    for _ in range(10):
        f = random_step_function(2, 3, rng)
        g = random_step_function(2, 3, rng)
        lhs = inner_product_depth(
            SigmaVector.single(f, mu), SigmaVector.single(g, mu), 4
        )
        assert lhs.is_exact
        assert lhs == inner_product(f, g, mu)


def test_inner_product_depth_guard(m1_spec):
    mu = MarkovMeasure(m1_spec)
    x = SigmaVector.single(StepFunction.indicator(2, (0, 1)), mu)
    with pytest.raises(ResolutionError):
        inner_product_depth(x, x, 1)


def test_universal_isometry_on_unit(m1_spec):
    mu = MarkovMeasure(m1_spec)
    x = universal_isometry(0, unit_vector(mu))
    term = x.terms[0]
    assert term.func == StepFunction.one(2)
    assert term.measure.mass((0, 1)) == mu.mass((1,))
    assert term.measure.mass((1,)) == 0


def test_depth_shift_isometry(m1_spec):
    mu = MarkovMeasure(m1_spec)
    rng = random.Random(83)
    for _ in range(10):
        x = SigmaVector.single(random_step_function(2, 3, rng), mu)
        y = SigmaVector.single(random_step_function(2, 3, rng), mu)
        base = inner_product_depth(x, y, 4)
        for i in range(2):
            lifted = inner_product_depth(
                universal_isometry(i, x), universal_isometry(i, y), 5
            )
            assert lifted == base


def test_disjoint_ranges(m1_spec):
    mu = MarkovMeasure(m1_spec)
    x = unit_vector(mu)
    assert inner_product_depth(
        universal_isometry(0, x), universal_isometry(1, x), 3
    ) == Scalar.rational(0)


def test_adjoint_restores_up_to_norm_zero(m1_spec):
    mu = MarkovMeasure(m1_spec)
    rng = random.Random(89)
    for _ in range(5):
        x = SigmaVector.single(random_step_function(2, 2, rng), mu)
        for i in range(2):
            gap = norm_sq_depth(universal_adjoint(i, universal_isometry(i, x)) - x, 4)
            assert abs(gap) <= 1e-9


def test_adjoint_measure_mass(m1_spec):
    mu = MarkovMeasure(m1_spec)
    x = universal_adjoint(0, unit_vector(mu))
    assert x.terms[0].measure.total() == Fraction(1, 3)


def test_adjoint_kills_wrong_branch(m1_spec):
    mu = MarkovMeasure(m1_spec)
    x = SigmaVector.single(StepFunction.indicator(2, (0,)), mu)
    assert norm_sq_depth(universal_adjoint(1, x), 3) == pytest.approx(0.0, abs=1e-15)


def test_completeness_on_one_term(m1_spec):
    mu = MarkovMeasure(m1_spec)
    rng = random.Random(97)
    for _ in range(5):
        x = SigmaVector.single(random_step_function(2, 2, rng), mu)
        total = None
        for i in range(2):
            term = universal_isometry(i, universal_adjoint(i, x))
            total = term if total is None else total + term
        assert abs(norm_sq_depth(total - x, 4)) <= 1e-9


def test_projection_identity_and_idempotence(m1_spec):
    mu = MarkovMeasure(m1_spec)
    rng = random.Random(101)
    x = SigmaVector.single(random_step_function(2, 2, rng), mu)
    assert norm_sq_depth(universal_projection((), x) - x, 3) == pytest.approx(0.0, abs=1e-15)
    p = universal_projection((0, 1), x)
    assert norm_sq_depth(universal_projection((0, 1), p) - p, 3) == pytest.approx(
        0.0, abs=1e-15
    )


def test_projection_covariance(m1_spec):
    mu = MarkovMeasure(m1_spec)
    rng = random.Random(103)
    for _ in range(3):
        x = SigmaVector.single(random_step_function(2, 2, rng), mu)
        for wlen in range(3):
            for w in iter_words(2, wlen):
                for i in range(2):
                    assert abs(projection_covariance_gap(x, i, w, 4)) <= 1e-9


def test_embed_requires_nonnegative(m1_system, kakutani_phase_system):
    embed(m1_system, StepFunction.one(2))
    with pytest.raises(ValidationError):
        embed(kakutani_phase_system, StepFunction.one(2))


def test_embedding_isometry_exact(m1_system):
    rng = random.Random(107)
    for _ in range(10):
        f = random_step_function(2, 3, rng)
        g = random_step_function(2, 3, rng)
        lhs = inner_product_depth(embed(m1_system, f), embed(m1_system, g), 4)
        assert lhs.is_exact
        assert lhs == inner_product(f, g, m1_system.measure)


def test_intertwine_entrywise_identity(m1_system):
    # squared form of the embedding identity, checked exactly by hand at 01:
    # f_0(01)^2 mu(C(01)) = 4 * 1/6 = 2/3 = pushforward mass of C(01)
    mu = m1_system.measure
    value = m1_system.funcs[0].evaluate((0, 1)).abs2().as_fraction()
    assert value * mu.mass((0, 1)) == Fraction(2, 3)
    assert mu.pushforward_section(0).mass((0, 1)) == Fraction(2, 3)
    report = intertwine_check(m1_system, 5, trials=6, seed=109)
    assert report.passed, report.failures()


def test_intertwine_random_markov():
    rng = random.Random(113)
    from conftest import random_markov_spec

    for n in (2, 3):
        system = markov_monic_system(random_markov_spec(n, rng))
        report = intertwine_check(system, 4, trials=4, seed=127)
        assert report.passed, report.failures()


def test_commutant_family_constant_passes(m1_spec):
    mu = MarkovMeasure(m1_spec)
    half = StepFunction.constant(2, Fraction(1, 2))
    family = CommutantFamily(
        tuple(
            (measure, half)
            for measure in (mu, mu.pushforward_section(0), mu.pushforward_section(1))
        )
    )
    report = commutant_family_check(family, 3)
    assert report.passed, report.failures()


def test_commutant_family_needs_closure(m1_spec):
    mu = MarkovMeasure(m1_spec)
    family = CommutantFamily(((mu, StepFunction.one(2)),))
    with pytest.raises(ValidationError):
        commutant_family_check(family, 3)


def test_commutant_family_indicator_fails_covariance(m1_spec):
    mu = MarkovMeasure(m1_spec)
    chi0 = StepFunction.indicator(2, (0,))
    family = CommutantFamily(
        tuple(
            (measure, chi0)
            for measure in (mu, mu.pushforward_section(0), mu.pushforward_section(1))
        )
    )
    report = commutant_family_check(family, 3)
    assert not report.passed
    failed = {c.name for c in report.failures()}
    assert "pushforward-covariance" in failed
