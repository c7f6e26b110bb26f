"""JSON round trips for every serialized value."""

import json
from fractions import Fraction

import pytest

from cuntzrep.errors import ValidationError
from cuntzrep.jsonio import (
    format_fraction,
    format_measure_spec,
    format_monic_system,
    format_radical,
    format_scalar,
    format_sigma_vector,
    format_step_function,
    format_tail_point,
    parse_fraction,
    parse_measure,
    parse_measure_spec,
    parse_monic_system,
    parse_radical,
    parse_scalar,
    parse_sigma_vector,
    parse_step_function,
    parse_tail_point,
)
from cuntzrep.measures import AtomicTailSpec, MarkovMeasure, MarkovSpec, ProductSpec
from cuntzrep.monic import markov_monic_system
from cuntzrep.scalars import RS_ZERO, Scalar, sqrt_positive_rational
from cuntzrep.stepfuncs import StepFunction
from cuntzrep.universal import SigmaVector
from cuntzrep.words import TailPoint


def test_fraction_roundtrip():
    assert format_fraction(Fraction(1, 8)) == "1/8"
    assert format_fraction(Fraction(3)) == "3"
    assert parse_fraction("1/8") == Fraction(1, 8)
    assert parse_fraction(-2) == Fraction(-2)
    with pytest.raises(ValidationError):
        parse_fraction("1/0")
    with pytest.raises(ValidationError):
        parse_fraction("abc")


def test_radical_roundtrip():
    rs = sqrt_positive_rational(Fraction(1, 2)) + RS_ZERO.from_fraction(Fraction(2, 3))
    data = format_radical(rs)
    assert data == [["2/3", 1], ["1/2", 2]]
    assert parse_radical(data) == rs


def test_scalar_spellings():
    rational = Scalar.rational(Fraction(5, 7))
    assert format_scalar(rational) == "5/7"
    assert parse_scalar("5/7") == rational

    exact = Scalar.exact(sqrt_positive_rational(2), RS_ZERO.from_fraction(1))
    data = format_scalar(exact)
    assert parse_scalar(data) == exact

    approx = Scalar.approx(0.25 + 0.5j)
    data = format_scalar(approx)
    parsed = parse_scalar(data)
    assert not parsed.is_exact
    assert parsed.to_complex() == approx.to_complex()


def test_step_function_roundtrip():
    f = StepFunction.from_map(
        2, 2, {(0, 1): Scalar.rational(2), (1, 1): Scalar.radical(sqrt_positive_rational(3))}
    )
    blob = json.dumps(format_step_function(f))
    assert parse_step_function(json.loads(blob)) == f


def test_measure_roundtrips(m1_spec, a1_spec):
    for spec in (m1_spec, ProductSpec((Fraction(1, 3), Fraction(2, 3))), a1_spec):
        data = json.loads(json.dumps(format_measure_spec(spec)))
        assert parse_measure_spec(data) == spec


def test_markov_lambda_auto(m1_spec):
    data = {"type": "markov", "N": 2, "T": [["1/2", "1/2"], ["1/4", "3/4"]], "lambda": "auto"}
    assert parse_measure_spec(data) == m1_spec
    mu = parse_measure(data)
    assert isinstance(mu, MarkovMeasure)
    assert mu.mass((0, 1, 1)) == Fraction(1, 8)


def test_measure_spec_errors():
    with pytest.raises(ValidationError):
        parse_measure_spec({"no": "type"})
    with pytest.raises(ValidationError):
        parse_measure_spec({"type": "mystery"})


def test_monic_system_derivations(m1_spec):
    derived = parse_monic_system(
        {"derive": "markov", "measure": {"type": "markov", "N": 2,
                                         "T": [["1/2", "1/2"], ["1/4", "3/4"]],
                                         "lambda": "auto"}}
    )
    assert derived.funcs == markov_monic_system(m1_spec).funcs

    kakutani = parse_monic_system(
        {"derive": "kakutani",
         "z": [{"re": [["1/2", 2]], "im": []}, {"re": [], "im": [["1/2", 2]]}]}
    )
    assert not kakutani.nonnegative
    assert kakutani.measure.mass((0,)) == Fraction(1, 2)


def test_monic_system_explicit_roundtrip(m1_system):
    blob = json.loads(json.dumps(format_monic_system(m1_system)))
    parsed = parse_monic_system(blob)
    assert parsed.funcs == m1_system.funcs
    assert parsed.nonnegative


def test_sigma_vector_roundtrip(m1_spec):
    x = SigmaVector.single(StepFunction.indicator(2, (0,)), MarkovMeasure(m1_spec))
    blob = json.loads(json.dumps(format_sigma_vector(x)))
    parsed = parse_sigma_vector(blob)
    assert parsed.terms[0].func == x.terms[0].func
    assert parsed.terms[0].measure.mass((0, 1)) == x.terms[0].measure.mass((0, 1))


def test_tail_point_roundtrip():
    p = TailPoint((0, 1), 0)
    data = format_tail_point(p)
    assert data == {"prefix": "01", "tail": 0}
    assert parse_tail_point(data, 2) == p
