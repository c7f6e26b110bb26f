"""JSON encoding of the domain values.

Rationals travel as strings "p/q" so round trips never drift; radical sums
as arrays of [coefficient, radicand] pairs; words as digit strings with the
alphabet size carried alongside.  Scalars have three spellings: a bare
"p/q" string for exact rational reals, {"re": pairs, "im": pairs} for exact
values, and {"re": float, "im": float} for approximate ones.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ValidationError
from .measures import (
    AtomicTailMeasure,
    AtomicTailSpec,
    CylinderMeasure,
    MarkovMeasure,
    MarkovSpec,
    ProductMeasure,
    ProductSpec,
    stationary_vector,
)
from .monic import MonicSystem, kakutani_monic_system, markov_monic_system
from .scalars import RadicalSum, Scalar
from .stepfuncs import StepFunction
from .universal import SigmaTerm, SigmaVector
from .words import TailPoint, format_word, iter_words, parse_word


# -- rationals ---------------------------------------------------------------


def format_fraction(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_fraction(text) -> Fraction:
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, str):
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as err:
            raise ValidationError(f"cannot parse rational {text!r}: {err}") from None
    raise ValidationError(f"expected a rational string, got {text!r}")


# -- radical sums and scalars --------------------------------------------------


def format_radical(rs: RadicalSum) -> list:
    return [[format_fraction(c), r] for r, c in sorted(rs.terms.items())]


def parse_radical(data) -> RadicalSum:
    if not isinstance(data, list):
        raise ValidationError(f"expected [coefficient, radicand] pairs, got {data!r}")
    terms = {}
    for item in data:
        if not isinstance(item, list) or len(item) != 2:
            raise ValidationError(f"bad radical term {item!r}")
        coeff, rad = item
        terms[int(rad)] = terms.get(int(rad), Fraction(0)) + parse_fraction(coeff)
    return RadicalSum(terms)


def format_scalar(s: Scalar):
    if s.is_rational():
        return format_fraction(s.as_fraction())
    if s.is_exact:
        return {"re": format_radical(s.re), "im": format_radical(s.im)}
    z = s.to_complex()
    return {"re": z.real, "im": z.imag}


def parse_scalar(data) -> Scalar:
    if isinstance(data, (str, int)):
        return Scalar.rational(parse_fraction(data))
    if isinstance(data, float):
        return Scalar.approx(data)
    if isinstance(data, dict) and "re" in data and "im" in data:
        if isinstance(data["re"], list):
            return Scalar.exact(parse_radical(data["re"]), parse_radical(data["im"]))
        return Scalar.approx(complex(float(data["re"]), float(data["im"])))
    raise ValidationError(f"cannot parse scalar {data!r}")


# -- step functions -------------------------------------------------------------


def format_step_function(f: StepFunction) -> dict:
    values = {format_word(w): format_scalar(v) for w, v in f.items() if not v.is_zero()}
    return {"N": f.n, "depth": f.depth, "values": values}


def parse_step_function(data) -> StepFunction:
    if not isinstance(data, dict) or "depth" not in data or "N" not in data:
        raise ValidationError("step function JSON needs 'N', 'depth' and 'values'")
    n = int(data["N"])
    depth = int(data["depth"])
    mapping = {
        parse_word(word, n): parse_scalar(value)
        for word, value in (data.get("values") or {}).items()
    }
    return StepFunction.from_map(n, depth, mapping)


# -- measures --------------------------------------------------------------------


def format_measure_spec(measure) -> dict:
    if isinstance(measure, MarkovMeasure):
        measure = measure.spec
    if isinstance(measure, ProductMeasure):
        measure = measure.spec
    if isinstance(measure, AtomicTailMeasure):
        measure = measure.spec
    if isinstance(measure, MarkovSpec):
        return {
            "type": "markov",
            "N": measure.n,
            "T": [[format_fraction(x) for x in row] for row in measure.transitions],
            "lambda": [format_fraction(x) for x in measure.stationary],
        }
    if isinstance(measure, ProductSpec):
        return {"type": "product", "p": [format_fraction(x) for x in measure.probabilities]}
    if isinstance(measure, AtomicTailSpec):
        return {
            "type": "atomic_tail",
            "N": measure.n,
            "c": measure.tail_letter,
            "q": [format_fraction(x) for x in measure.weights],
        }
    raise ValidationError(f"cannot serialize measure {measure!r} (pushforward wrappers stay in memory)")


def parse_measure_spec(data):
    """Parse a measure spec dict into a spec object (markov / product / atomic_tail)."""
    if not isinstance(data, dict) or "type" not in data:
        raise ValidationError("measure JSON needs a 'type' field")
    kind = data["type"]
    if kind == "markov":
        T = [[parse_fraction(x) for x in row] for row in data["T"]]
        lam = data.get("lambda", "auto")
        if lam == "auto":
            return MarkovSpec(tuple(map(tuple, T)), stationary_vector(T))
        return MarkovSpec(tuple(map(tuple, T)), tuple(parse_fraction(x) for x in lam))
    if kind == "product":
        return ProductSpec(tuple(parse_fraction(x) for x in data["p"]))
    if kind == "atomic_tail":
        q = tuple(parse_fraction(x) for x in data["q"])
        n = int(data.get("N", len(q)))
        return AtomicTailSpec(n, int(data["c"]), q)
    raise ValidationError(f"unknown measure type {kind!r}")


def measure_from_spec(spec) -> CylinderMeasure:
    if isinstance(spec, MarkovSpec):
        return MarkovMeasure(spec)
    if isinstance(spec, ProductSpec):
        return ProductMeasure(spec)
    if isinstance(spec, AtomicTailSpec):
        return AtomicTailMeasure(spec)
    raise ValidationError(f"unknown measure spec {spec!r}")


def parse_measure(data) -> CylinderMeasure:
    return measure_from_spec(parse_measure_spec(data))


# -- monic systems ------------------------------------------------------------------


def parse_monic_system(data) -> MonicSystem:
    if not isinstance(data, dict):
        raise ValidationError("monic system JSON must be an object")
    derive = data.get("derive")
    if derive == "markov":
        spec = parse_measure_spec(data["measure"])
        if isinstance(spec, ProductSpec):
            spec = spec.to_markov()
        if not isinstance(spec, MarkovSpec):
            raise ValidationError("derive=markov needs a markov or product measure")
        return markov_monic_system(spec)
    if derive == "kakutani":
        z = [parse_scalar(x) for x in data["z"]]
        return kakutani_monic_system(z)
    if derive is not None:
        raise ValidationError(f"unknown derivation {derive!r}")
    measure = parse_measure(data["measure"])
    funcs = tuple(parse_step_function(f) for f in data["f"])
    nonneg = data.get("nonnegative")
    if nonneg is None:
        nonneg = all(v.is_nonnegative_real() for f in funcs for v in f.table)
    return MonicSystem(measure, funcs, bool(nonneg))


def format_monic_system(system: MonicSystem) -> dict:
    return {
        "measure": format_measure_spec(system.measure),
        "f": [format_step_function(f) for f in system.funcs],
        "nonnegative": system.nonnegative,
    }


# -- universal vectors ----------------------------------------------------------------


def format_sigma_vector(x: SigmaVector) -> dict:
    return {
        "terms": [
            {
                "coeff": format_scalar(t.coeff),
                "f": format_step_function(t.func),
                "measure": format_measure_spec(t.measure),
            }
            for t in x.terms
        ]
    }


def parse_sigma_vector(data) -> SigmaVector:
    terms = data["terms"] if isinstance(data, dict) else data
    parsed = tuple(
        SigmaTerm(parse_scalar(t.get("coeff", "1")), parse_step_function(t["f"]),
                  parse_measure(t["measure"]))
        for t in terms
    )
    return SigmaVector(parsed)


# -- tail points ------------------------------------------------------------------------


def format_tail_point(p: TailPoint) -> dict:
    return {"prefix": format_word(p.prefix), "tail": p.tail}


def parse_tail_point(data, n: int) -> TailPoint:
    return TailPoint(parse_word(data["prefix"], n), int(data["tail"]))
