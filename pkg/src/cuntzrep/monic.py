"""Monic systems and the concrete Cuntz isometries on step functions.

A monic system is a measure together with N functions ``f_i`` whose squared
moduli are the Radon-Nikodym derivatives of the N section pushforwards.  It
induces a representation of the Cuntz relations on L2 of the measure:

    (S_i f)(x)  = f_i(x) * f(shift x)
    (S_i* f)(x) = f(prepend_i x) / f_i(prepend_i x)      (0 where f_i vanishes)

Restricting the f_i to finite depth keeps every operator exactly computable
on step functions: Markov systems have depth-2 functions, Kakutani systems
depth-1.  The word operators S_I S_J* and the projection-valued measure
P(C(I)) = S_I S_I* are compositions of the two primitives.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import NotAbsolutelyContinuousError, ValidationError
from .measures import (
    CylinderMeasure,
    MarkovMeasure,
    MarkovSpec,
    ProductMeasure,
    ProductSpec,
    inner_product,
    integrate,
    rn_derivative,
)
from .reports import Report
from .scalars import SC_ZERO, RadicalSum, Scalar, isclose, sqrt_positive_rational
from .stepfuncs import StepFunction
from .words import CylinderRelation, check_word, cylinder_relation, format_word, iter_words


@dataclass(frozen=True)
class MonicSystem:
    """A measure with its N root-derivative functions (finite depth)."""

    measure: CylinderMeasure
    funcs: tuple[StepFunction, ...]
    nonnegative: bool

    def __post_init__(self):
        if len(self.funcs) != self.measure.n:
            raise ValidationError("need exactly one function per letter")
        for f in self.funcs:
            if f.n != self.measure.n:
                raise ValidationError("function alphabet does not match the measure")

    @property
    def n(self) -> int:
        return self.measure.n

    def is_exact(self) -> bool:
        return all(f.is_exact() for f in self.funcs)


def markov_monic_system(spec: MarkovSpec) -> MonicSystem:
    """The nonnegative monic system of a Markov measure.

    f_j is supported on C(j) with depth-2 values
    ``sqrt(stat[x2] / (stat[j] * T[j][x2]))`` at the word (j, x2).
    """
    n = spec.n
    funcs = []
    for j in range(n):
        table = []
        for x1 in range(n):
            for x2 in range(n):
                if x1 != j:
                    table.append(SC_ZERO)
                else:
                    ratio = spec.stationary[x2] / (spec.stationary[j] * spec.transitions[j][x2])
                    table.append(Scalar.radical(sqrt_positive_rational(ratio)))
        funcs.append(StepFunction(n, 2, tuple(table)))
    return MonicSystem(MarkovMeasure(spec), tuple(funcs), nonnegative=True)


def kakutani_monic_system(z, tol: float = 1e-9) -> MonicSystem:
    """The monic system of a product measure twisted by phases.

    ``z`` is a list of N nonzero scalars with ``sum |z_i|^2 = 1``; the measure
    is the product measure with letter probabilities ``|z_i|^2`` and
    ``f_i = (1/z_i) * indicator(C(i))``.  Exact scalars must have rational
    squared moduli (the measure masses are rationals); floating scalars are
    accepted and produce an approximate system, with the moduli normalized
    exactly so the product spec stays a probability vector.
    """
    zs = [x if isinstance(x, Scalar) else Scalar.approx(x) for x in z]
    n = len(zs)
    if n < 2:
        raise ValidationError("need at least two letters")
    if any(x.is_zero() for x in zs):
        raise ValidationError("all z_i must be nonzero")
    exact = all(x.is_exact for x in zs)
    if exact:
        probs = []
        for x in zs:
            s = x.abs2()
            if not s.is_rational():
                raise ValidationError(
                    "exact Kakutani systems need rational |z_i|^2; pass floats for approximate mode"
                )
            probs.append(s.as_fraction())
        if sum(probs) != 1:
            raise ValidationError(f"sum |z_i|^2 must equal 1 exactly, got {sum(probs)}")
    else:
        moduli = [abs(x.to_complex()) ** 2 for x in zs]
        if abs(sum(moduli) - 1.0) > tol:
            raise ValidationError(f"sum |z_i|^2 must equal 1 within {tol}, got {sum(moduli)}")
        raw = [Fraction(*float(m).as_integer_ratio()) for m in moduli]
        probs = [x / sum(raw) for x in raw]
    measure = ProductMeasure(ProductSpec(tuple(probs)))
    funcs = []
    nonneg = True
    for i, zi in enumerate(zs):
        inv = zi.reciprocal()
        if not inv.is_nonnegative_real():
            nonneg = False
        table = [SC_ZERO] * n
        table[i] = inv
        funcs.append(StepFunction(n, 1, tuple(table)))
    return MonicSystem(measure, tuple(funcs), nonnegative=nonneg)


# ---------------------------------------------------------------------------
# operators


def apply_isometry(system: MonicSystem, letter: int, f: StepFunction) -> StepFunction:
    """S_letter f = f_letter * (f o shift)."""
    return system.funcs[letter] * f.compose_shift()


def apply_adjoint(system: MonicSystem, letter: int, f: StepFunction) -> StepFunction:
    """S_letter* f: value at w is f(letter.w) / f_letter(letter.w).

    Where f_letter vanishes the value is 0 (the reciprocal-root convention),
    which is consistent because such cylinders carry no pushforward mass.
    """
    fi = system.funcs[letter]
    n = system.n
    depth = max(f.depth, fi.depth, 1)
    out_depth = depth - 1
    table = []
    for w in iter_words(n, out_depth):
        lw = (letter,) + w
        v = fi.evaluate(lw)
        if v.is_zero():
            table.append(SC_ZERO)
        else:
            table.append(f.evaluate(lw) * v.reciprocal())
    return StepFunction(n, out_depth, tuple(table))


def apply_word_operator(system: MonicSystem, left, right, f: StepFunction) -> StepFunction:
    """S_I S_J* f for finite words I (isometries) and J (adjoints).

    The adjoint letters act in the order of J (the first letter of J acts
    first), the isometries in reverse order of I, matching the operator
    product S_{i1}..S_{in} S_{jm}*..S_{j1}*.
    """
    left = check_word(left, system.n)
    right = check_word(right, system.n)
    for j in right:
        f = apply_adjoint(system, j, f)
    for i in reversed(left):
        f = apply_isometry(system, i, f)
    return f


def projection(system: MonicSystem, cylinders, x: StepFunction) -> StepFunction:
    """P(A) x = indicator(A) * x for A a disjoint union of cylinders."""
    words = [check_word(w, system.n) for w in cylinders]
    for a in range(len(words)):
        for b in range(a + 1, len(words)):
            if cylinder_relation(words[a], words[b]) is not CylinderRelation.DISJOINT:
                raise ValidationError(
                    f"cylinders C({format_word(words[a])}) and C({format_word(words[b])}) overlap"
                )
    chi = StepFunction.zero(system.n)
    for w in words:
        chi = chi + StepFunction.indicator(system.n, w)
    return chi * x


def vector_measure(system: MonicSystem, x: StepFunction, word) -> Scalar:
    """m_x(C(word)) = integral of |x|^2 over the cylinder (real, nonnegative)."""
    w = check_word(word, system.n)
    restricted = StepFunction.indicator(system.n, w) * x.abs2()
    return integrate(restricted, system.measure)


# ---------------------------------------------------------------------------
# verification


def validate_monic_system(system: MonicSystem, depth: int, tol: float = 1e-9) -> Report:
    """Check the defining identities of a monic system at a given depth.

    (a) |f_i|^2 equals the depth-exact derivative of the section pushforward;
    (b) f_i is nonzero exactly on the mass-carrying part of C(i) and zero off
        C(i);
    (c) the shift pushforward derivative matches the composed sum
        ``sum_j 1 / |f_j(j.w)|^2`` wherever defined.
    """
    report = Report("monic-system")
    exact_mode = system.is_exact()
    n = system.n
    mu = system.measure

    def eq(a: Scalar, b: Scalar) -> bool:
        return a == b if exact_mode else isclose(a, b, tol)

    # (a) squared moduli against the section pushforward derivatives
    for i in range(n):
        try:
            deriv, exact_flag = rn_derivative(mu.pushforward_section(i), mu, depth)
        except (ValidationError, NotAbsolutelyContinuousError) as err:
            report.add(f"rn-product[{i}]", False, str(err))
            continue
        fi2 = system.funcs[i].abs2().refine(depth)
        witness = None
        for w, value in fi2.items():
            if not eq(value, deriv.evaluate(w)):
                witness = f"C({format_word(w)}): |f_{i}|^2 = {value!r} vs derivative {deriv.evaluate(w)!r}"
                break
        if witness is None and not exact_flag:
            witness = "ratio not constant under refinement (derivative not depth-exact)"
        report.add(f"rn-product[{i}]", witness is None, witness)

    # (b) support conditions
    for i in range(n):
        fi = system.funcs[i].refine(max(depth, system.funcs[i].depth))
        witness = None
        for w, value in fi.items():
            on_branch = w[0] == i if w else True
            if on_branch:
                if mu.mass(w) > 0 and value.is_zero():
                    witness = f"f_{i} vanishes on the mass-carrying cylinder C({format_word(w)})"
                    break
            elif not value.is_zero():
                witness = f"f_{i} is nonzero off its branch at C({format_word(w)})"
                break
        report.add(f"support[{i}]", witness is None, witness)

    # (c) shift pushforward derivative via the composed reciprocal sum
    try:
        shift_deriv, _ = rn_derivative(mu.pushforward_shift(), mu, depth)
        witness = None
        for w in iter_words(n, depth):
            if mu.mass(w) == 0:
                continue
            acc = Scalar.rational(0)
            defined = True
            for j in range(n):
                jw = (j,) + w
                v = system.funcs[j].evaluate(jw)
                if v.is_zero():
                    if mu.mass(jw) > 0:
                        defined = False
                    continue
                acc = acc + v.abs2().reciprocal()
            if defined and not eq(acc, shift_deriv.evaluate(w)):
                witness = (
                    f"C({format_word(w)}): sum 1/|f_j(j.w)|^2 = {acc!r} "
                    f"vs shift derivative {shift_deriv.evaluate(w)!r}"
                )
                break
        report.add("shift-derivative", witness is None, witness)
    except (ValidationError, NotAbsolutelyContinuousError) as err:
        report.add("shift-derivative", False, str(err))

    return report


def random_step_function(n: int, max_depth: int, rng: random.Random,
                         complex_values: bool = False) -> StepFunction:
    """A random exact step function with small rational (optionally complex) values."""
    depth = rng.randint(0, max_depth)
    table = []
    for _ in range(n**depth):
        re = RadicalSum.from_fraction(Fraction(rng.randint(-3, 3), rng.randint(1, 4)))
        if complex_values:
            im = RadicalSum.from_fraction(Fraction(rng.randint(-3, 3), rng.randint(1, 4)))
            table.append(Scalar.exact(re, im))
        else:
            table.append(Scalar.exact(re))
    return StepFunction(n, depth, tuple(table))


def cuntz_relations_check(system: MonicSystem, depth: int, trials: int,
                          seed: int = 0, tol: float = 1e-9) -> Report:
    """Exercise the Cuntz relations on random step functions.

    For each trial f: S_i* S_j f must equal delta_ij f, and the range
    projections must sum to the identity.  Those two identities hold formally
    for any nonvanishing f_i with the right supports, so the report carries a
    third clause -- the pairing <S_i f, g> = <f, S_i* g> -- which is what
    fails when the root derivatives are wrong.  Comparisons are exact for
    exact systems and within ``tol`` otherwise.
    """
    report = Report("cuntz-relations")
    rng = random.Random(seed)
    n = system.n
    exact_mode = system.is_exact()

    def same(a: StepFunction, b: StepFunction) -> bool:
        return a == b if exact_mode else a.allclose(b, tol)

    ortho_witness = None
    complete_witness = None
    pairing_witness = None
    for t in range(trials):
        f = random_step_function(n, depth, rng)
        for i in range(n):
            for j in range(n):
                result = apply_adjoint(system, i, apply_isometry(system, j, f))
                expected = f if i == j else StepFunction.zero(n)
                if not same(result, expected):
                    ortho_witness = f"trial {t}: S_{i}* S_{j} f != {'f' if i == j else '0'}"
                    break
            if ortho_witness:
                break
        total = StepFunction.zero(n)
        for i in range(n):
            total = total + apply_isometry(system, i, apply_adjoint(system, i, f))
        if not same(total, f):
            complete_witness = f"trial {t}: sum_i S_i S_i* f != f"
        g = random_step_function(n, depth, rng)
        for i in range(n):
            lhs = inner_product(apply_isometry(system, i, f), g, system.measure)
            rhs = inner_product(f, apply_adjoint(system, i, g), system.measure)
            if not (lhs == rhs if exact_mode else isclose(lhs, rhs, tol)):
                pairing_witness = f"trial {t}: <S_{i} f, g> != <f, S_{i}* g>"
                break
        if ortho_witness or complete_witness or pairing_witness:
            break
    report.add("isometry-orthogonality", ortho_witness is None, ortho_witness)
    report.add("range-completeness", complete_witness is None, complete_witness)
    report.add("adjoint-pairing", pairing_witness is None, pairing_witness)
    return report
