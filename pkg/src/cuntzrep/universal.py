"""A finite-depth model of the Hilbert space of square-root densities.

Vectors are formal combinations of terms ``coeff * f * sqrt(d mu)`` with f a
step function and mu a cylinder measure.  No canonical form across different
measures exists at finite depth, so equality is operational: the depth-d
inner product

    <f sqrt(d mu), g sqrt(d nu)>_d
        = sum over length-d words of conj(f) g sqrt(mu(C(w)) nu(C(w)))

is exact whenever the two measures agree on the depth-d cylinders, and in
general is the Hellinger-type approximant whose limit in d is the true inner
product.  The universal isometries act termwise by

    S_i (f sqrt(d mu))  = (f o shift) sqrt(d (mu o prepend_i^{-1}))
    S_i* (f sqrt(d mu)) = (f o prepend_i) sqrt(d ((mu | C(i)) o shift^{-1}))

and every nonnegative monic system embeds isometrically via f -> f sqrt(d mu).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .errors import ResolutionError, ValidationError
from .measures import CylinderMeasure
from .monic import MonicSystem, apply_isometry, random_step_function
from .reports import Report
from .scalars import Scalar
from .stepfuncs import StepFunction
from .words import check_word, format_word, iter_words


@dataclass(frozen=True)
class SigmaTerm:
    coeff: Scalar
    func: StepFunction
    measure: CylinderMeasure

    def __post_init__(self):
        if self.func.n != self.measure.n:
            raise ValidationError("term function and measure alphabets differ")


@dataclass(frozen=True)
class SigmaVector:
    """A formal linear combination of square-root-density terms."""

    terms: tuple[SigmaTerm, ...]

    def __post_init__(self):
        if not self.terms:
            raise ValidationError("a vector needs at least one term (use a zero coefficient)")
        n = self.terms[0].func.n
        if any(t.func.n != n for t in self.terms):
            raise ValidationError("terms live over different alphabets")

    @property
    def n(self) -> int:
        return self.terms[0].func.n

    @classmethod
    def single(cls, func: StepFunction, measure: CylinderMeasure, coeff=None) -> "SigmaVector":
        c = coeff if isinstance(coeff, Scalar) else Scalar.rational(1 if coeff is None else coeff)
        return cls((SigmaTerm(c, func, measure),))

    def max_func_depth(self) -> int:
        return max(t.func.depth for t in self.terms)

    def __add__(self, other: "SigmaVector") -> "SigmaVector":
        if not isinstance(other, SigmaVector):
            return NotImplemented
        return SigmaVector(self.terms + other.terms)

    def __sub__(self, other: "SigmaVector") -> "SigmaVector":
        if not isinstance(other, SigmaVector):
            return NotImplemented
        return self + other.scale(Scalar.rational(-1))

    def scale(self, c) -> "SigmaVector":
        c = c if isinstance(c, Scalar) else Scalar.rational(c)
        return SigmaVector(tuple(SigmaTerm(c * t.coeff, t.func, t.measure) for t in self.terms))


def inner_product_depth(x: SigmaVector, y: SigmaVector, depth: int) -> Scalar:
    """The depth-d Gram value, conjugate-linear in the first argument.

    Exact (a rational-radical scalar) when every contributing pair of terms
    carries measures with identical depth-d masses; floating otherwise.
    """
    if x.n != y.n:
        raise ValidationError("vectors live over different alphabets")
    need = max(x.max_func_depth(), y.max_func_depth())
    if depth < need:
        raise ResolutionError(f"depth {depth} is below a term's function depth {need}")
    n = x.n
    words = list(iter_words(n, depth))
    mass_cache: dict[int, list] = {}

    def masses(measure: CylinderMeasure) -> list:
        key = id(measure)
        if key not in mass_cache:
            mass_cache[key] = [measure.mass(w) for w in words]
        return mass_cache[key]

    exact_acc = Scalar.rational(0)
    float_acc = complex(0)
    mixed = False
    for tx in x.terms:
        mx = masses(tx.measure)
        fx = tx.func.refine(depth)
        for ty in y.terms:
            my = masses(ty.measure)
            fy = ty.func.refine(depth)
            c = tx.coeff.conj() * ty.coeff
            if c.is_zero():
                continue
            same = mx is my or mx == my
            for idx in range(len(words)):
                ma, mb = mx[idx], my[idx]
                if ma == 0 or mb == 0:
                    continue
                v = fx.table[idx].conj() * fy.table[idx]
                if v.is_zero():
                    continue
                if same:
                    contrib = (c * v).scale(ma)
                    if contrib.is_exact:
                        exact_acc = exact_acc + contrib
                    else:
                        mixed = True
                        float_acc += contrib.to_complex()
                else:
                    mixed = True
                    float_acc += (c * v).to_complex() * math.sqrt(float(ma * mb))
    if not mixed:
        return exact_acc
    return Scalar.approx(exact_acc.to_complex() + float_acc)


def norm_sq_depth(x: SigmaVector, depth: int) -> float:
    value = inner_product_depth(x, x, depth).to_complex()
    return value.real


def universal_isometry(letter: int, x: SigmaVector) -> SigmaVector:
    """Termwise: shift-compose the function, section-push the measure."""
    return SigmaVector(
        tuple(
            SigmaTerm(t.coeff, t.func.compose_shift(), t.measure.pushforward_section(letter))
            for t in x.terms
        )
    )


def universal_adjoint(letter: int, x: SigmaVector) -> SigmaVector:
    """Termwise: section-compose the function, restrict-then-shift the measure."""
    return SigmaVector(
        tuple(
            SigmaTerm(t.coeff, t.func.compose_section(letter), t.measure.restrict_then_shift(letter))
            for t in x.terms
        )
    )


def universal_projection(word, x: SigmaVector) -> SigmaVector:
    """Termwise multiplication by the indicator of C(word)."""
    w = check_word(word, x.n)
    chi = StepFunction.indicator(x.n, w)
    return SigmaVector(tuple(SigmaTerm(t.coeff, chi * t.func, t.measure) for t in x.terms))


def embed(system: MonicSystem, f: StepFunction) -> SigmaVector:
    """The isometric embedding f -> f sqrt(d mu) of a nonnegative system."""
    if not system.nonnegative:
        raise ValidationError("the isometric embedding requires a nonnegative monic system")
    if f.n != system.n:
        raise ValidationError("function alphabet does not match the system")
    return SigmaVector.single(f, system.measure)


def intertwine_check(system: MonicSystem, depth: int, trials: int = 8, seed: int = 0,
                     tol: float = 1e-9) -> Report:
    """Verify that the embedding intertwines the system with the universal maps.

    Two clauses per letter: the exact entrywise identity
    ``|f_i(w)|^2 mu(C(w)) = (mu o prepend_i^{-1})(C(w))`` on length-``depth``
    words, and vanishing depth-``depth`` norm of
    ``embed(S_i f) - S_i^univ embed(f)`` for random step functions f.
    """
    report = Report("universal-intertwining")
    if not system.nonnegative:
        raise ValidationError("the isometric embedding requires a nonnegative monic system")
    mu = system.measure
    n = system.n
    for i in range(n):
        push = mu.pushforward_section(i)
        fi = system.funcs[i]
        witness = None
        for w in iter_words(n, depth):
            lhs = fi.evaluate(w).abs2()
            if not lhs.is_rational():
                witness = f"|f_{i}|^2 not rational at C({format_word(w)})"
                break
            if lhs.as_fraction() * mu.mass(w) != push.mass(w):
                witness = f"entrywise identity fails at C({format_word(w)})"
                break
        report.add(f"entrywise[{i}]", witness is None, witness)

    rng = random.Random(seed)
    witness = None
    for t in range(trials):
        f = random_step_function(n, max(depth - 1, 0), rng)
        for i in range(n):
            lhs = embed(system, apply_isometry(system, i, f))
            rhs = universal_isometry(i, embed(system, f))
            gap = norm_sq_depth(lhs - rhs, depth + 1)
            if abs(gap) > tol:
                witness = f"trial {t}, letter {i}: ||W S_i f - S_i W f||^2 = {gap}"
                break
        if witness:
            break
    report.add("random-intertwine", witness is None, witness)
    return report


def projection_covariance_gap(x: SigmaVector, letter: int, word, depth: int) -> float:
    """Norm gap of P(C(letter.word)) x versus S_i P(C(word)) S_i* x at a depth."""
    w = check_word(word, x.n)
    lhs = universal_projection((letter,) + w, x)
    rhs = universal_isometry(letter, universal_projection(w, universal_adjoint(letter, x)))
    return norm_sq_depth(lhs - rhs, depth)


@dataclass(frozen=True)
class CommutantFamily:
    """A family of multipliers F_mu indexed by measures, for the commutant test."""

    pairs: tuple[tuple[CylinderMeasure, StepFunction], ...]

    def __post_init__(self):
        for measure, func in self.pairs:
            if measure.n != func.n:
                raise ValidationError("family function and measure alphabets differ")


def commutant_family_check(family: CommutantFamily, depth: int, tol: float = 1e-9,
                           bound: float = 1e6) -> Report:
    """Check a measure-indexed multiplier family for commutant membership.

    Clauses: a uniform sup-norm bound; compatibility F_mu = F_lambda on the
    mass-carrying cylinders whenever mu is depth-d absolutely continuous with
    respect to lambda within the family; and the pushforward covariance
    ``F_mu(w) = F_{mu o prepend_i^{-1}}(i.w)``.  The family must contain the
    section pushforwards of its measures (matched by depth-d masses); a
    missing one is a precondition violation.
    """
    report = Report("commutant-family")
    pairs = family.pairs
    if not pairs:
        raise ValidationError("empty family")
    n = pairs[0][0].n
    if depth < max(func.depth for _, func in pairs):
        raise ResolutionError("depth is below a family function's depth")

    sup = max(func.max_abs() for _, func in pairs)
    report.add("uniform-bound", sup <= bound, f"sup |F| = {sup}")

    def find(measure: CylinderMeasure) -> StepFunction | None:
        for candidate, func in pairs:
            if candidate is measure:
                return func
            ok = all(
                candidate.mass(w) == measure.mass(w)
                for d in range(depth + 1)
                for w in iter_words(n, d)
            )
            if ok:
                return func
        return None

    # compatibility under absolute continuity within the family
    witness = None
    for mu, f_mu in pairs:
        for lam, f_lam in pairs:
            if mu is lam:
                continue
            dominated = all(
                mu.mass(w) == 0
                for w in iter_words(n, depth)
                if lam.mass(w) == 0
            )
            if not dominated:
                continue
            for w in iter_words(n, depth):
                if mu.mass(w) > 0 and f_mu.evaluate(w) != f_lam.evaluate(w):
                    if abs(f_mu.evaluate(w).to_complex() - f_lam.evaluate(w).to_complex()) > tol:
                        witness = (
                            f"F differs at C({format_word(w)}) for {mu.describe()} << {lam.describe()}"
                        )
                        break
            if witness:
                break
        if witness:
            break
    report.add("compatibility", witness is None, witness)

    # pushforward covariance, on every pair whose pushforward the family holds;
    # a family where no identity is checkable violates the closure precondition
    witness = None
    checkable = 0
    for mu, f_mu in pairs:
        for i in range(n):
            push = mu.pushforward_section(i)
            f_push = find(push)
            if f_push is None:
                continue
            checkable += 1
            for w in iter_words(n, depth):
                if mu.mass(w) == 0:
                    continue
                lhs = f_mu.evaluate(w)
                rhs = f_push.evaluate((i,) + w)
                if abs(lhs.to_complex() - rhs.to_complex()) > tol:
                    witness = f"covariance fails at letter {i}, C({format_word(w)})"
                    break
            if witness:
                break
        if witness:
            break
    if checkable == 0:
        raise ValidationError(
            "family is not closed under the needed pushforwards: no covariance "
            "identity can be formed"
        )
    report.add("pushforward-covariance", witness is None, witness)
    return report
