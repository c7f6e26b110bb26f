"""Cylinder measures on the symbol space, exact except where roots force floats.

Three concrete families are implemented, each determined by finitely many
rationals:

* Markov measures: a positive row-stochastic matrix with its stationary
  vector; the mass of C(i1..in) is ``stat[i1] * T[i1,i2] * ... * T[i(n-1),in]``.
* Product (Kakutani) measures: the i.i.d. special case with constant rows.
* Atomic tail measures: purely atomic measures whose atoms are the
  eventually-constant words ``alpha . c^inf`` (alpha not ending in c), with
  normalized product weights.  The atom family is closed under the shift and
  under every prepend map, so the pushforwards stay inside the family.

Measures are closed under three pushforward constructors by lazy wrapping;
``mass`` on a wrapper unwinds the construction, so arbitrary finite
compositions remain exactly computable.  All cylinder masses are exact
rationals; only the Hellinger affinity goes through floating point.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    NotAbsolutelyContinuousError,
    ResolutionError,
    ValidationError,
)
from .reports import Report
from .scalars import Scalar
from .stepfuncs import StepFunction
from .words import check_alphabet, check_word, format_word, iter_words

#: Maximum depth for brute-force affinity enumeration; beyond it a structured
#: recursion must be available for the measure pair.
BRUTE_FORCE_DEPTH = 12


def _fractions(values) -> tuple[Fraction, ...]:
    return tuple(Fraction(v) for v in values)


# ---------------------------------------------------------------------------
# specs


def stationary_vector(transitions) -> tuple[Fraction, ...]:
    """The unique positive stationary probability vector of a positive
    row-stochastic matrix, by exact rational elimination.

    Uniqueness and positivity are guaranteed by Perron-Frobenius for strictly
    positive matrices; the solver still verifies both.
    """
    T = tuple(_fractions(row) for row in transitions)
    n = len(T)
    check_alphabet(n)
    for row in T:
        if len(row) != n:
            raise ValidationError("transition matrix must be square")
        if any(x <= 0 for x in row):
            raise ValidationError("transition matrix entries must be strictly positive")
        if sum(row) != 1:
            raise ValidationError("transition matrix rows must sum to 1")
    # unknown v (column): equations sum_j v_j T[j][i] = v_i for i < n-1,
    # plus normalization sum_j v_j = 1.
    rows = []
    rhs = []
    for i in range(n - 1):
        rows.append([T[j][i] - (1 if i == j else 0) for j in range(n)])
        rhs.append(Fraction(0))
    rows.append([Fraction(1)] * n)
    rhs.append(Fraction(1))
    sol = _solve_exact(rows, rhs)
    if sol is None or any(x <= 0 for x in sol):
        raise ValidationError("failed to find a positive stationary vector")
    # paranoia: verify the full eigenvalue equation, including the skipped row
    for i in range(n):
        if sum(sol[j] * T[j][i] for j in range(n)) != sol[i]:
            raise ValidationError("stationary solve inconsistent")
    return tuple(sol)


def _solve_exact(rows, rhs):
    """Gaussian elimination over the rationals; None if singular."""
    n = len(rows)
    a = [list(row) + [r] for row, r in zip(rows, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return None
        a[col], a[pivot] = a[pivot], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                factor = a[r][col]
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


@dataclass(frozen=True)
class MarkovSpec:
    """A positive row-stochastic matrix with its stationary probability vector."""

    transitions: tuple[tuple[Fraction, ...], ...]
    stationary: tuple[Fraction, ...]

    def __post_init__(self):
        T = tuple(_fractions(row) for row in self.transitions)
        lam = _fractions(self.stationary)
        object.__setattr__(self, "transitions", T)
        object.__setattr__(self, "stationary", lam)
        n = len(T)
        check_alphabet(n)
        for row in T:
            if len(row) != n:
                raise ValidationError("transition matrix must be square")
            if any(x <= 0 for x in row):
                raise ValidationError("transition entries must be strictly positive")
            if sum(row) != 1:
                raise ValidationError("transition rows must sum to 1")
        if len(lam) != n or any(x <= 0 for x in lam) or sum(lam) != 1:
            raise ValidationError("stationary vector must be positive and sum to 1")
        for i in range(n):
            if sum(lam[j] * T[j][i] for j in range(n)) != lam[i]:
                raise ValidationError("vector is not stationary for the matrix")

    @classmethod
    def with_stationary(cls, transitions) -> "MarkovSpec":
        T = tuple(_fractions(row) for row in transitions)
        return cls(T, stationary_vector(T))

    @property
    def n(self) -> int:
        return len(self.transitions)


@dataclass(frozen=True)
class ProductSpec:
    """An i.i.d. letter distribution (the Kakutani case)."""

    probabilities: tuple[Fraction, ...]

    def __post_init__(self):
        p = _fractions(self.probabilities)
        object.__setattr__(self, "probabilities", p)
        check_alphabet(len(p))
        if any(x <= 0 for x in p) or sum(p) != 1:
            raise ValidationError("letter probabilities must be positive and sum to 1")

    @property
    def n(self) -> int:
        return len(self.probabilities)

    def to_markov(self) -> MarkovSpec:
        """The equivalent Markov spec: constant rows, stationary = p."""
        p = self.probabilities
        return MarkovSpec(tuple(p for _ in p), p)


@dataclass(frozen=True)
class AtomicTailSpec:
    """Weights for the atomic measure on tail points with a fixed tail letter.

    The atom at ``alpha . c^inf`` (alpha canonical) carries mass
    ``normalizer * prod_j q[alpha_j]``; the normalizer is the closed form
    ``(1 - s) / (1 - q_c)`` with ``s = sum(q)``, which makes the total mass 1.
    """

    n: int
    tail_letter: int
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        check_alphabet(self.n)
        q = _fractions(self.weights)
        object.__setattr__(self, "weights", q)
        if len(q) != self.n:
            raise ValidationError("need one weight per letter")
        if not 0 <= self.tail_letter < self.n:
            raise ValidationError("tail letter outside alphabet")
        if any(x <= 0 for x in q):
            raise ValidationError("weights must be positive")
        if sum(q) >= 1:
            raise ValidationError("weights must sum to less than 1")

    @property
    def total_weight(self) -> Fraction:
        return sum(self.weights)

    @property
    def normalizer(self) -> Fraction:
        s = self.total_weight
        return (1 - s) / (1 - self.weights[self.tail_letter])

    @property
    def branch_sum(self) -> Fraction:
        """Sum of prod(q) over nonempty words not ending in the tail letter."""
        s = self.total_weight
        geom = 1 / (1 - s)
        return (geom - 1) - self.weights[self.tail_letter] * geom

    def word_weight(self, word) -> Fraction:
        m = Fraction(1)
        for x in word:
            m *= self.weights[x]
        return m


# ---------------------------------------------------------------------------
# measures


class CylinderMeasure:
    """Base class: a finite Borel measure described by its cylinder masses."""

    n: int

    def __init__(self, n: int):
        self.n = check_alphabet(n)
        self._cache: dict[tuple, Fraction] = {}

    def mass(self, word) -> Fraction:
        w = check_word(word, self.n)
        hit = self._cache.get(w)
        if hit is None:
            hit = self._mass(w)
            self._cache[w] = hit
        return hit

    def _mass(self, word) -> Fraction:  # pragma: no cover - abstract
        raise NotImplementedError

    def total(self) -> Fraction:
        return self.mass(())

    # pushforward constructors (lazy wrappers)

    def pushforward_section(self, letter: int) -> "SectionPushforward":
        """The image measure under the prepend-``letter`` map."""
        return SectionPushforward(self, letter)

    def pushforward_shift(self) -> "ShiftPushforward":
        """The image measure under the left shift."""
        return ShiftPushforward(self)

    def restrict_then_shift(self, letter: int) -> "RestrictShift":
        """Restrict to the cylinder C(letter), then push forward by the shift."""
        return RestrictShift(self, letter)

    def describe(self) -> str:
        return type(self).__name__


class MarkovMeasure(CylinderMeasure):
    def __init__(self, spec: MarkovSpec):
        super().__init__(spec.n)
        self.spec = spec

    def _mass(self, word) -> Fraction:
        if not word:
            return Fraction(1)
        m = self.spec.stationary[word[0]]
        for a, b in zip(word, word[1:]):
            m *= self.spec.transitions[a][b]
        return m

    def describe(self) -> str:
        return f"Markov(n={self.n})"


class ProductMeasure(CylinderMeasure):
    def __init__(self, spec: ProductSpec):
        super().__init__(spec.n)
        self.spec = spec

    def _mass(self, word) -> Fraction:
        m = Fraction(1)
        for x in word:
            m *= self.spec.probabilities[x]
        return m

    def describe(self) -> str:
        return f"Product(n={self.n})"


class AtomicTailMeasure(CylinderMeasure):
    """The purely atomic measure with atoms ``alpha . c^inf``.

    The mass of C(w) has a closed form: write ``w = u . c^t`` with u not
    ending in c; then mass = normalizer * prod(q over u) * (1 + q_c^t * B)
    where B is the branch sum.  (The 1 accounts for the single atom whose
    canonical prefix is u itself; the branch term for all atoms extending w.)
    """

    def __init__(self, spec: AtomicTailSpec):
        super().__init__(spec.n)
        self.spec = spec

    def _mass(self, word) -> Fraction:
        c = self.spec.tail_letter
        t = 0
        u = tuple(word)
        while u and u[-1] == c:
            u = u[:-1]
            t += 1
        qc = self.spec.weights[c]
        return self.spec.normalizer * self.spec.word_weight(u) * (1 + qc**t * self.spec.branch_sum)

    def describe(self) -> str:
        return f"AtomicTail(n={self.n}, c={self.spec.tail_letter})"


class TableMeasure(CylinderMeasure):
    """An explicit finite table of cylinder masses (testing and negative controls).

    The table is taken as given -- no consistency is enforced, so corrupted
    tables can exercise the consistency checker.
    """

    def __init__(self, n: int, masses: dict):
        super().__init__(n)
        self.masses = {check_word(w, n): Fraction(v) for w, v in masses.items()}
        self.depth = max((len(w) for w in self.masses), default=0)

    def _mass(self, word) -> Fraction:
        w = tuple(word)
        if w not in self.masses:
            raise ResolutionError(f"table measure has no entry for cylinder C({format_word(w)!r})")
        return self.masses[w]


class SectionPushforward(CylinderMeasure):
    """mu o (prepend letter)^{-1}: supported on C(letter)."""

    def __init__(self, base: CylinderMeasure, letter: int):
        super().__init__(base.n)
        if not 0 <= letter < base.n:
            raise ValidationError("letter outside alphabet")
        self.base = base
        self.letter = letter

    def _mass(self, word) -> Fraction:
        if not word:
            return self.base.total()
        if word[0] != self.letter:
            return Fraction(0)
        return self.base.mass(word[1:])

    def describe(self) -> str:
        return f"{self.base.describe()} o section_{self.letter}^-1"


class ShiftPushforward(CylinderMeasure):
    """mu o shift^{-1}: mass of C(I) is the sum of the masses of C(jI)."""

    def __init__(self, base: CylinderMeasure):
        super().__init__(base.n)
        self.base = base

    def _mass(self, word) -> Fraction:
        return sum((self.base.mass((j,) + tuple(word)) for j in range(self.n)), Fraction(0))

    def describe(self) -> str:
        return f"{self.base.describe()} o shift^-1"


class RestrictShift(CylinderMeasure):
    """(mu restricted to C(letter)) o shift^{-1}: mass of C(I) is mu(C(letter I))."""

    def __init__(self, base: CylinderMeasure, letter: int):
        super().__init__(base.n)
        if not 0 <= letter < base.n:
            raise ValidationError("letter outside alphabet")
        self.base = base
        self.letter = letter

    def _mass(self, word) -> Fraction:
        return self.base.mass((self.letter,) + tuple(word))

    def describe(self) -> str:
        return f"{self.base.describe()}|C({self.letter}) o shift^-1"


def markov_measure(transitions, stationary=None) -> MarkovMeasure:
    if stationary is None:
        return MarkovMeasure(MarkovSpec.with_stationary(transitions))
    return MarkovMeasure(MarkovSpec(tuple(map(tuple, transitions)), tuple(stationary)))


def product_measure(probabilities) -> ProductMeasure:
    return ProductMeasure(ProductSpec(tuple(probabilities)))


def atomic_tail_measure(n: int, tail_letter: int, weights) -> AtomicTailMeasure:
    return AtomicTailMeasure(AtomicTailSpec(n, tail_letter, tuple(weights)))


def masses_equal(a: CylinderMeasure, b: CylinderMeasure, depth: int) -> bool:
    """Operational equality: identical masses on every cylinder up to depth."""
    if a.n != b.n:
        return False
    for d in range(depth + 1):
        for w in iter_words(a.n, d):
            if a.mass(w) != b.mass(w):
                return False
    return True


# ---------------------------------------------------------------------------
# derived quantities


def rn_derivative(nu: CylinderMeasure, mu: CylinderMeasure, depth: int) -> tuple[StepFunction, bool]:
    """Depth-``depth`` Radon-Nikodym candidate of nu with respect to mu.

    Returns the step function of mass ratios on length-``depth`` cylinders
    (zero where both measures vanish) and an exactness flag: True iff the
    ratio is constant across all one-letter refinements, i.e. the candidate
    is already the true derivative at this resolution.

    Raises :class:`NotAbsolutelyContinuousError` when nu charges a
    depth-``depth`` cylinder that mu does not, naming the witness.
    """
    if nu.n != mu.n:
        raise ValidationError("measures live over different alphabets")
    n = nu.n
    table = []
    ratios = []
    for w in iter_words(n, depth):
        m = mu.mass(w)
        v = nu.mass(w)
        if m == 0:
            if v != 0:
                raise NotAbsolutelyContinuousError(format_word(w))
            ratio = Fraction(0)
        else:
            ratio = v / m
        ratios.append((w, m, ratio))
        table.append(Scalar.rational(ratio))
    exact = True
    for w, m, ratio in ratios:
        for j in range(n):
            child = w + (j,)
            mc = mu.mass(child)
            vc = nu.mass(child)
            if mc == 0:
                if vc != 0:
                    exact = False
            elif vc != ratio * mc:
                exact = False
        if not exact:
            break
    return StepFunction(n, depth, tuple(table)), exact


def integrate(f: StepFunction, mu: CylinderMeasure) -> Scalar:
    """Exact integral of a step function: sum of values times cylinder masses."""
    if f.n != mu.n:
        raise ValidationError("function and measure live over different alphabets")
    total = Scalar.rational(0)
    for w, value in f.items():
        if not value.is_zero():
            m = mu.mass(w)
            if m != 0:
                total = total + value.scale(m)
    return total


def inner_product(f: StepFunction, g: StepFunction, mu: CylinderMeasure) -> Scalar:
    """L2(mu) inner product, conjugating the first argument."""
    return integrate(f.conj() * g, mu)


def norm_sq(f: StepFunction, mu: CylinderMeasure) -> Scalar:
    return integrate(f.abs2(), mu)


def consistency_check(mu: CylinderMeasure, depth: int) -> Report:
    """Verify mass(C(I)) = sum_j mass(C(Ij)) exactly for all |I| < depth."""
    report = Report("kolmogorov-consistency")
    witness = None
    for d in range(depth):
        for w in iter_words(mu.n, d):
            parent = mu.mass(w)
            children = sum((mu.mass(w + (j,)) for j in range(mu.n)), Fraction(0))
            if parent != children:
                witness = f"C({format_word(w)}): {parent} != sum of children {children}"
                break
        if witness:
            break
    report.add("additivity", witness is None, witness)
    return report


# ---------------------------------------------------------------------------
# Hellinger affinity


def _markov_like(mu: CylinderMeasure) -> MarkovSpec | None:
    if isinstance(mu, MarkovMeasure):
        return mu.spec
    if isinstance(mu, ProductMeasure):
        return mu.spec.to_markov()
    return None


def _atomic_like(mu: CylinderMeasure) -> AtomicTailSpec | None:
    return mu.spec if isinstance(mu, AtomicTailMeasure) else None


def affinity(mu: CylinderMeasure, nu: CylinderMeasure, depth: int, method: str = "auto",
             jobs: int = 1) -> float:
    """Depth-d Hellinger affinity: sum over length-d words of sqrt(mu * nu).

    The value is 1 at depth 0 for probability measures, nonincreasing in the
    depth, and decays to 0 exactly when the measures are mutually singular
    (for the families implemented here).  Brute-force enumeration covers
    depths up to ``BRUTE_FORCE_DEPTH``; beyond that, structured recursions
    are used for Markov/product pairs and for Markov-vs-atomic pairs.
    """
    if mu.n != nu.n:
        raise ValidationError("measures live over different alphabets")
    if depth < 0:
        raise ValidationError("depth must be >= 0")
    if method == "auto":
        method = "enumerate" if depth <= BRUTE_FORCE_DEPTH else "recursion"
    if method == "enumerate":
        if depth > BRUTE_FORCE_DEPTH:
            raise ValidationError(
                f"brute-force affinity is limited to depth {BRUTE_FORCE_DEPTH}"
            )
        return _affinity_enumerate(mu, nu, depth, jobs)
    if method == "recursion":
        a, b = _markov_like(mu), _markov_like(nu)
        if a is not None and b is not None:
            return _affinity_markov_profile(a, b, depth)[depth]
        atom = _atomic_like(mu) or _atomic_like(nu)
        mk = a if a is not None else b
        if atom is not None and mk is not None:
            return _affinity_markov_atomic(mk, atom, depth)
        raise ValidationError(
            "no affinity recursion available for this measure pair; "
            f"use depth <= {BRUTE_FORCE_DEPTH}"
        )
    raise ValidationError(f"unknown affinity method {method!r}")


def _affinity_enumerate(mu, nu, depth, jobs=1):
    words = list(iter_words(mu.n, depth))
    if jobs and jobs > 1:
        return _affinity_enumerate_parallel(mu, nu, depth, jobs)
    return math.fsum(math.sqrt(float(mu.mass(w) * nu.mass(w))) for w in words)


def _affinity_chunk(args):
    mu, nu, prefix, depth = args
    return math.fsum(
        math.sqrt(float(mu.mass(prefix + w) * nu.mass(prefix + w)))
        for w in iter_words(mu.n, depth - len(prefix))
    )


def _affinity_enumerate_parallel(mu, nu, depth, jobs):
    import concurrent.futures

    prefixes = [(j,) for j in range(mu.n)] if depth >= 1 else [()]
    tasks = [(mu, nu, p, depth) for p in prefixes]
    try:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            return math.fsum(pool.map(_affinity_chunk, tasks))
    except (OSError, ValueError):  # pragma: no cover - environment dependent
        return math.fsum(_affinity_chunk(t) for t in tasks)


def _affinity_markov_profile(a: MarkovSpec, b: MarkovSpec, max_depth: int) -> list[float]:
    """Affinities at depths 0..max_depth via the transfer-matrix recursion.

    The depth-d sum factors over transitions: with A[i][j] =
    sqrt(T[i][j] * T'[i][j]) and v[i] = sqrt(stat[i] * stat'[i]), the
    affinity at depth d >= 1 equals sum(v @ A^(d-1)).
    """
    if a.n != b.n:
        raise ValidationError("specs have different alphabet sizes")
    n = a.n
    A = [
        [math.sqrt(float(a.transitions[i][j] * b.transitions[i][j])) for j in range(n)]
        for i in range(n)
    ]
    v = [math.sqrt(float(a.stationary[i] * b.stationary[i])) for i in range(n)]
    out = [1.0]
    cur = v
    for _ in range(max_depth):
        out.append(math.fsum(cur))
        cur = [math.fsum(cur[i] * A[i][j] for i in range(n)) for j in range(n)]
    return out[: max_depth + 1]


def _affinity_markov_atomic(mk: MarkovSpec, atom: AtomicTailSpec, depth: int) -> float:
    """Affinity of a Markov measure against an atomic tail measure.

    Group length-d words as ``u . c^t`` with u not ending in c.  The atomic
    mass of such a cylinder is ``kappa * W(u) * (1 + q_c^t * B)`` and the
    Markov mass factors through the last letter of u, so a vector recursion
    over (length, last letter) covers all groups in O(d^2 * n) work.
    """
    if mk.n != atom.n:
        raise ValidationError("specs have different alphabet sizes")
    n = mk.n
    c = atom.tail_letter
    kappa = float(atom.normalizer)
    B = float(atom.branch_sum)
    qc = float(atom.weights[c])
    T = [[float(x) for x in row] for row in mk.transitions]
    lam = [float(x) for x in mk.stationary]
    q = [float(x) for x in atom.weights]
    if depth == 0:
        # both are probability measures: sqrt(1 * 1)
        return math.sqrt(kappa * (1 + B))
    # g[m][l]: sum over words u of length m ending in letter l of
    # sqrt(W(u) * markov_mass(C(u)))
    g = [math.sqrt(q[l] * lam[l]) for l in range(n)]
    layers = [None, list(g)]
    for _ in range(2, depth + 1):
        g = [math.sqrt(q[k]) * math.fsum(g[l] * math.sqrt(T[l][k]) for l in range(n)) for k in range(n)]
        layers.append(list(g))
    total = 0.0
    for t in range(depth):
        m = depth - t
        weight = math.sqrt(kappa * (1 + qc**t * B))
        layer = layers[m]
        for l in range(n):
            if l == c:
                continue
            if t == 0:
                run = 1.0
            else:
                run = math.sqrt(T[l][c] * T[c][c] ** (t - 1))
            total += layer[l] * weight * run
    # the all-tail word u = empty, t = depth
    mk_run = lam[c] * T[c][c] ** (depth - 1)
    total += math.sqrt(mk_run * kappa * (1 + qc**depth * B))
    return total


def affinity_sequence(mu, nu, max_depth: int, method: str = "auto", jobs: int = 1) -> list[float]:
    """Affinities at depths 0..max_depth (uses the per-depth dispatch)."""
    a, b = _markov_like(mu), _markov_like(nu)
    if method in ("auto", "recursion") and a is not None and b is not None:
        return _affinity_markov_profile(a, b, max_depth)
    return [affinity(mu, nu, d, method=method, jobs=jobs) for d in range(max_depth + 1)]


def affinity_below(mu, nu, threshold: float, max_depth: int) -> int | None:
    """Smallest depth <= max_depth at which the affinity drops below threshold."""
    profile = affinity_sequence(mu, nu, max_depth)
    for d, value in enumerate(profile):
        if value < threshold:
            return d
    return None


def markov_affinity_crossing(spec_a: MarkovSpec, spec_b: MarkovSpec, threshold: float,
                             cap: int = 10**6) -> int | None:
    """First depth at which the Markov-pair affinity drops below threshold.

    Runs the transfer recursion incrementally; for distinct transition
    matrices the decay is geometric (the transfer matrix has spectral radius
    strictly below 1), so the crossing exists, but its depth can be large
    when the matrices are close -- hence the adaptive loop with a hard cap
    instead of a fixed horizon.
    """
    n = spec_a.n
    A = [
        [math.sqrt(float(spec_a.transitions[i][j] * spec_b.transitions[i][j])) for j in range(n)]
        for i in range(n)
    ]
    cur = [math.sqrt(float(spec_a.stationary[i] * spec_b.stationary[i])) for i in range(n)]
    if 1.0 < threshold:
        return 0
    for d in range(1, cap + 1):
        value = math.fsum(cur)
        if value < threshold:
            return d
        cur = [math.fsum(cur[i] * A[i][j] for i in range(n)) for j in range(n)]
    return None
