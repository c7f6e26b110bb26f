"""Irreducibility, disjointness, equivalence, and commutant computations.

For Markov systems the boundary restriction of the adjoint operators to the
span of first-coordinate functions gives N small matrices; fixed points of
``X -> sum_i V_i' X V_i*`` decide irreducibility (same system twice) and
disjointness (two systems).  Two independent computations must agree:

* a dense floating solve on the full matrix space, and
* the structural reduction: solutions are diagonal, with diagonal fixed by
  the entrywise square-root Gram matrix ``A[i][j] = sqrt(T[i][j]*T'[i][j])``.

Disjointness itself is decided by the exact criterion (the transition
matrices differ); the floating solvers and the affinity decay only
cross-check it.  Equivalence of systems is certified by a finite-depth
multiplier; a failed bounded search is reported as inconclusive, never as a
proof of inequivalence.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    CertificateError,
    MethodDisagreementError,
    NotAbsolutelyContinuousError,
    ValidationError,
)
from .measures import (
    MarkovMeasure,
    MarkovSpec,
    ProductMeasure,
    ProductSpec,
    affinity_below,
    markov_affinity_crossing,
    rn_derivative,
)
from .monic import MonicSystem
from .reports import Report
from .scalars import RS_ZERO, RadicalSum, Scalar, sqrt_positive_rational
from .stepfuncs import StepFunction
from .words import format_word, index_of, iter_words

RANK_TOL = 1e-9
AGREE_TOL = 1e-8
AFFINITY_THRESHOLD = 0.01
AFFINITY_MAX_DEPTH = 200


def _as_markov_spec(spec) -> MarkovSpec:
    if isinstance(spec, MarkovSpec):
        return spec
    if isinstance(spec, ProductSpec):
        return spec.to_markov()
    if isinstance(spec, MarkovMeasure):
        return spec.spec
    if isinstance(spec, ProductMeasure):
        return spec.spec.to_markov()
    raise ValidationError(f"expected a Markov or product spec, got {type(spec).__name__}")


# ---------------------------------------------------------------------------
# boundary operators


@dataclass(frozen=True)
class BoundaryOperators:
    """The N adjoint restrictions in the orthonormal first-coordinate basis.

    ``matrices[i]`` is the matrix of V_i* -- exactly one nonzero column (the
    i-th), holding the square roots of the i-th transition row.
    """

    n: int
    matrices: tuple  # N matrices, each an N x N tuple-of-tuples of RadicalSum

    def completeness_defect(self) -> RadicalSum | None:
        """Exact check of sum_i V_i V_i* = identity; None when it holds,
        otherwise the first offending entry difference."""
        n = self.n
        for a in range(n):
            for b in range(n):
                acc = RS_ZERO
                for i in range(n):
                    for k in range(n):
                        # (V_i)_{a,k} = (V_i*)_{k,a}
                        acc = acc + self.matrices[i][k][a] * self.matrices[i][k][b]
                expected = RadicalSum.from_fraction(1 if a == b else 0)
                if acc != expected:
                    return acc - expected
        return None

    def as_float(self) -> list[np.ndarray]:
        return [
            np.array([[x.to_float() for x in row] for row in m], dtype=float)
            for m in self.matrices
        ]


def boundary_matrices(spec) -> BoundaryOperators:
    spec = _as_markov_spec(spec)
    n = spec.n
    mats = []
    for i in range(n):
        rows = []
        for k in range(n):
            row = [
                sqrt_positive_rational(spec.transitions[i][k]) if j == i else RS_ZERO
                for j in range(n)
            ]
            rows.append(tuple(row))
        mats.append(tuple(rows))
    return BoundaryOperators(n, tuple(mats))


def cross_gram_matrix(spec_a, spec_b) -> tuple:
    """Exact entrywise matrix sqrt(T[i][j] * T'[i][j]) as RadicalSums."""
    a, b = _as_markov_spec(spec_a), _as_markov_spec(spec_b)
    if a.n != b.n:
        raise ValidationError("specs have different alphabet sizes")
    return tuple(
        tuple(sqrt_positive_rational(a.transitions[i][j] * b.transitions[i][j]) for j in range(a.n))
        for i in range(a.n)
    )


# ---------------------------------------------------------------------------
# fixed-point space


@dataclass
class FixedSpaceResult:
    dimension: int
    basis: list  # list of N x N numpy arrays, orthonormal rows of the space
    method_agreement: bool
    residual: float  # max over basis of ||Phi(X) - X||_inf


def _null_space(matrix: np.ndarray, tol: float) -> np.ndarray:
    _, s, vh = np.linalg.svd(matrix)
    small = s < tol
    # svd returns min(m, n) singular values; rows of vh beyond len(s) span
    # the remaining kernel when the matrix is wide (not the case here).
    return vh[len(s) - int(np.count_nonzero(small)) :]


def fixed_point_space(spec_a, spec_b, tol: float = RANK_TOL) -> FixedSpaceResult:
    """Solutions X of ``sum_i V_i' X V_i* = X`` for two Markov specs.

    Computes the space twice (dense solve on the full matrix space, and the
    structural diagonal reduction) and requires the two answers to agree.
    """
    a, b = _as_markov_spec(spec_a), _as_markov_spec(spec_b)
    if a.n != b.n:
        raise ValidationError("specs have different alphabet sizes")
    n = a.n
    vs_a = boundary_matrices(a).as_float()  # matrices of V_i*
    vs_b = boundary_matrices(b).as_float()

    def phi(x: np.ndarray) -> np.ndarray:
        out = np.zeros_like(x)
        for i in range(n):
            out += vs_b[i].T @ x @ vs_a[i]
        return out

    # dense method: kernel of (Phi - id) on the n^2-dimensional matrix space
    k = np.zeros((n * n, n * n))
    for col in range(n * n):
        e = np.zeros((n, n))
        e[col // n, col % n] = 1.0
        k[:, col] = phi(e).reshape(-1)
    dense_kernel = _null_space(k - np.eye(n * n), tol)
    dense_dim = dense_kernel.shape[0]

    # structural method: X must be diagonal, diagonal fixed by the Gram matrix
    gram = np.array(
        [
            [float(np.sqrt(float(a.transitions[i][j] * b.transitions[i][j]))) for j in range(n)]
            for i in range(n)
        ]
    )
    diag_kernel = _null_space(gram - np.eye(n), tol)
    struct_dim = diag_kernel.shape[0]
    struct_basis = [np.diag(v) for v in diag_kernel]

    agreement = dense_dim == struct_dim
    if agreement and dense_dim:
        dense_mats = [v.reshape(n, n) for v in dense_kernel]
        # compare the two spaces via their orthogonal projectors
        pd = sum(np.outer(m.reshape(-1), m.reshape(-1)) for m in dense_mats)
        ps = np.zeros_like(pd)
        for m in struct_basis:
            v = m.reshape(-1)
            v = v / np.linalg.norm(v)
            ps += np.outer(v, v)
        agreement = bool(np.max(np.abs(pd - ps)) <= AGREE_TOL)
    if not agreement:
        raise MethodDisagreementError(
            f"dense fixed space (dim {dense_dim}) and structural fixed space "
            f"(dim {struct_dim}) disagree"
        )

    basis = [v.reshape(n, n) for v in dense_kernel]
    residual = 0.0
    for x in basis:
        residual = max(residual, float(np.max(np.abs(phi(x) - x))))
    return FixedSpaceResult(dense_dim, basis, agreement, residual)


def irreducibility_check(spec) -> bool:
    """A system is irreducible iff the self fixed space is the scalars."""
    result = fixed_point_space(spec, spec)
    if result.dimension != 1:
        return False
    x = result.basis[0]
    n = x.shape[0]
    scale = np.trace(x) / n
    return bool(np.max(np.abs(x - scale * np.eye(n))) <= AGREE_TOL)


def disjointness_check(spec_a, spec_b) -> bool:
    """Disjointness of two Markov systems, decided exactly by T != T'.

    The floating fixed-point solve and the affinity decay are cross-checks;
    a contradiction raises :class:`MethodDisagreementError` rather than
    silently overriding the exact criterion.
    """
    a, b = _as_markov_spec(spec_a), _as_markov_spec(spec_b)
    if a.n != b.n:
        raise ValidationError("specs have different alphabet sizes")
    disjoint = a.transitions != b.transitions
    result = fixed_point_space(a, b)
    if disjoint and result.dimension != 0:
        raise MethodDisagreementError(
            f"T != T' but the intertwining space has dimension {result.dimension}"
        )
    if not disjoint and result.dimension != 1:
        raise MethodDisagreementError(
            f"T == T' but the fixed space has dimension {result.dimension}"
        )
    if disjoint:
        # geometric decay is guaranteed, but the rate depends on how close the
        # matrices are; search adaptively instead of using a fixed horizon
        crossing = markov_affinity_crossing(a, b, AFFINITY_THRESHOLD)
        if crossing is None:
            raise MethodDisagreementError(
                f"T != T' but the affinity never dropped below {AFFINITY_THRESHOLD}"
            )
    else:
        profile = affinity_below(MarkovMeasure(a), MarkovMeasure(b), 1.0 - 1e-9, 5)
        if profile is not None:
            raise MethodDisagreementError("identical measures but the affinity decayed")
    return disjoint


# ---------------------------------------------------------------------------
# equivalence


@dataclass
class EquivalenceVerdict:
    status: str  # "equivalent" | "not_equivalent" | "inconclusive"
    reason: str
    certificate: StepFunction | None = None

    @property
    def equivalent(self) -> bool | None:
        if self.status == "equivalent":
            return True
        if self.status == "not_equivalent":
            return False
        return None

    def to_json(self) -> dict:
        return {"status": self.status, "reason": self.reason}


def _certificate_checks(sys_a: MonicSystem, sys_b: MonicSystem, h: StepFunction,
                        depth: int, tol: float) -> str | None:
    """Verify a multiplier certificate; None on success, else a witness."""
    mu, nu = sys_a.measure, sys_b.measure
    exact = sys_a.is_exact() and sys_b.is_exact() and h.is_exact()

    def eq(x: Scalar, y: Scalar) -> bool:
        return x == y if exact else abs(x.to_complex() - y.to_complex()) <= tol

    for w, value in h.refine(max(depth, h.depth)).items():
        if value.is_zero() and mu.mass(w) > 0:
            raise CertificateError(
                f"certificate vanishes on the mass-carrying cylinder C({format_word(w)})"
            )
    deriv, exact_flag = rn_derivative(nu, mu, depth)
    if not exact_flag:
        return "mass ratio is not depth-exact at this resolution"
    h2 = h.abs2().refine(depth)
    for w, value in h2.items():
        if not eq(value, deriv.evaluate(w)):
            return f"|h|^2 != d(nu)/d(mu) at C({format_word(w)})"
    big = max(depth + 1, h.depth + 1, 2)
    h_shift = h.compose_shift().refine(big)
    h_flat = h.refine(big)
    for i in range(sys_a.n):
        lhs = sys_b.funcs[i].refine(big) * h_flat
        rhs = h_shift * sys_a.funcs[i].refine(big)
        for w, value in lhs.items():
            if mu.mass(w) == 0:
                continue
            if not eq(value, rhs.evaluate(w)):
                return f"multiplier relation fails for letter {i} at C({format_word(w)})"
    return None


def _kernel_search(sys_a: MonicSystem, sys_b: MonicSystem, depth: int,
                   tol: float) -> StepFunction | None:
    """Bounded search for a depth-``depth`` multiplier, via the linear system
    ``f'_i(x) h(x|d) = h(shift(x)|d) f_i(x)`` over all words x of length d+1."""
    n = sys_a.n
    if depth < 1:
        depth = 1
    size = n**depth
    rows = []
    for i in range(n):
        fa = sys_a.funcs[i].refine(max(depth + 1, sys_a.funcs[i].depth))
        fb = sys_b.funcs[i].refine(max(depth + 1, sys_b.funcs[i].depth))
        for x in iter_words(n, depth + 1):
            row = np.zeros(size, dtype=complex)
            row[index_of(x[:depth], n)] += fb.evaluate(x).to_complex()
            row[index_of(x[1:], n)] -= fa.evaluate(x).to_complex()
            rows.append(row)
    system = np.array(rows)
    kernel = _null_space(system, RANK_TOL * max(1.0, float(np.max(np.abs(system)))))
    mu, nu = sys_a.measure, sys_b.measure
    try:
        deriv, exact_flag = rn_derivative(nu, mu, depth)
    except NotAbsolutelyContinuousError:
        return None
    for vec in kernel:
        h = StepFunction(n, depth, tuple(Scalar.approx(v) for v in vec))
        # normalize: fix modulus and phase on the first cylinder with mass
        anchor = None
        for w, value in h.items():
            if mu.mass(w) > 0 and abs(value.to_complex()) > tol:
                anchor = (w, value.to_complex())
                break
        if anchor is None:
            continue
        w0, v0 = anchor
        target = float(deriv.evaluate(w0).to_complex().real)
        if target <= 0:
            continue
        scale = np.sqrt(target) / abs(v0)
        h = h.scale(Scalar.approx(scale))
        try:
            if _certificate_checks(sys_a, sys_b, h, depth, tol) is None:
                return h
        except CertificateError:
            continue
    return None


def equivalence_check(sys_a: MonicSystem, sys_b: MonicSystem,
                      certificate: StepFunction | None = None,
                      depth: int = 4, tol: float = 1e-9) -> EquivalenceVerdict:
    """Decide equivalence of two monic systems, as far as finite depth allows.

    With a supplied certificate the two defining identities are verified at
    the given depth.  Without one: Markov-backed systems with different
    transition matrices are mutually singular (exact criterion), hence not
    equivalent; nonnegative pairs get the canonical square-root certificate;
    otherwise a bounded linear search runs.  Search failure yields
    "inconclusive" -- absence of a depth-d certificate is not a proof.
    """
    if sys_a.n != sys_b.n:
        raise ValidationError("systems live over different alphabets")
    mu, nu = sys_a.measure, sys_b.measure

    if certificate is not None:
        try:
            witness = _certificate_checks(sys_a, sys_b, certificate, depth, tol)
        except NotAbsolutelyContinuousError as err:
            return EquivalenceVerdict("not_equivalent", f"measures inequivalent: {err}")
        if witness is None:
            return EquivalenceVerdict("equivalent", "supplied certificate verified", certificate)
        return EquivalenceVerdict("inconclusive", f"supplied certificate failed: {witness}")

    # exact singularity criterion for Markov-backed measures
    try:
        a, b = _as_markov_spec(mu), _as_markov_spec(nu)
        if a.transitions != b.transitions:
            return EquivalenceVerdict(
                "not_equivalent",
                "transition matrices differ, so the measures are mutually singular",
            )
    except ValidationError:
        pass

    try:
        deriv, exact_flag = rn_derivative(nu, mu, depth)
        rn_derivative(mu, nu, depth)
    except NotAbsolutelyContinuousError as err:
        return EquivalenceVerdict("not_equivalent", f"measures inequivalent: {err}")

    if sys_a.nonnegative and sys_b.nonnegative:
        if not exact_flag:
            return EquivalenceVerdict(
                "inconclusive", f"no certificate at depth <= {depth}: mass ratio not depth-exact"
            )
        table = []
        for w, value in deriv.items():
            ratio = value.as_fraction()
            table.append(
                Scalar.radical(sqrt_positive_rational(ratio)) if ratio > 0 else Scalar.rational(0)
            )
        h = StepFunction(sys_a.n, depth, tuple(table))
        witness = _certificate_checks(sys_a, sys_b, h, depth, tol)
        if witness is None:
            return EquivalenceVerdict("equivalent", "square-root certificate verified", h)
        return EquivalenceVerdict("inconclusive", f"no certificate at depth <= {depth}: {witness}")

    found = _kernel_search(sys_a, sys_b, depth, tol)
    if found is not None:
        return EquivalenceVerdict("equivalent", "search found a multiplier certificate", found)
    return EquivalenceVerdict("inconclusive", f"no certificate at depth <= {depth}")


# ---------------------------------------------------------------------------
# commutant


def equality_components(size: int, pairs) -> list[list[int]]:
    """Connected components of an equality-constraint graph on range(size)."""
    parent = list(range(size))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra
    groups: dict[int, list[int]] = {}
    for x in range(size):
        groups.setdefault(find(x), []).append(x)
    return [groups[r] for r in sorted(groups, key=lambda r: min(groups[r]))]


def commutant_basis(system: MonicSystem, depth: int) -> list[StepFunction]:
    """Basis of the shift-invariant multipliers of depth <= ``depth``.

    The constraint h o shift = h links every length-(depth+1) word's prefix
    to its suffix; the solution space is spanned by indicators of the
    connected components.  The de Bruijn overlap graph is connected, so the
    expected outcome is the constants alone -- but the space is computed, not
    assumed.
    """
    n = system.n
    if depth == 0:
        return [StepFunction.one(n)]
    size = n**depth
    pairs = []
    for x in iter_words(n, depth + 1):
        pairs.append((index_of(x[:depth], n), index_of(x[1:], n)))
    components = equality_components(size, pairs)
    basis = []
    for comp in components:
        table = [Scalar.rational(0)] * size
        for idx in comp:
            table[idx] = Scalar.rational(1)
        basis.append(StepFunction(n, depth, tuple(table)))
    return basis


def commutant_report(system: MonicSystem, depth: int) -> Report:
    report = Report("commutant")
    basis = commutant_basis(system, depth)
    constant_only = len(basis) == 1 and basis[0] == StepFunction.one(system.n)
    report.add(
        "trivial-commutant",
        constant_only,
        None if constant_only else f"found {len(basis)} shift-invariant components",
    )
    return report
