"""Batch command-line surface with JSON input and output.

Every command reads specs from JSON files, prints a machine-readable report
to stdout and a short human log to stderr, and exits 0 on pass, 1 when a
verification finds a failure, 2 on malformed input or usage errors.
Randomized suites are deterministic under --seed.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import atomic, classify, measures, monic, universal
from .errors import (
    CertificateError,
    MethodDisagreementError,
    NotAbsolutelyContinuousError,
    ResolutionError,
    ValidationError,
)
from .jsonio import (
    format_fraction,
    format_measure_spec,
    format_scalar,
    format_step_function,
    parse_measure,
    parse_measure_spec,
    parse_monic_system,
    parse_step_function,
)
from .measures import AtomicTailSpec, MarkovSpec, ProductSpec
from .stepfuncs import StepFunction
from .words import iter_words, parse_word

USAGE_ERROR = 2
CHECK_FAILURE = 1


def _load(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as err:
        raise ValidationError(f"cannot read {path}: {err}") from None
    except json.JSONDecodeError as err:
        raise ValidationError(f"{path} is not valid JSON: {err}") from None


def _markov_spec(path: str) -> MarkovSpec:
    spec = parse_measure_spec(_load(path))
    if isinstance(spec, ProductSpec):
        spec = spec.to_markov()
    if not isinstance(spec, MarkovSpec):
        raise ValidationError("this command needs a markov or product measure spec")
    return spec


def _report_payload(report) -> dict:
    return report.to_json()


def _finish(args, payload: dict, failed: bool) -> int:
    payload = {
        "command": args.command_path,
        "mode": "approx" if getattr(args, "approx", False) else "exact",
        "elapsed_s": round(time.perf_counter() - args.t0, 6),
        **payload,
    }
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")
    status = "FAIL" if failed else "ok"
    print(f"[{args.command_path}] {status}", file=sys.stderr)
    return CHECK_FAILURE if failed else 0


# -- measure ---------------------------------------------------------------------


def cmd_measure_eval(args) -> int:
    mu = parse_measure(_load(args.spec))
    word = parse_word(args.word, mu.n)
    return _finish(args, {"word": args.word, "mass": format_fraction(mu.mass(word))}, False)


def cmd_measure_pushforward(args) -> int:
    mu = parse_measure(_load(args.spec))
    if args.op == "section":
        pushed = mu.pushforward_section(args.letter)
    elif args.op == "shift":
        pushed = mu.pushforward_shift()
    elif args.op == "restrict":
        pushed = mu.restrict_then_shift(args.letter)
    else:
        raise ValidationError(f"unknown pushforward {args.op!r}")
    word = parse_word(args.word, mu.n)
    return _finish(
        args,
        {"op": args.op, "word": args.word, "mass": format_fraction(pushed.mass(word))},
        False,
    )


def cmd_measure_rn(args) -> int:
    nu = parse_measure(_load(args.nu))
    mu = parse_measure(_load(args.mu))
    try:
        deriv, exact = measures.rn_derivative(nu, mu, args.depth)
    except NotAbsolutelyContinuousError as err:
        return _finish(args, {"absolutely_continuous": False, "witness": err.witness}, True)
    return _finish(
        args,
        {"absolutely_continuous": True, "exact": exact, "derivative": format_step_function(deriv)},
        False,
    )


def cmd_measure_affinity(args) -> int:
    mu = parse_measure(_load(args.a))
    nu = parse_measure(_load(args.b))
    profile = measures.affinity_sequence(mu, nu, args.max_depth, jobs=args.jobs)
    nonincreasing = all(profile[d + 1] <= profile[d] + 1e-12 for d in range(len(profile) - 1))
    return _finish(
        args,
        {
            "depths": list(range(len(profile))),
            "values": profile,
            "nonincreasing": nonincreasing,
        },
        not nonincreasing,
    )


def cmd_measure_consistency(args) -> int:
    mu = parse_measure(_load(args.spec))
    report = measures.consistency_check(mu, args.depth)
    return _finish(args, _report_payload(report), not report.passed)


# -- rep ---------------------------------------------------------------------------


def cmd_rep_verify(args) -> int:
    system = parse_monic_system(_load(args.spec))
    tol = args.tol
    report = monic.validate_monic_system(system, args.depth, tol=tol)
    cuntz = monic.cuntz_relations_check(system, args.depth, args.trials, seed=args.seed, tol=tol)
    report.extend(cuntz)
    return _finish(args, _report_payload(report), not report.passed)


def cmd_rep_apply(args) -> int:
    system = parse_monic_system(_load(args.spec))
    f = parse_step_function(_load(args.function)) if args.function else None
    if f is None:
        f = StepFunction.one(system.n)
    left = parse_word(args.isometry_word, system.n)
    right = parse_word(args.adjoint_word, system.n)
    result = monic.apply_word_operator(system, left, right, f)
    return _finish(args, {"result": format_step_function(result)}, False)


# -- classify -----------------------------------------------------------------------


def cmd_classify_irreducible(args) -> int:
    spec = _markov_spec(args.spec)
    result = classify.fixed_point_space(spec, spec)
    irreducible = classify.irreducibility_check(spec)
    payload = {
        "dimension": result.dimension,
        "irreducible": irreducible,
        "method_agreement": result.method_agreement,
    }
    return _finish(args, payload, not irreducible)


def cmd_classify_disjoint(args) -> int:
    a = _markov_spec(args.a)
    b = _markov_spec(args.b)
    result = classify.fixed_point_space(a, b)
    disjoint = classify.disjointness_check(a, b)
    payload = {
        "dimension": result.dimension,
        "disjoint": disjoint,
        "method_agreement": result.method_agreement,
    }
    return _finish(args, payload, False)


def cmd_classify_equivalent(args) -> int:
    sys_a = parse_monic_system(_load(args.a))
    sys_b = parse_monic_system(_load(args.b))
    certificate = parse_step_function(_load(args.certificate)) if args.certificate else None
    verdict = classify.equivalence_check(sys_a, sys_b, certificate, depth=args.depth, tol=args.tol)
    return _finish(args, verdict.to_json(), False)


def cmd_classify_commutant(args) -> int:
    system = parse_monic_system(_load(args.spec))
    basis = classify.commutant_basis(system, args.depth)
    constant_only = len(basis) == 1
    payload = {"dimension": len(basis), "constant_only": constant_only}
    return _finish(args, payload, not constant_only)


# -- universal -------------------------------------------------------------------------


def cmd_universal_intertwine(args) -> int:
    system = parse_monic_system(_load(args.spec))
    report = universal.intertwine_check(system, args.depth, trials=args.trials,
                                        seed=args.seed, tol=args.tol)
    return _finish(args, _report_payload(report), not report.passed)


def cmd_universal_isometry(args) -> int:
    system = parse_monic_system(_load(args.spec))
    report = universal_isometry_report(system, args.depth, args.trials, args.seed, args.tol)
    return _finish(args, _report_payload(report), not report.passed)


def universal_isometry_report(system, depth, trials, seed, tol):
    import random as _random

    from .reports import Report

    report = Report("universal-isometry")
    rng = _random.Random(seed)
    witness = None
    for t in range(trials):
        f = monic.random_step_function(system.n, max(depth - 1, 0), rng)
        g = monic.random_step_function(system.n, max(depth - 1, 0), rng)
        x = universal.SigmaVector.single(f, system.measure)
        y = universal.SigmaVector.single(g, system.measure)
        base = universal.inner_product_depth(x, y, depth).to_complex()
        for i in range(system.n):
            lifted = universal.inner_product_depth(
                universal.universal_isometry(i, x),
                universal.universal_isometry(i, y),
                depth + 1,
            ).to_complex()
            if abs(lifted - base) > tol:
                witness = f"trial {t}, letter {i}: <S_i x, S_i y> - <x, y> = {lifted - base}"
                break
        if witness:
            break
    report.add("depth-shift-isometry", witness is None, witness)

    witness = None
    for t in range(trials):
        f = monic.random_step_function(system.n, depth, rng)
        g = monic.random_step_function(system.n, depth, rng)
        lhs = universal.inner_product_depth(
            universal.SigmaVector.single(f, system.measure),
            universal.SigmaVector.single(g, system.measure),
            depth,
        )
        rhs = measures.inner_product(f, g, system.measure)
        if not (lhs == rhs if lhs.is_exact and rhs.is_exact else
                abs(lhs.to_complex() - rhs.to_complex()) <= tol):
            witness = f"trial {t}: embedding inner product mismatch"
            break
    report.add("embedding-isometry", witness is None, witness)
    return report


def cmd_universal_covariance(args) -> int:
    import random as _random

    from .reports import Report

    system = parse_monic_system(_load(args.spec))
    report = Report("projection-covariance")
    rng = _random.Random(args.seed)
    witness = None
    for t in range(args.trials):
        f = monic.random_step_function(system.n, max(args.depth - 2, 0), rng)
        x = universal.SigmaVector.single(f, system.measure)
        for wlen in range(args.depth - 1):
            for w in list(iter_words(system.n, wlen))[:4]:
                for i in range(system.n):
                    gap = universal.projection_covariance_gap(x, i, w, args.depth)
                    if abs(gap) > args.tol:
                        witness = f"trial {t}, P(C({i}{''.join(map(str, w))})): gap {gap}"
                        break
                if witness:
                    break
            if witness:
                break
        if witness:
            break
    report.add("pvm-covariance", witness is None, witness)
    return _finish(args, _report_payload(report), not report.passed)


# -- atomic ---------------------------------------------------------------------------


def cmd_atomic_report(args) -> int:
    spec = parse_measure_spec(_load(args.spec))
    if not isinstance(spec, AtomicTailSpec):
        raise ValidationError("this command needs an atomic_tail measure spec")
    report = atomic.atomic_monicity_report(spec, args.bound)
    payload = _report_payload(report)
    payload["partial_mass"] = format_fraction(atomic.partial_mass(spec, args.bound))
    payload["tail_mass"] = format_fraction(atomic.tail_mass(spec, args.bound))
    if args.against:
        mk = parse_measure(_load(args.against))
        profile = measures.affinity_sequence(
            atomic.atomic_measure(spec), mk, args.max_depth
        )
        payload["affinity_against"] = profile
    return _finish(args, payload, not report.passed)


# -- parser ------------------------------------------------------------------------------


def _add_common(parser, *, tol=True, seed=False, jobs=False, depth=None, trials=None):
    parser.add_argument("--approx", action="store_true", help="floating comparisons")
    if tol:
        parser.add_argument("--tol", type=float, default=1e-9, help="comparison tolerance")
    if seed:
        parser.add_argument("--seed", type=int, default=0, help="seed for randomized suites")
    if jobs:
        parser.add_argument("--jobs", type=int, default=1, help="worker processes for enumeration")
    if depth is not None:
        parser.add_argument("--depth", type=int, default=depth, help="resolution depth")
    if trials is not None:
        parser.add_argument("--trials", type=int, default=trials, help="randomized trials")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cuntzrep",
        description="Exact kernel for Cuntz-relation representations on symbol spaces.",
    )
    top = parser.add_subparsers(dest="group", required=True)

    measure = top.add_parser("measure", help="cylinder measure operations").add_subparsers(
        dest="sub", required=True
    )
    p = measure.add_parser("eval", help="mass of a cylinder")
    p.add_argument("--spec", required=True)
    p.add_argument("--word", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_measure_eval)

    p = measure.add_parser("pushforward", help="mass of a pushed-forward cylinder")
    p.add_argument("--spec", required=True)
    p.add_argument("--op", required=True, choices=["section", "shift", "restrict"])
    p.add_argument("--letter", type=int, default=0)
    p.add_argument("--word", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_measure_pushforward)

    p = measure.add_parser("rn", help="depth-d derivative of nu against mu")
    p.add_argument("--nu", required=True)
    p.add_argument("--mu", required=True)
    _add_common(p, depth=2)
    p.set_defaults(func=cmd_measure_rn)

    p = measure.add_parser("affinity", help="Hellinger affinity profile")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--max-depth", type=int, default=12)
    _add_common(p, jobs=True)
    p.set_defaults(func=cmd_measure_affinity)

    p = measure.add_parser("consistency", help="Kolmogorov additivity check")
    p.add_argument("--spec", required=True)
    _add_common(p, depth=6)
    p.set_defaults(func=cmd_measure_consistency)

    rep = top.add_parser("rep", help="monic system operations").add_subparsers(
        dest="sub", required=True
    )
    p = rep.add_parser("verify", help="system identities and Cuntz relations")
    p.add_argument("--spec", required=True)
    _add_common(p, seed=True, depth=4, trials=25)
    p.set_defaults(func=cmd_rep_verify)

    p = rep.add_parser("apply", help="apply a word operator S_I S_J* to a step function")
    p.add_argument("--spec", required=True)
    p.add_argument("--function", help="step function JSON file (default: constant 1)")
    p.add_argument("--isometry-word", default="")
    p.add_argument("--adjoint-word", default="")
    _add_common(p)
    p.set_defaults(func=cmd_rep_apply)

    cls = top.add_parser("classify", help="irreducibility, disjointness, equivalence").add_subparsers(
        dest="sub", required=True
    )
    p = cls.add_parser("irreducible", help="fixed-space test for one system")
    p.add_argument("--spec", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_classify_irreducible)

    p = cls.add_parser("disjoint", help="disjointness of two Markov systems")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_classify_disjoint)

    p = cls.add_parser("equivalent", help="equivalence of two systems")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--certificate", help="multiplier step function JSON file")
    _add_common(p, depth=4)
    p.set_defaults(func=cmd_classify_equivalent)

    p = cls.add_parser("commutant", help="shift-invariant multipliers up to a depth")
    p.add_argument("--spec", required=True)
    _add_common(p, depth=4)
    p.set_defaults(func=cmd_classify_commutant)

    uni = top.add_parser("universal", help="universal representation checks").add_subparsers(
        dest="sub", required=True
    )
    p = uni.add_parser("intertwine", help="embedding intertwines the isometries")
    p.add_argument("--spec", required=True)
    _add_common(p, seed=True, depth=5, trials=8)
    p.set_defaults(func=cmd_universal_intertwine)

    p = uni.add_parser("isometry", help="depth-shift and embedding isometry")
    p.add_argument("--spec", required=True)
    _add_common(p, seed=True, depth=4, trials=8)
    p.set_defaults(func=cmd_universal_isometry)

    p = uni.add_parser("covariance", help="projection covariance under the isometries")
    p.add_argument("--spec", required=True)
    _add_common(p, seed=True, depth=4, trials=4)
    p.set_defaults(func=cmd_universal_covariance)

    at = top.add_parser("atomic", help="atomic representation reports").add_subparsers(
        dest="sub", required=True
    )
    p = at.add_parser("report", help="monicity and mass accounting")
    p.add_argument("--spec", required=True)
    p.add_argument("--bound", type=int, default=6, help="maximum atom prefix length")
    p.add_argument("--against", help="measure spec for an affinity profile")
    p.add_argument("--max-depth", type=int, default=30)
    _add_common(p)
    p.set_defaults(func=cmd_atomic_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_err:
        return USAGE_ERROR if exit_err.code not in (0, None) else 0
    args.command_path = " ".join(
        part for part in [args.group, getattr(args, "sub", None)] if part
    )
    args.t0 = time.perf_counter()
    try:
        return args.func(args)
    except (ValidationError, ResolutionError, CertificateError) as err:
        print(f"error: {err}", file=sys.stderr)
        return USAGE_ERROR
    except NotAbsolutelyContinuousError as err:
        print(f"error: {err}", file=sys.stderr)
        return CHECK_FAILURE
    except MethodDisagreementError as err:
        print(f"internal consistency error: {err}", file=sys.stderr)
        return CHECK_FAILURE


if __name__ == "__main__":
    sys.exit(main())
