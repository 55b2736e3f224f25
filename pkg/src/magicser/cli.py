"""Command-line interface: count, estimate, coeffs, compare, verify."""
from __future__ import annotations

import argparse
import os
import sys
import warnings
from fractions import Fraction

from . import counting, diagrams, estimates, report, series
from .problem import check_feasibility, make_problem, target_moments


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("MAGICSER_THREADS", "1")))
    except ValueError:
        return 1


def _add_spec_args(p):
    p.add_argument("--alpha", type=int, required=True, help="hypercube dimension (>= 2)")
    p.add_argument("--order", type=int, required=True, help="order N")
    p.add_argument("--degree", type=int, default=1,
                   help="1 = magic, 2 = bimagic, 3 = trimagic")


def cmd_count(args) -> int:
    spec = make_problem(args.alpha, args.order, args.degree)
    feas = check_feasibility(spec)
    if not feas.feasible:
        print(f"# infeasible: {feas.reason}", file=sys.stderr)
        print(0)
        return 0
    targets = target_moments(spec)
    if args.degree >= 2:
        binom = ", ".join(str(c) for c in targets.mu)
        power = ", ".join(str(c) for c in targets.power_sums())
        print(f"# targets, binomial weights C(i,r): ({binom})", file=sys.stderr)
        print(f"# targets, power sums i^r:         ({power})", file=sys.stderr)
    count = counting.count_series(spec, method=args.method, threads=_threads())
    print(count)
    return 0


def cmd_estimate(args) -> int:
    spec = make_problem(args.alpha, args.order, args.degree)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        value = estimates.corrected_estimate(
            spec, args.correction_order, precision=args.precision,
            digits=args.digits)
    for w in caught:
        print(f"# warning: {w.message}", file=sys.stderr)
    print(value)
    return 0


def cmd_coeffs(args) -> int:
    d = args.dimension
    cc = diagrams.correction_coefficients(d)
    print(f"dimension d = {d} (degree {d - 1} series)")
    print(f"K1 = {cc.K1}")
    print(f"K2 = {cc.K2}")
    print(f"K3 = {cc.K3}")
    print(f"correction: {cc.scaling}")
    degree = d - 1
    alphas = (2, 3, 4, 5) if degree == 1 else ((2, 3) if degree == 2 else (2,))
    max_order = {1: 2, 2: 1, 3: 0}[degree]
    for alpha in alphas:
        formula = estimates.compose_series(alpha, degree, max_order)
        coeffs = ", ".join(str(c) for c in formula.coefficient_list(max_order))
        label = f"alpha={alpha}" + (" (and all larger alpha)" if alpha == 5 else "")
        print(f"series {label}: ({coeffs})")
    return 0


def cmd_compare(args) -> int:
    orders = [int(x) for x in args.orders.split(",") if x.strip()]
    specs = [make_problem(args.alpha, N, args.degree) for N in orders]
    fixtures = (report.load_fixtures(args.fixtures) if args.fixtures
                else report.default_fixtures())
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", estimates.FeasibilityWarning)
        rows = report.build_report(specs, fixtures, args.correction_order,
                                   scale_power=args.scale_power)
    if args.format == "json":
        print(report.rows_to_json(rows))
    elif args.format == "csv":
        print(report.rows_to_csv(rows), end="")
    else:
        print(report.rows_to_markdown(rows), end="")
    return 0


# ---------------------------------------------------------------------------
# verify: the internal identity suite

def _verify_checks():
    F = Fraction
    yield ("vertex corrections f3, f4", lambda: (
        series.vertex_correction(3).coeffs == (F(1), F(-3), F(2))
        and series.vertex_correction(4).coeffs == (F(1), F(-7), F(12), F(-6))))
    yield ("rescaled corrections 1 - 3b/2, 1 - 5b", lambda: (
        series.rescaled_vertex_correction(3, 1).coeffs == (F(1), F(-3, 2))
        and series.rescaled_vertex_correction(4, 1).coeffs == (F(1), F(-5))))
    yield ("propagator closed forms d=2, 3", lambda: (
        series.propagator(2).entries == ((F(4), F(-6)), (F(-6), F(12)))
        and series.propagator(3).entries == ((F(9), F(-36), F(60)),
                                             (F(-36), F(192), F(-360)),
                                             (F(60), F(-360), F(720)))))
    yield ("propagator x covariance = identity d=2..4", lambda: all(
        series.mat_mul(series.propagator(d).entries,
                       series.covariance_leading(d).entries) == series.identity(d)
        for d in (2, 3, 4)))
    yield ("leading covariance determinant 1/8640 (d=3)", lambda:
           series.covariance_leading(3).det() == F(1, 8640))
    yield ("diagram coefficients K1, K2, K3 (d=2)", lambda: (
        diagrams.compute_K1(2) == F(-7, 30)
        and diagrams.compute_K2(2) == F(-1, 2)
        and diagrams.compute_K3(2) == F(11, 2520)))
    yield ("bimagic K1 = -711/980 (d=3)", lambda:
           diagrams.compute_K1(3) == F(-711, 980))
    yield ("K3 per-diagram values (d=2)", lambda: (
        [diagrams.contract(t, 2) for t in diagrams.generate_terms(2)]
        == [F(205, 72), F(-31, 6), F(22, 15), F(17, 15), F(-29, 105)]))
    yield ("pairing counts (2n-1)!! for n <= 6", lambda: all(
        sum(1 for _ in diagrams.pairings(list(range(2 * n))))
        == _double_fact(2 * n - 1) for n in range(1, 7)))
    yield ("series composition: canonical coefficient lists", _check_composition)
    yield ("prefactor series alpha=2, 3", lambda: (
        estimates.prefactor_series(2, 2) == [F(1), F(-1, 6), F(-5, 72)]
        and estimates.prefactor_series(3, 2) == [F(1), F(-1, 2), F(1, 8)]))
    yield ("DP equals exhaustive oracle on samples", _check_dp_oracle)
    yield ("DP symmetries and row sums", _check_dp_symmetries)
    yield ("DP equals DFT inversion on samples", _check_dft)
    yield ("shipped fixtures well-formed", lambda:
           len(report.default_fixtures()) == 20)


def _double_fact(n):
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _check_composition():
    F = Fraction
    want = {
        (2, 1, 2): [F(1), F(3, 5), F(31, 420)],
        (3, 1, 2): [F(1), F(-11, 15), F(157, 126)],
        (4, 1, 2): [F(1), F(-7, 30), F(-1249, 2520)],
        (5, 1, 2): [F(1), F(-7, 30), F(11, 2520)],
        (2, 2, 1): [F(1), F(1787, 2940)],
        (3, 2, 1): [F(1), F(-1201, 980)],
    }
    for (alpha, degree, order), coeffs in want.items():
        composed = estimates.compose_series(alpha, degree, order)
        if composed.coefficient_list(order) != coeffs:
            return False
        canonical = estimates.canonical_formula(alpha, degree, order)
        if canonical.coefficient_list(order) != coeffs:
            return False
    return True


def _check_dp_oracle():
    cases = [
        counting.CountQuery(9, 3, (15,)),
        counting.CountQuery(16, 4, (34,)),
        counting.CountQuery(12, 5, (30,)),
        counting.CountQuery(10, 4, (22, 20)),
    ]
    return all(counting.count_dp(q) == counting.count_exhaustive(q) for q in cases)


def _check_dp_symmetries():
    total = 10 * 11 // 2
    for m, A, B in [(10, 3, 17), (10, 4, 21), (9, 3, 15)]:
        if counting.count_dp(counting.CountQuery(m, A, (B,))) != counting.count_dp(
                counting.CountQuery(m, m - A, (m * (m + 1) // 2 - B,))):
            return False
        if counting.count_dp(counting.CountQuery(m, A, (B,))) != counting.count_dp(
                counting.CountQuery(m, A, (A * (m + 1) - B,))):
            return False
    import math
    row = counting.sum_distribution(10, 4)
    return sum(row) == math.comb(10, 4) and total == 55


def _check_dft():
    for m, A in [(6, 3), (9, 3), (12, 4)]:
        center = A * (m + 1) // 2
        for B in range(center - 2, center + 3):
            if counting.count_dft(m, A, B) != counting.count_dp(
                    counting.CountQuery(m, A, (B,))):
                return False
    return True


def cmd_verify(_args) -> int:
    failures = 0
    for name, check in _verify_checks():
        try:
            ok = check()
            detail = ""
        except Exception as exc:  # noqa: BLE001 - report and count as failure
            ok, detail = False, f" ({exc})"
        print(f"{'ok  ' if ok else 'FAIL'} - {name}{detail}")
        failures += 0 if ok else 1
    if failures:
        print(f"{failures} check(s) failed")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="magicser",
        description="Exact counting and high-precision asymptotics for "
                    "magic, bimagic, and trimagic series.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="exact count of series")
    _add_spec_args(p)
    p.add_argument("--method", choices=("dp", "exhaustive", "dft"), default="dp")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("estimate", help="high-precision asymptotic estimate")
    _add_spec_args(p)
    p.add_argument("--correction-order", type=int, default=None,
                   help="defaults to the highest supported order for the degree")
    p.add_argument("--precision", type=int, default=None,
                   help="working precision in significant decimal digits")
    p.add_argument("--digits", type=int, default=estimates.DEFAULT_DIGITS,
                   help="mantissa digits in the printed estimate")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("coeffs", help="exact correction coefficients")
    p.add_argument("--dimension", type=int, default=2, choices=(2, 3, 4))
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("compare", help="estimate-vs-exact comparison table")
    p.add_argument("--alpha", type=int, required=True)
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--orders", type=str, required=True,
                   help="comma-separated list of N values")
    p.add_argument("--correction-order", type=int, default=None)
    p.add_argument("--fixtures", type=str, default=None,
                   help="fixtures file (defaults to the shipped one)")
    p.add_argument("--format", choices=("md", "json", "csv"), default="md")
    p.add_argument("--scale-power", type=int, default=None)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("verify", help="run the internal identity suite")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "correction_order", False) is None:
        args.correction_order = {1: 2, 2: 1, 3: 0}.get(args.degree, 0)
    try:
        return args.func(args)
    except (ValueError, counting.ResourceLimitError,
            counting.PrecisionLossError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
