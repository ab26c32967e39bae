"""Command-line surface: identity suites, series expansion, index and
rigidity computation, catalog access.

Machine-readable JSON goes to stdout (sorted keys, no timestamps: a fixed
seed and configuration reproduce the report byte for byte); a short human
summary goes to stderr.  Exit codes: 0 all checks passed, 1 a mathematical
failure was detected, 2 usage or input error.  ELLIPTICA_THREADS caps the
worker count used for identity-suite trials; results are assembled in
trial order regardless of scheduling.
"""

from __future__ import annotations

import argparse
import cmath
import json
import os
import sys

from .elliptic import (
    EllipticParams,
    TRANSLATIONS,
    phi_exact,
    phi_numeric,
    phi_translate_check,
)
from .fixedpoint import (
    ManifoldValidationError,
    SpecialPointError,
    TwistSpec,
    consistency_check,
    equivariant_index,
    list_catalog,
    load_manifold,
    rigidity_check,
    simplify_character,
    special_orders,
)
from .zem import (
    SUITE_NAMES,
    LatticeElement,
    degenerate_reduction_check,
    identity_check,
)

USAGE_ERROR = 2
MATH_FAILURE = 1

ALL_SUITES = ("translations",) + SUITE_NAMES + ("degenerate-reduction",)


def _workers():
    raw = os.environ.get("ELLIPTICA_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _emit(report, out_path):
    text = json.dumps(report, sort_keys=True, indent=1)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _summary(line):
    print(line, file=sys.stderr)


def _parse_tau(raw):
    tau = complex(raw.replace(" ", ""))
    if tau.imag <= 0:
        raise argparse.ArgumentTypeError("tau needs positive imaginary part")
    return tau


def cmd_verify(args):
    if args.suite == "all":
        suites = list(ALL_SUITES)
    else:
        suites = [s.strip() for s in args.suite.split(",") if s.strip()]
        for s in suites:
            if s not in ALL_SUITES:
                _summary(
                    f"unknown suite {s!r}; known: {', '.join(ALL_SUITES)}"
                )
                return USAGE_ERROR
    results = []
    all_passed = True
    workers = _workers()
    for suite in suites:
        if suite == "translations":
            params = EllipticParams(truncation_order=args.q_order)
            checks = [phi_translate_check(w, params).to_json() for w in TRANSLATIONS]
            passed = all(c["passed"] for c in checks)
            results.append(
                {"suite": "translations", "checks": checks, "passed": passed,
                 "q_order": args.q_order}
            )
        elif suite == "degenerate-reduction":
            rep = degenerate_reduction_check(
                trials=args.trials, dims=args.dims, seed=args.seed, tol=1e-10
            )
            passed = rep.passed
            results.append(rep.to_json())
        else:
            rep = identity_check(
                suite, trials=args.trials, dims=args.dims, seed=args.seed,
                tol=args.tol, workers=workers,
            )
            passed = rep.passed
            results.append(rep.to_json())
        all_passed &= passed
        _summary(f"suite {suite:22s} {'pass' if passed else 'FAIL'}")
    report = {
        "command": "verify",
        "config": {
            "seed": args.seed,
            "trials": args.trials,
            "tol": args.tol,
            "q_order": args.q_order,
            "dims": args.dims,
        },
        "suites": results,
        "passed": all_passed,
    }
    _emit(report, args.out)
    _summary("verify: " + ("all suites passed" if all_passed else "FAILURES"))
    return 0 if all_passed else MATH_FAILURE


def _load_or_exit(source):
    try:
        return load_manifold(source), 0
    except ManifoldValidationError as exc:
        _summary(f"invalid manifold data: {exc}")
        return None, USAGE_ERROR
    except FileNotFoundError as exc:
        _summary(str(exc))
        return None, USAGE_ERROR


def cmd_index(args):
    m, code = _load_or_exit(args.manifold)
    if m is None:
        return code
    if args.twist in ("none", "tangent_witten"):
        twist = TwistSpec(args.twist)
    else:
        try:
            twist = m.bundle_twist(args.twist)
        except KeyError as exc:
            _summary(str(exc.args[0]))
            return USAGE_ERROR
    report = {
        "command": "index",
        "manifold": m.name,
        "twist": args.twist,
        "spin_parity_ok": m.spin_parity_ok,
    }
    failed = False
    if twist.kind == "tangent_witten":
        params = EllipticParams(truncation_order=args.q_order)
        series = equivariant_index(m, twist, params)
        report["series"] = series.to_json()
    else:
        theta = equivariant_index(m, twist)
        simp = simplify_character(theta)
        report["character"] = str(theta)
        report["simplified"] = simp.to_json()
        failed = not (simp.ok and simp.integral)
    if args.at is not None:
        tau = args.tau if args.tau is not None else 1j
        params = EllipticParams(tau=tau)
        value = equivariant_index(
            m, twist, params, backend="numeric", z=complex(args.at)
        )
        report["at"] = {"z": str(args.at), "tau": str(tau), "value": str(value)}
    _emit(report, args.out)
    _summary(f"index of {m.name} / {args.twist} computed")
    return MATH_FAILURE if failed else 0


def cmd_rigidity(args):
    m, code = _load_or_exit(args.manifold)
    if m is None:
        return code
    rep = rigidity_check(m, args.q_order)
    report = {"command": "rigidity", **rep.to_json()}
    _emit(report, args.out)
    _summary(
        f"rigidity of {m.name}: {'rigid' if rep.rigid else 'NOT RIGID'} "
        f"through p^{args.q_order}"
    )
    return 0 if rep.rigid else MATH_FAILURE


def cmd_special(args):
    m, code = _load_or_exit(args.manifold)
    if m is None:
        return code
    orders, reps = special_orders(m)
    report = {
        "command": "special",
        "manifold": m.name,
        "orders": orders,
        "representatives": {str(k): [str(g) for g in v] for k, v in reps.items()},
    }
    _emit(report, args.out)
    _summary(f"special orders of {m.name}: {orders}")
    return 0


def cmd_expand(args):
    params = EllipticParams(truncation_order=args.q_order)
    series = phi_exact(args.phi, params.require_order())
    report = {
        "command": "expand",
        "phi": args.phi,
        "series": series.to_json(),
    }
    if args.at is not None:
        tau = args.tau if args.tau is not None else 1j
        nparams = EllipticParams(tau=tau)
        value = phi_numeric(args.phi, nparams, complex(args.at))
        s0 = cmath.exp(1j * cmath.pi * complex(args.at))
        p0 = cmath.exp(0.5j * cmath.pi * tau)
        report["at"] = {
            "z": str(args.at),
            "tau": str(tau),
            "numeric": str(value),
            "series_value": str(series.evaluate(s0, p0)),
        }
    _emit(report, args.out)
    _summary(f"phi_{args.phi} expanded to order p^{args.q_order}")
    return 0


def cmd_consistency(args):
    m, code = _load_or_exit(args.manifold)
    if m is None:
        return code
    try:
        gamma = LatticeElement.torsion(args.alpha, args.beta, args.order_k)
    except ValueError as exc:
        _summary(str(exc))
        return USAGE_ERROR
    tau = args.tau if args.tau is not None else 1j
    try:
        rep = consistency_check(
            m, gamma, EllipticParams(tau=tau), trials=args.trials,
            seed=args.seed, tol=args.tol,
        )
    except SpecialPointError as exc:
        _summary(str(exc))
        return USAGE_ERROR
    report = {"command": "consistency", **rep.to_json()}
    _emit(report, args.out)
    _summary(f"consistency at {gamma}: {'pass' if rep.passed else 'FAIL'}")
    return 0 if rep.passed else MATH_FAILURE


def cmd_catalog(args):
    names = list_catalog()
    if args.dump:
        if args.dump not in names:
            _summary(f"no catalog entry {args.dump!r}; available: {names}")
            return USAGE_ERROR
        from importlib import resources

        text = (
            resources.files("elliptica")
            .joinpath("catalog", f"{args.dump}.json")
            .read_text(encoding="utf-8")
        )
        print(text, end="")
        return 0
    _emit({"command": "catalog", "manifolds": names}, args.out)
    _summary(f"{len(names)} bundled manifolds")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="elliptica",
        description="identity suites, theta-quotient expansions, and "
        "equivariant index computations at isolated fixed points",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--trials", type=int, default=100)
        p.add_argument("--tol", type=float, default=1e-8)
        p.add_argument("--q-order", dest="q_order", type=int, default=80)
        p.add_argument("--tau", type=_parse_tau, default=None)
        p.add_argument("--out", default=None, help="write the JSON report here")

    p = sub.add_parser("verify", help="run identity suites")
    common(p)
    p.add_argument("--suite", default="all",
                   help="'all' or a comma-separated list of suite names")
    p.add_argument("--dims", type=int, default=8,
                   help="cap on the real dimension of random torus data")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("index", help="equivariant index from fixed-point data")
    common(p)
    p.add_argument("--manifold", required=True,
                   help="path to a manifold JSON file or a catalog name")
    p.add_argument("--twist", default="none",
                   help="none | tangent_witten | a named bundle twist")
    p.add_argument("--at", default=None, help="also evaluate numerically at z")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("rigidity", help="per-coefficient constancy check")
    common(p)
    p.add_argument("--manifold", required=True)
    p.set_defaults(func=cmd_rigidity)

    p = sub.add_parser("special", help="special orders and torsion points")
    common(p)
    p.add_argument("--manifold", required=True)
    p.set_defaults(func=cmd_special)

    p = sub.add_parser("expand", help="exact series of a theta quotient")
    common(p)
    p.add_argument("--phi", type=int, choices=(1, 2, 3, 4), required=True)
    p.add_argument("--at", default=None, help="also evaluate numerically at z")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("consistency",
                       help="local vs direct evaluation at a nonspecial point")
    common(p)
    p.add_argument("--manifold", required=True)
    p.add_argument("--alpha", type=int, required=True)
    p.add_argument("--beta", type=int, required=True)
    p.add_argument("--order-k", dest="order_k", type=int, required=True)
    p.set_defaults(func=cmd_consistency)

    p = sub.add_parser("catalog", help="list or dump bundled manifolds")
    common(p)
    p.add_argument("--dump", default=None, help="print one catalog file")
    p.set_defaults(func=cmd_catalog)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ManifoldValidationError as exc:
        _summary(f"invalid input: {exc}")
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
