"""Batch command-line front end.

Every subcommand computes one machine-readable record; ``--json`` prints
it as JSON, the default renders the same record as text.  Exit codes:
0 success, 2 domain rejection (bad input value, failed verification),
1 internal error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Optional

from . import algebra, lattice, loops, realization, traces
from .algebra import Element, numeric_eval, parse_element
from .lattice import parse_chern
from .realization import parse_trace
from .theta import PrecisionExhausted, ThetaParam, parse_theta

CERT_FORMAT = "nctorus-certificate/1"


class DomainRejection(Exception):
    """User input was well-formed but outside the operation's domain."""


def _complex_pair(z: complex) -> list[float]:
    return [z.real, z.imag]


def _emit(record: dict, as_json: bool, render) -> None:
    if as_json:
        print(json.dumps(record, indent=2, sort_keys=True))
    else:
        render(record)


# ------------------------------------------------------------- subcommands


def cmd_eval(args) -> int:
    theta = parse_theta(args.theta)
    x = parse_element(args.expr)
    t2 = traces.chern_T2(x)
    t4 = traces.chern_T4(x)
    record = {
        "expr": algebra.element_to_text(x),
        "t2": t2.to_json(),
        "t4": t4.to_json(),
        "t2_numeric": [_complex_pair(numeric_eval(s, theta)) for s in t2.slots()],
        "t4_numeric": [_complex_pair(numeric_eval(s, theta)) for s in t4.slots()],
    }

    def render(rec):
        print(f"element: {rec['expr']}")
        print(f"T2 = ({'; '.join(rec['t2'])})")
        print(f"T4 = ({'; '.join(rec['t4'])})")
        print("T2 numeric:", ", ".join(f"{a:+.12g}{b:+.12g}i" for a, b in rec["t2_numeric"]))
        print("T4 numeric:", ", ".join(f"{a:+.12g}{b:+.12g}i" for a, b in rec["t4_numeric"]))

    _emit(record, args.json, render)
    return 0


def cmd_decompose(args) -> int:
    v = parse_chern(args.vector)
    res = lattice.decompose(v)
    record = {
        "vector": lattice.chern_to_text(v),
        "status": res.status,
        "coordinates": list(res.coordinates) if res.coordinates else None,
        "rational": [str(x) for x in res.rational] if res.rational else None,
    }

    def render(rec):
        print(f"vector: {rec['vector']}")
        if rec["status"] == "ok":
            print("coordinates:", rec["coordinates"])
        else:
            print(f"not in lattice ({rec['status']})")

    _emit(record, args.json, render)
    return 0


def cmd_cone(args) -> int:
    theta = parse_theta(args.theta)
    v = parse_chern(args.vector)
    decision = lattice.semiflat_membership(v, theta)
    record = decision.to_json()
    record["vector"] = lattice.chern_to_text(v)
    if decision:
        recipe = lattice.synthesis_recipe(v, theta)
        record["recipe"] = recipe.to_json()
    else:
        record["recipe"] = None

    def render(rec):
        print(f"vector: {rec['vector']}")
        if rec["member"]:
            print(f"member of the semiflat positive cone; genus {tuple(rec['genus'])}, trace {rec['trace']}")
            gens = rec["recipe"]["generators"]
            if gens:
                for g in gens:
                    print(f"  {g['count']} x genus {tuple(g['genus'])} of trace {g['trace']}")
            print(f"  flat remainder of trace {rec['recipe']['flat_trace']}")
        else:
            print(f"not a member: {rec['reason']}")

    _emit(record, args.json, render)
    return 0


def cmd_realize(args) -> int:
    theta = parse_theta(args.theta)
    t = parse_trace(args.trace)
    try:
        cert = realization.realize(args.kind, t, theta)
    except realization.RealizationError as exc:
        raise DomainRejection(f"{exc.code}: {exc}") from exc
    payload = {
        "format": CERT_FORMAT,
        "kind": args.kind,
        "theta": args.theta,
        "target": {"a": t.a, "b": t.b},
        "certificate": realization.certificate_to_json(cert),
    }
    out = json.dumps(payload, indent=2, sort_keys=True)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out + "\n")
        if not args.json:
            print(f"certificate written to {args.output}")
    else:
        print(out)
    return 0


def cmd_verify(args) -> int:
    with open(args.certificate, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != CERT_FORMAT:
        raise DomainRejection(f"unsupported certificate format {payload.get('format')!r}")
    theta = parse_theta(args.theta if args.theta else payload["theta"])
    cert = realization.certificate_from_json(payload["certificate"])
    report = realization.verify_certificate(cert, theta)
    record = report.to_json()
    record["kind"] = payload.get("kind")

    def render(rec):
        if rec["ok"]:
            print("certificate verifies")
        else:
            path, msg = rec["failures"][0]
            print(f"verification FAILED at {path}: {msg}")

    _emit(record, args.json, render)
    return 0 if report.ok else 2


def cmd_pr_build(args) -> int:
    theta = parse_theta(args.theta)
    try:
        e = loops.pr_build(
            args.r,
            args.s,
            theta,
            flip_symmetric=args.flip,
            n=args.grid,
            eps=args.eps,
            offset=args.offset,
        )
    except (loops.AlphaOutOfRange, loops.InvalidBumpWidth, loops.ResidualExceeded) as exc:
        raise DomainRejection(str(exc)) from exc
    gates = loops.projection_gates(
        e, (args.r * theta.value + args.s) if args.flip else (args.r * theta.value + args.s) % 1.0,
        args.flip,
    )
    report = loops.loop_invariants(e, theta, args.r)
    record = {
        "r": args.r,
        "s": args.s,
        "flip_symmetric": args.flip,
        "grid": e.n,
        "alpha": (args.r * theta.value + args.s) if args.flip else (args.r * theta.value + args.s) % 1.0,
        "residuals": {
            "square": gates.square_residual,
            "adjoint": gates.adjoint_residual,
            "flip": gates.flip_residual,
            "trace": gates.trace_error,
        },
        "invariants": report.to_json(),
    }
    if args.save_element:
        with open(args.save_element, "w", encoding="utf-8") as fh:
            json.dump(e.to_json(), fh)
        record["element_file"] = args.save_element

    def render(rec):
        print(f"projection over W = U^{rec['r']}, alpha = {rec['alpha']:.12f}, grid {rec['grid']}")
        res = rec["residuals"]
        print(
            f"residuals: |e^2-e| = {res['square']:.2e}, |e*-e| = {res['adjoint']:.2e}"
            + (f", |flip(e)-e| = {res['flip']:.2e}" if res["flip"] is not None else "")
        )
        inv = rec["invariants"]
        print(f"tau = {inv['tau']:.12f}")
        print("phi (rounded):", inv["phi_rounded"])

    _emit(record, args.json, render)
    return 0


def _selftest_suites(rng: random.Random):
    """(name, callable) pairs; each returns True on success."""
    from fractions import Fraction

    from .algebra import ONE, apply_automorphism, canonical_trace

    def random_element(max_terms=4, span=3):
        x = Element.zero()
        for _ in range(rng.randint(1, max_terms)):
            coef = algebra.GaussRational(
                Fraction(rng.randint(-3, 3), rng.choice((1, 2, 3))),
                Fraction(rng.randint(-3, 3), rng.choice((1, 2, 3))),
            )
            x = x + Element.monomial(
                rng.randint(-span, span), rng.randint(-span, span),
                algebra.PhaseScalar({rng.randint(-4, 4): coef}),
            )
        return x

    def ring_laws():
        for _ in range(120):
            x, y, z = (random_element() for _ in range(3))
            if (x * y) * z != x * (y * z):
                return False
            if x * (y + z) != x * y + x * z:
                return False
            if x * ONE != x or ONE * x != x:
                return False
        return True

    def star_and_automorphisms():
        for _ in range(120):
            x, y = random_element(), random_element()
            if (x * y).star() != y.star() * x.star():
                return False
            if x.star().star() != x:
                return False
            s2 = apply_automorphism("sigma", apply_automorphism("sigma", x))
            if s2 != apply_automorphism("flip", x):
                return False
            sg = apply_automorphism("sigma", apply_automorphism("gamma", x))
            gs = apply_automorphism("gamma", apply_automorphism("sigma", x))
            if sg != gs:
                return False
        return True

    def trace_laws():
        for _ in range(120):
            x, y = random_element(), random_element()
            if canonical_trace(x * y) != canonical_trace(y * x):
                return False
            if canonical_trace(apply_automorphism("sigma", x)) != canonical_trace(x):
                return False
        return True

    def relations_grid():
        for m in range(-4, 5):
            for n in range(-4, 5):
                if not traces.relation_check(Element.monomial(m, n)):
                    return False
        return True

    def twisted_trace():
        for m1 in range(-3, 4):
            for n1 in range(-3, 4):
                x = Element.monomial(m1, n1)
                fx = apply_automorphism("flip", x)
                for m2 in range(-3, 4):
                    for n2 in range(-3, 4):
                        y = Element.monomial(m2, n2)
                        fy = apply_automorphism("flip", y)
                        for ij in traces.PHI_INDICES:
                            if traces.phi_eval(ij, x * y) != traces.phi_eval(ij, fy * x):
                                return False
        return True

    def lattice_roundtrip():
        for _ in range(100):
            coords = lattice.K0Coordinates(*(rng.randint(-20, 20) for _ in range(9)))
            res = lattice.decompose(lattice.recompose(coords))
            if not res or res.coordinates != coords:
                return False
        return lattice.basis_rank() == 9

    def realization_suite():
        theta = ThetaParam.preset("golden")
        for kind, mult, hi in (
            ("cyclic", 1, Fraction(1, 4)),
            ("semicyclic", 1, Fraction(1, 2)),
            ("flat", 4, Fraction(1)),
            ("semiflat", 2, Fraction(1)),
            ("fourier_invariant", 1, Fraction(1)),
        ):
            done = 0
            while done < 10:
                b = mult * rng.randint(1, 12)
                shift = theta.floor_linear(b)
                a = -(shift // mult) * mult
                t = realization.TraceValue(a, b)
                if not (t.in_subgroup(mult) and t.in_open_interval(theta, 0, hi)):
                    continue
                cert = realization.realize(kind, t, theta)
                if not realization.verify_certificate(cert, theta):
                    return False
                done += 1
        return True

    def embedding_grid():
        for m in range(-4, 5):
            for n in range(-4, 5):
                if (m, n) == (0, 0):
                    continue
                if realization._check_embedding(m, n) is not None:
                    return False
        return True

    return (
        ("ring-laws", ring_laws),
        ("star-and-automorphisms", star_and_automorphisms),
        ("trace-laws", trace_laws),
        ("relation-grid", relations_grid),
        ("twisted-trace-grid", twisted_trace),
        ("lattice-roundtrip", lattice_roundtrip),
        ("realization-verify", realization_suite),
        ("embedding-grid", embedding_grid),
    )


def cmd_selftest(args) -> int:
    rng = random.Random(20170)
    results = {}
    ok = True
    for name, suite in _selftest_suites(rng):
        passed = bool(suite())
        results[name] = passed
        ok &= passed
        if not args.json:
            print(f"{'PASS' if passed else 'FAIL'}  {name}")
    if args.json:
        print(json.dumps({"ok": ok, "suites": results}, indent=2, sort_keys=True))
    return 0 if ok else 1


# ------------------------------------------------------------------- parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nctorus",
        description="Exact and numeric toolkit for rotation-algebra invariants.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, theta=True):
        if theta:
            p.add_argument("--theta", default="golden",
                           help="angle: preset (golden, sqrt2), cf:a1,a2,..., or a decimal")
        p.add_argument("--json", action="store_true", help="emit the JSON record only")

    p = sub.add_parser("eval", help="evaluate T2/T4 of an element expression")
    add_common(p)
    p.add_argument("--expr", required=True, help="element text, e.g. 'L^4 U^2 V^-1 + 1/2'")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("decompose", help="integer coordinates of a character vector")
    add_common(p, theta=False)
    p.add_argument("--vector", required=True, help="six slots, e.g. '(2t;0,0;1,1,2)'")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("cone", help="semiflat positive-cone membership, genus and recipe")
    add_common(p)
    p.add_argument("--vector", required=True)
    p.set_defaults(func=cmd_cone)

    p = sub.add_parser("realize", help="build a trace-realization certificate")
    add_common(p)
    p.add_argument("--kind", required=True, choices=realization.KINDS)
    p.add_argument("--trace", required=True, help="target trace, e.g. '8t-4'")
    p.add_argument("--output", "-o", help="write the certificate JSON to this path")
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("verify", help="replay a certificate file")
    p.add_argument("--theta", default=None, help="override the angle stored in the file")
    p.add_argument("--json", action="store_true", help="emit the JSON record only")
    p.add_argument("certificate", help="path to a certificate JSON file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("pr-build", help="numeric Powers-Rieffel projection and invariants")
    add_common(p)
    p.add_argument("-r", type=int, required=True)
    p.add_argument("-s", type=int, required=True)
    p.add_argument("--flip", action="store_true", help="flip-symmetric build (alpha in (1/2,1))")
    p.add_argument("--grid", type=int, default=loops.DEFAULT_GRID)
    p.add_argument("--eps", type=float, default=None, help="ramp width (default min(a,1-a)/4)")
    p.add_argument("--offset", type=float, default=0.0)
    p.add_argument("--tol", type=float, default=None, help="reserved; gates are fixed")
    p.add_argument("--save-element", help="also write the loop element JSON here")
    p.set_defaults(func=cmd_pr_build)

    p = sub.add_parser("selftest", help="run the exact identity suites")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        DomainRejection,
        algebra.ElementParseError,
        lattice.ChernParseError,
        realization.CertificateFormatError,
        PrecisionExhausted,
        FileNotFoundError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - the contract maps crashes to exit 1
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
