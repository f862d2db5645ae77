"""Command-line interface.

One-shot subcommands wrapping the library, each emitting a JSON result
envelope (or a text rendering of it).  Big integers are serialized as
decimal strings so nothing is squeezed through a 53-bit JSON number.

Exit codes: 0 success, 1 verification-suite failure, 2 input validation,
3 rounding failure, 4 conductor condition violated, 5 precision exhausted,
6 split prime, 7 ratio violation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

from . import __version__, invariants, modfunc, quadforms, rayclass, verify
from ._kernels import BACKEND
from .errors import (
    AmbiguousRounding,
    ConditionViolated,
    ExcludedField,
    NotFundamental,
    PrecisionExhausted,
    RatioViolation,
    RoundingFailed,
    SiegelInvError,
    SplitPrime,
)
from .galois import UNBOUNDED, w_cosets_ring

SCHEMA_VERSION = "1"

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_ROUNDING = 3
EXIT_CONDITION = 4
EXIT_PRECISION = 5
EXIT_SPLIT_PRIME = 6
EXIT_RATIO = 7

_ERROR_EXITS = (
    (RoundingFailed, EXIT_ROUNDING),
    (AmbiguousRounding, EXIT_ROUNDING),
    (ConditionViolated, EXIT_CONDITION),
    (PrecisionExhausted, EXIT_PRECISION),
    (SplitPrime, EXIT_SPLIT_PRIME),
    (RatioViolation, EXIT_RATIO),
    (NotFundamental, EXIT_BAD_INPUT),
    (ExcludedField, EXIT_BAD_INPUT),
)

MIN_PREC, MAX_PREC = 64, 1 << 20


def big(value: int) -> str:
    """Decimal-string form used for every possibly-large integer."""
    return str(int(value))


def num(value) -> str:
    """Full-precision decimal string of an mpfr."""
    digits = max(20, int(value.precision * 0.302) + 2)
    return value.__format__(f".{digits}g")


def cnum(value) -> dict:
    return {"re": num(value.real), "im": num(value.imag)}


def rational(value) -> str:
    return str(value)


def matrix_entries(entries) -> list[list[str]]:
    a, b, c, d = entries
    return [[big(a), big(b)], [big(c), big(d)]]


def envelope(command: str, inputs: dict, outputs: dict, started: float,
             precision_used: int | None, warnings: list[str]) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "outputs": outputs,
        "timing_ms": round((time.perf_counter() - started) * 1000.0, 3),
        "precision_used": precision_used,
        "warnings": warnings,
    }


# ----------------------------- caching -------------------------------------


def cache_key(command: str, inputs: dict, precision: int | None) -> str:
    payload = json.dumps(
        {"command": command, "inputs": inputs, "precision": precision,
         "version": __version__},
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()


def cache_lookup(cache_dir: str | None, key: str) -> dict | None:
    if not cache_dir:
        return None
    path = os.path.join(cache_dir, key + ".json")
    if not os.path.exists(path):
        return None
    with open(path) as fh:
        return json.load(fh)


def cache_store(cache_dir: str | None, key: str, payload: dict) -> None:
    if not cache_dir:
        return
    os.makedirs(cache_dir, exist_ok=True)
    path = os.path.join(cache_dir, key + ".json")
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(payload, fh, sort_keys=True)
    os.replace(tmp, path)


# ----------------------------- commands ------------------------------------


def cmd_forms(args) -> tuple[dict, int | None, list[str]]:
    field = quadforms.make_field(args.dk)
    n = args.N
    forms = quadforms.reduced_forms(field)
    out = {
        "d_k": args.dk,
        "b_theta": field.b_theta,
        "c_theta": field.c_theta,
        "class_number": field.class_number,
        "forms": [],
    }
    for form in forms:
        row = {"a": form.a, "b": form.b, "c": form.c,
               "cm_point_im": num(quadforms.cm_point(form, field).value(args.prec).imag)}
        if n:
            row["beta_matrix"] = matrix_entries(quadforms.beta_q(form, field, n))
        out["forms"].append(row)
    warnings = []
    if n:
        data = quadforms.degree_data(field, n)
        out["degree_data"] = {
            "phi_ideal": big(data.phi_ideal),
            "w_nok": data.w_nok,
            "ray_over_hilbert": big(data.ray_over_hilbert),
            "ring_over_hilbert": big(data.ring_over_hilbert),
            "ring_over_k": big(data.ring_over_k),
        }
        if n == 2:
            warnings.append("w(N*O_K) = 2 adopted for N = 2 (-1 is congruent to 1 mod 2)")
        out["scalar_cosets"] = [matrix_entries(m.entries) for m in w_cosets_ring(field, n)]
    return out, None, warnings


def cmd_bound(args) -> tuple[dict, int | None, list[str]]:
    prec = args.prec or 192
    value = modfunc.bound_max_conductor(args.dk, prec)
    return {"d_k": args.dk, "max_conductor": big(value)}, prec, []


def cmd_minpoly(args) -> tuple[dict, int | None, list[str]]:
    field = quadforms.make_field(args.dk)
    report = invariants.minimal_polynomial(
        field, args.N, prec=args.prec, force=args.force, threads=args.threads
    )
    poly = report.polynomial
    out = {
        "degree": poly.degree,
        "coefficients": [big(c) for c in poly.coefficients],
        "max_residual": num(poly.max_residual),
        "is_unit": report.is_unit,
        "is_squarefree": poly.is_squarefree(),
        "normal_basis_exponent": (
            None if report.normal_basis_exponent is UNBOUNDED
            else report.normal_basis_exponent
        ),
        "value": cnum(report.value),
        "conjugates": [
            {"gamma": matrix_entries(gamma), "form": list(form), "value": cnum(v)}
            for (gamma, form), v in zip(report.labels, report.conjugates)
        ],
    }
    warnings = []
    if args.force and not modfunc.condition_holds(field.d_k, args.N):
        warnings.append("computed outside the proven conductor region (--force)")
    return out, poly.precision_used, warnings


def cmd_normal_basis(args) -> tuple[dict, int | None, list[str]]:
    field = quadforms.make_field(args.dk)
    report = invariants.normal_basis_certificate(field, args.N, args.prec,
                                                 threads=args.threads)
    out = {
        "ratios": [num(r) for r in report.ratios],
        "max_ratio": num(max(report.ratios)) if report.ratios else None,
        "normal_basis_exponent": report.normal_basis_exponent,
        "conjugate_count": len(report.conjugates),
        "inverse_value": cnum(report.value),
        "direct_polynomial": [big(c) for c in report.polynomial.coefficients],
    }
    return out, args.prec, []


def cmd_delta(args) -> tuple[dict, int | None, list[str]]:
    field = quadforms.make_field(args.dk)
    value = invariants.delta_ring_class_invariant(field, args.p, args.l, args.prec)
    residual = invariants.delta_consistency(field, args.p, args.l, args.prec)
    return {
        "value": cnum(value),
        "consistency_residual": num(residual),
        "kronecker_symbol": quadforms.kronecker(args.dk, args.p),
    }, args.prec, []


def cmd_ray(args) -> tuple[dict, int | None, list[str]]:
    field = quadforms.make_field(args.dk)
    gp = rayclass.GammaParams(p=args.p, m=args.m, field=field)
    alpha, beta = rayclass.gamma_generators(gp)
    rows = []
    for label in rayclass.labels(gp.p):
        x, y = rayclass.fixed_field_solution(label, gp)
        nb = rayclass.normal_basis_value(label, gp, args.prec)
        rows.append({
            "label": list(label),
            "x": x,
            "y": big(y),
            "y_reduced": nb.y,
            "own_exponent": rayclass.gamma_action_exponents(label, x, y, gp),
            "value": cnum(nb.value),
        })
    full = rayclass.normal_basis_value(rayclass.FULL, gp, args.prec)
    return {
        "alpha": matrix_entries(alpha),
        "beta": matrix_entries(beta),
        "element_count": len(rayclass.gamma_elements(gp)),
        "solutions": rows,
        "full_tower_value": cnum(full.value),
    }, args.prec, []


def cmd_hensel(args) -> tuple[dict, int | None, list[str]]:
    field = quadforms.make_field(args.dk)
    hp = rayclass.HenselParams(p=args.p, m=args.m, n=args.n, ell=args.l)
    beta0 = rayclass.hensel_beta0(hp, field)
    rows = rayclass.verify_contraction(beta0, hp)
    orbit = rayclass.g_theta_product(hp, field, args.prec)
    det = beta0[0] * beta0[3] - beta0[1] * beta0[2]
    return {
        "beta0": matrix_entries(beta0),
        "det": big(det),
        "contraction": [
            {k: (big(v) if isinstance(v, int) and k == "modulus" else v)
             for k, v in row.items()}
            for row in rows
        ],
        "orbit_indices": [[rational(i.r1), rational(i.r2)] for i in orbit.index_orbit],
        "orbit_value": cnum(orbit.value),
        "shift_ratio": cnum(orbit.ratio),
        "predicted_ratio": cnum(orbit.predicted_ratio),
        "ratio_power_error": num(orbit.ratio_power_error),
    }, args.prec, []


def cmd_verify(args) -> tuple[dict, int | None, list[str]]:
    results = verify.run_suite(args.suite)
    out = {
        "suite": args.suite,
        "checks": [{"name": r.name, "ok": r.ok, "detail": r.detail} for r in results],
        "passed": all(r.ok for r in results),
    }
    return out, None, []


# ----------------------------- plumbing ------------------------------------


def _render_text(env: dict) -> str:
    lines = [f"{env['command']}  ({env['timing_ms']} ms, "
             f"precision {env['precision_used']}, backend {BACKEND})"]
    lines.append(json.dumps(env["outputs"], indent=2, sort_keys=True))
    for w in env["warnings"]:
        lines.append(f"warning: {w}")
    return "\n".join(lines)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="siegelinv",
        description="Class-field invariants of imaginary quadratic fields "
                    "from singular Siegel values",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--cache-dir", default=os.environ.get("CACHE_DIR"))
    sub = parser.add_subparsers(dest="command", required=True)

    def add_parser(name, **kwargs):
        return sub.add_parser(name, parents=[common], **kwargs)

    default_prec = int(os.environ.get("DEFAULT_PRECISION_BITS", "512"))

    p = add_parser("forms", help="reduced forms, beta matrices, degree data")
    p.add_argument("--dk", type=int, required=True)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--prec", type=int, default=default_prec)
    p.set_defaults(func=cmd_forms)

    p = add_parser("bound", help="largest admissible conductor")
    p.add_argument("--dk", type=int, required=True)
    p.add_argument("--prec", type=int, default=None)
    p.set_defaults(func=cmd_bound)

    p = add_parser("minpoly", help="exact minimal polynomial of the invariant")
    p.add_argument("--dk", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--prec", type=int, default=default_prec)
    p.add_argument("--force", action="store_true",
                   help="compute outside the proven conductor region")
    p.add_argument("--threads", type=int, default=os.cpu_count())
    p.set_defaults(func=cmd_minpoly)

    p = add_parser("normal-basis", help="normal-basis magnitude certificate")
    p.add_argument("--dk", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--prec", type=int, default=default_prec)
    p.add_argument("--threads", type=int, default=os.cpu_count())
    p.set_defaults(func=cmd_normal_basis)

    p = add_parser("delta", help="discriminant-quotient invariant (prime power)")
    p.add_argument("--dk", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--l", type=int, default=1)
    p.add_argument("--prec", type=int, default=default_prec)
    p.set_defaults(func=cmd_delta)

    p = add_parser("ray", help="tower generators, fixed-field solutions, values")
    p.add_argument("--dk", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--prec", type=int, default=default_prec)
    p.set_defaults(func=cmd_ray)

    p = add_parser("hensel", help="contracting SL2(Z) lift and orbit product")
    p.add_argument("--dk", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--l", type=int, default=1)
    p.add_argument("--prec", type=int, default=default_prec)
    p.set_defaults(func=cmd_hensel)

    p = add_parser("verify", help="run a named verification suite")
    p.add_argument("--suite", default="all",
                   choices=("identities", "frobenius", "forms", "paper-example", "all"))
    p.set_defaults(func=cmd_verify)

    return parser


def _inputs_of(args) -> dict:
    skip = {"func", "command", "format", "cache_dir"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    prec = getattr(args, "prec", None)
    if prec is not None and not MIN_PREC <= prec <= MAX_PREC:
        print(f"error: --prec must be in [{MIN_PREC}, {MAX_PREC}]", file=sys.stderr)
        return EXIT_BAD_INPUT

    started = time.perf_counter()
    inputs = _inputs_of(args)
    key = cache_key(args.command, inputs, prec)
    warnings: list[str] = []

    cached = cache_lookup(args.cache_dir, key)
    if cached is not None:
        outputs = cached["outputs"]
        precision_used = cached["precision_used"]
        warnings = cached["warnings"] + ["served from cache"]
        exit_code = EXIT_OK if cached.get("exit_code", 0) == 0 else cached["exit_code"]
    else:
        try:
            outputs, precision_used, warnings = args.func(args)
            exit_code = EXIT_OK
        except SiegelInvError as exc:
            for klass, code in _ERROR_EXITS:
                if isinstance(exc, klass):
                    print(f"error: {exc}", file=sys.stderr)
                    return code
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_BAD_INPUT
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_BAD_INPUT
        cache_store(args.cache_dir, key, {
            "outputs": outputs,
            "precision_used": precision_used,
            "warnings": warnings,
            "exit_code": exit_code,
        })

    env = envelope(args.command, inputs, outputs, started, precision_used, warnings)
    if args.format == "json":
        print(json.dumps(env, indent=2, sort_keys=True))
    else:
        print(_render_text(env))
    if args.command == "verify" and not outputs.get("passed", False):
        return EXIT_VERIFY_FAILED
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
