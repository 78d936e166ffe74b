"""Command-line front end.

Subcommands: linear-abel, linear-classify, solve, iterate, classify,
probe, numrange, dissipative, gallery, region-raster.  Map inputs come
either from --map (inline JSON or a file path) or from --gallery with
override flags.  Reports are JSON (CSV where noted) and embed the full
resolved configuration, so identical invocations produce byte-identical
output.  Exit codes: 0 success, 1 input error, 2 verification or audit
failure (e.g. predicted convergence contradicted by the iteration).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import dissipativity, gallery, jsonio, linear, maps, nonlinear
from .errors import AbelavError, AuditFailure, InputError

__all__ = ["main"]

GALLERY_NAMES = ("b2", "fisher-kpp")


def parse_complex(text: str) -> complex:
    """Parse a complex scalar in 'a+bi' notation (also plain reals)."""
    cleaned = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(cleaned)
    except ValueError as exc:
        raise InputError(f"cannot parse complex scalar {text!r}") from exc


def parse_vector(text: str) -> np.ndarray:
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise InputError("empty vector")
    return np.array([parse_complex(p) for p in parts], dtype=np.complex128)


def parse_floats(text: str) -> list:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise InputError(f"cannot parse float list {text!r}") from exc


class _Parser(argparse.ArgumentParser):
    """argparse maps usage errors to exit code 1 (2 is reserved)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit_(1, f"error: {message}")


class SystemExit_(Exception):
    def __init__(self, code, message=""):
        super().__init__(message)
        self.code = code


def _load_json_arg(text: str) -> dict:
    """Inline JSON if it looks like an object, otherwise a file path."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            return json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise InputError(f"inline JSON does not parse: {exc}") from exc
    if not os.path.exists(stripped):
        raise InputError(f"no such file: {stripped}")
    with open(stripped) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{stripped} does not parse as JSON: {exc}") from exc


def _gallery_spec(args) -> dict:
    name = args.gallery.replace("_", "-")
    if name == "b2":
        lam = parse_complex(args.lam) if args.lam is not None else 1 + 0j
        spec = {
            "kind": "b2_example",
            "lambda_re": lam.real,
            "lambda_im": lam.imag,
            "epsilon": args.epsilon if args.epsilon is not None else 0.5,
        }
    elif name == "fisher-kpp":
        spec = {
            "kind": "fisher_kpp",
            "n_points": args.n_points if args.n_points is not None else 64,
            "half_width": args.half_width if args.half_width is not None else 10.0,
            "b": args.b if args.b is not None else 0.4,
            "a_bound": args.a_bound if args.a_bound is not None else 1.0,
        }
    else:
        raise InputError(
            f"unknown gallery member {args.gallery!r}; available: "
            + ", ".join(GALLERY_NAMES)
        )
    return spec


def _resolve_map(args):
    """Return (map_spec_dict, HoloMap) from --map or --gallery flags."""
    if getattr(args, "map", None):
        spec = _load_json_arg(args.map)
    elif getattr(args, "gallery", None):
        spec = _gallery_spec(args)
    else:
        raise InputError("provide a map via --map or --gallery")
    return spec, jsonio.map_from_spec(spec)


def _emit(args, text: str) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report(args, command: str, config: dict, result) -> None:
    payload = {"command": command, "config": config, "result": result}
    _emit(args, jsonio.dumps(payload))


def _add_map_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--map", help="map spec: inline JSON or a file path")
    p.add_argument(
        "--gallery", help="gallery member name: " + ", ".join(GALLERY_NAMES)
    )
    p.add_argument("--lambda", dest="lam", help="b2 override: lambda, 'a+bi'")
    p.add_argument("--epsilon", type=float, help="b2 override: epsilon in (0,1)")
    p.add_argument("--n-points", type=int, help="fisher-kpp override: grid size")
    p.add_argument("--half-width", type=float, help="fisher-kpp override: L")
    p.add_argument("--b", type=float, help="fisher-kpp override: b")
    p.add_argument("--a-bound", type=float, help="fisher-kpp override: a bound")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--output", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="abelav", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("linear-abel", help="Abel average of a matrix")
    p.add_argument("--matrix", required=True, help="matrix JSON (inline or file)")
    p.add_argument("--alpha", type=float, required=True)
    _add_common(p)

    p = sub.add_parser("linear-classify", help="power-convergence classification")
    p.add_argument("--matrix", required=True)
    _add_common(p)

    p = sub.add_parser("solve", help="evaluate the Abel average at a point")
    _add_map_flags(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--x", required=True, help="comma-separated complex vector")
    _add_common(p)

    p = sub.add_parser("iterate", help="iterate the average to a retraction")
    _add_map_flags(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--max-n", type=int, default=500)
    p.add_argument("--trace-tol", type=float, default=1e-10)
    p.add_argument("--trace-csv", help="also dump the orbit as CSV here")
    _add_common(p)

    p = sub.add_parser("classify", help="spectral convergence prediction")
    _add_map_flags(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--omega", type=float, required=True)
    _add_common(p)

    p = sub.add_parser("probe", help="pseudo-contractivity probe over alphas")
    _add_map_flags(p)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--alphas", required=True, help="comma-separated alphas")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--shell-radius", type=float, default=0.999)
    _add_common(p)

    p = sub.add_parser("numrange", help="numerical range / radius estimate")
    _add_map_flags(p)
    p.add_argument("--s-values", help="comma-separated ladder in (0,1)")
    p.add_argument("--samples", type=int, default=2000)
    _add_common(p)

    p = sub.add_parser("dissipative", help="omega-dissipativity certification")
    _add_map_flags(p)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--epsilon-shell", type=float, default=0.1)
    p.add_argument("--samples", type=int, default=10000)
    _add_common(p)

    p = sub.add_parser("gallery", help="emit gallery map specs by name")
    p.add_argument("name", nargs="?", help="b2 or fisher-kpp; omit to list")
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--n-points", type=int)
    p.add_argument("--half-width", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--a-bound", type=float)
    _add_common(p)

    p = sub.add_parser(
        "region-raster",
        help="CSV sweep over alpha: spectral prediction vs empirical orbit",
    )
    _add_map_flags(p)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--alpha-min", type=float, required=True)
    p.add_argument("--alpha-max", type=float, required=True)
    p.add_argument("--resolution", type=int, required=True)
    p.add_argument("--x", required=True, help="fixed probe point")
    p.add_argument("--max-n", type=int, default=300)
    p.add_argument("--trace-tol", type=float, default=1e-9)
    _add_common(p)

    return parser


def _cmd_linear_abel(args) -> int:
    T = jsonio.matrix_from_json(_load_json_arg(args.matrix))
    A = linear.abel_linear(T, args.alpha)
    _report(
        args,
        "linear-abel",
        {"alpha": args.alpha, "matrix": jsonio.matrix_to_json(T), "seed": args.seed},
        {"abel_average": jsonio.matrix_to_json(A)},
    )
    return 0


def _cmd_linear_classify(args) -> int:
    T = jsonio.matrix_from_json(_load_json_arg(args.matrix))
    report = linear.classify_linear(T)
    _report(
        args,
        "linear-classify",
        {"matrix": jsonio.matrix_to_json(T), "seed": args.seed},
        jsonio.report_to_json(report),
    )
    return 0


def _cmd_solve(args) -> int:
    spec, h = _resolve_map(args)
    x = parse_vector(args.x)
    cfg = nonlinear.AbelConfig(alpha=args.alpha, omega=args.omega)
    y = nonlinear.solve_abel(h, cfg, x)
    residual = float(
        np.linalg.norm(y - args.alpha * maps.eval_map(h, y) - (1 - args.alpha * args.omega) * x)
    )
    _report(
        args,
        "solve",
        {
            "alpha": args.alpha,
            "omega": args.omega,
            "map_spec": spec,
            "x": jsonio.vector_to_json(x),
            "seed": args.seed,
        },
        {"y": jsonio.vector_to_json(y), "residual": residual},
    )
    return 0


def _cmd_iterate(args) -> int:
    spec, h = _resolve_map(args)
    x = parse_vector(args.x)
    cfg = nonlinear.AbelConfig(alpha=args.alpha, omega=args.omega)
    verdict = nonlinear.classify_convergence(h, cfg) if h.fixes_origin else None
    trace = nonlinear.iterate_to_retraction(
        h, cfg, x, max_n=args.max_n, trace_tol=args.trace_tol
    )
    audits = None
    if trace.verdict == "converged":
        lim = trace.limit
        audits = {
            "idempotence_defect": float(
                np.linalg.norm(nonlinear.solve_abel(h, cfg, lim) - lim)
            ),
            "membership_defect": float(
                np.linalg.norm(args.omega * lim - maps.eval_map(h, lim))
            ),
        }
    if args.trace_csv:
        jsonio.write_trace_csv(trace, args.trace_csv)
    result = {
        "alpha": args.alpha,
        "omega": args.omega,
        "verdict": trace.verdict,
        "limit": jsonio.vector_to_json(trace.limit) if trace.limit is not None else None,
        "steps": trace.steps,
        "audits": audits,
        "predicted_convergence": (
            verdict.predicted_convergence if verdict is not None else None
        ),
    }
    _report(
        args,
        "iterate",
        {
            "alpha": args.alpha,
            "omega": args.omega,
            "map_spec": spec,
            "x": jsonio.vector_to_json(x),
            "max_n": args.max_n,
            "trace_tol": args.trace_tol,
            "seed": args.seed,
        },
        result,
    )
    if verdict is not None and verdict.predicted_convergence and trace.verdict != "converged":
        sys.stderr.write(
            "verification failure: spectral prediction says the iterates "
            f"converge but the orbit finished '{trace.verdict}'\n"
        )
        return 2
    return 0


def _cmd_classify(args) -> int:
    spec, h = _resolve_map(args)
    cfg = nonlinear.AbelConfig(alpha=args.alpha, omega=args.omega)
    verdict = nonlinear.classify_convergence(h, cfg)
    _report(
        args,
        "classify",
        {"alpha": args.alpha, "omega": args.omega, "map_spec": spec, "seed": args.seed},
        jsonio.report_to_json(verdict),
    )
    return 0


def _cmd_probe(args) -> int:
    spec, h = _resolve_map(args)
    alphas = parse_floats(args.alphas)
    results = nonlinear.pseudo_contractive_probe(
        h,
        args.omega,
        alphas,
        samples=args.samples,
        seed=args.seed,
        shell_radius=args.shell_radius,
    )
    rows = [
        {
            "alpha": a,
            "self_map": ok,
            "witness": jsonio.vector_to_json(w) if w is not None else None,
        }
        for a, ok, w in results
    ]
    _report(
        args,
        "probe",
        {
            "omega": args.omega,
            "alphas": alphas,
            "samples": args.samples,
            "shell_radius": args.shell_radius,
            "map_spec": spec,
            "seed": args.seed,
        },
        {"probes": rows},
    )
    return 0


def _cmd_numrange(args) -> int:
    spec, h = _resolve_map(args)
    s_values = parse_floats(args.s_values) if args.s_values else None
    if args.format == "csv":
        ladder = s_values if s_values is not None else list(dissipativity.S_LADDER)
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["s", "re", "im"])
        for i, s in enumerate(ladder):
            vals = dissipativity.numerical_range_samples(
                h, s, args.samples, seed=args.seed + i
            )
            for z in vals:
                writer.writerow([repr(float(s)), repr(z.real), repr(z.imag)])
        _emit(args, buf.getvalue())
        return 0
    est = dissipativity.numerical_radius(
        h, s_values=s_values, samples=args.samples, seed=args.seed
    )
    _report(
        args,
        "numrange",
        {
            "s_values": est.s_values.tolist(),
            "samples": args.samples,
            "map_spec": spec,
            "seed": args.seed,
        },
        jsonio.report_to_json(est),
    )
    return 0


def _cmd_dissipative(args) -> int:
    spec, h = _resolve_map(args)
    report = dissipativity.omega_dissipative_estimate(
        h,
        args.omega,
        epsilon_shell=args.epsilon_shell,
        samples=args.samples,
        seed=args.seed,
    )
    _report(
        args,
        "dissipative",
        {
            "omega": args.omega,
            "epsilon_shell": args.epsilon_shell,
            "samples": args.samples,
            "map_spec": spec,
            "seed": args.seed,
        },
        jsonio.report_to_json(report),
    )
    return 0


def _cmd_gallery(args) -> int:
    if not args.name:
        _emit(args, jsonio.dumps({"gallery": list(GALLERY_NAMES)}))
        return 0
    args.gallery = args.name
    spec = _gallery_spec(args)
    jsonio.map_from_spec(spec)  # validate before emitting
    _emit(args, jsonio.dumps(spec))
    return 0


def _cmd_region_raster(args) -> int:
    spec, h = _resolve_map(args)
    if args.resolution < 2:
        raise InputError("resolution must be at least 2")
    x = parse_vector(args.x)
    width = (args.alpha_max - args.alpha_min) / args.resolution
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["alpha", "predicted", "empirical", "disagreement_flag"])
    for i in range(args.resolution):
        alpha = args.alpha_min + (i + 0.5) * width
        try:
            cfg = nonlinear.AbelConfig(alpha=alpha, omega=args.omega)
            verdict = nonlinear.classify_convergence(h, cfg)
            trace = nonlinear.iterate_to_retraction(
                h, cfg, x, max_n=args.max_n, trace_tol=args.trace_tol
            )
            predicted = verdict.predicted_convergence
            empirical = trace.verdict
            flag = predicted != (empirical == "converged")
            writer.writerow(
                [repr(alpha), str(predicted).lower(), empirical, str(flag).lower()]
            )
        except AbelavError as exc:
            writer.writerow([repr(alpha), "error", f"error:{type(exc).__name__}", "true"])
    _emit(args, buf.getvalue())
    return 0


_HANDLERS = {
    "linear-abel": _cmd_linear_abel,
    "linear-classify": _cmd_linear_classify,
    "solve": _cmd_solve,
    "iterate": _cmd_iterate,
    "classify": _cmd_classify,
    "probe": _cmd_probe,
    "numrange": _cmd_numrange,
    "dissipative": _cmd_dissipative,
    "gallery": _cmd_gallery,
    "region-raster": _cmd_region_raster,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _HANDLERS[args.command](args)
    except SystemExit_ as exc:
        if str(exc):
            sys.stderr.write(str(exc) + "\n")
        return exc.code
    except InputError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return 1
    except ValueError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return 1
    except AuditFailure as exc:
        sys.stderr.write(f"audit failure [{exc.clause}]: {exc}\n")
        return 2
    except AbelavError as exc:
        sys.stderr.write(f"verification failure [{type(exc).__name__}]: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
