"""JSON and CSV wire formats for matrices, maps, and reports.

Matrices travel as {"dim": n, "re": [[...]], "im": [[...]]}; vectors as
lists of [re, im] pairs; map specifications as {"kind": ..., ...} with the
kinds "linear", "polynomial", "affine_perturbation", "b2_example" and
"fisher_kpp".  Serialisation is deterministic (sorted keys), so identical
inputs produce byte-identical reports.
"""

from __future__ import annotations

import csv
import json
from typing import Optional

import numpy as np

from . import gallery, maps
from .dissipativity import DissipativityReport, NumericalRadiusEstimate
from .errors import InputError
from .linear import SpectralReport, as_complex_matrix
from .maps import BoundednessScan, HoloMap
from .nonlinear import IterationTrace, RegionVerdict

__all__ = [
    "matrix_to_json",
    "matrix_from_json",
    "vector_to_json",
    "vector_from_json",
    "map_from_spec",
    "map_spec_normalize",
    "report_to_json",
    "dumps",
    "write_trace_csv",
]


def matrix_to_json(a) -> dict:
    m = as_complex_matrix(a)
    return {
        "dim": int(m.shape[0]),
        "re": m.real.tolist(),
        "im": m.imag.tolist(),
    }


def matrix_from_json(obj) -> np.ndarray:
    try:
        dim = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed matrix object: {exc}") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise InputError(
            f"matrix fields have shapes {re.shape} and {im.shape}, "
            f"expected ({dim}, {dim})"
        )
    try:
        return as_complex_matrix(re + 1j * im)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def vector_to_json(v) -> list:
    p = maps.as_point(v)
    return [[float(z.real), float(z.imag)] for z in p]


def vector_from_json(obj) -> np.ndarray:
    try:
        return np.array([complex(pair[0], pair[1]) for pair in obj], dtype=np.complex128)
    except (TypeError, IndexError, ValueError) as exc:
        raise InputError(f"malformed vector object: {exc}") from exc


def _complex_to_json(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


# ---------------------------------------------------------------------------
# map specifications


def map_from_spec(spec) -> HoloMap:
    """Build a holomorphic map from a JSON specification object.

    Accepts a dict or a JSON string.  Raises InputError on malformed
    specifications.
    """
    if isinstance(spec, str):
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise InputError(f"map spec is not valid JSON: {exc}") from exc
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InputError("map spec must be an object with a 'kind' field")
    kind = spec["kind"]
    try:
        if kind == "linear":
            return maps.linear_map(matrix_from_json(spec["matrix"]))
        if kind == "polynomial":
            dim = int(spec["dim"])
            monomials = [
                (
                    int(m["coordinate"]),
                    complex(m.get("coeff_re", 0.0), m.get("coeff_im", 0.0)),
                    tuple(int(e) for e in m["exponents"]),
                )
                for m in spec["monomials"]
            ]
            return maps.polynomial_map(dim, monomials)
        if kind == "affine_perturbation":
            T = matrix_from_json(spec["matrix"])
            g = map_from_spec(spec["perturbation"])
            return maps.compose_affine_perturbation(T, g)
        if kind == "b2_example":
            e = gallery.B2Example(
                lam=complex(spec.get("lambda_re", 1.0), spec.get("lambda_im", 0.0)),
                epsilon=float(spec.get("epsilon", 0.5)),
            )
            return gallery.b2_map(e)
        if kind == "fisher_kpp":
            gcfg = gallery.fisher_kpp_grid(
                n_points=int(spec.get("n_points", 64)),
                half_width=float(spec.get("half_width", 10.0)),
                b=float(spec.get("b", 0.4)),
                a_bound=float(spec.get("a_bound", 1.0)),
            )
            return gallery.fisher_kpp_map(gcfg)
    except InputError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed '{kind}' map spec: {exc}") from exc
    raise InputError(f"unknown map kind {kind!r}")


def map_spec_normalize(spec) -> dict:
    """Parse-and-validate a spec, returning the dict form used in reports."""
    if isinstance(spec, str):
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise InputError(f"map spec is not valid JSON: {exc}") from exc
    map_from_spec(spec)  # validation side effect only
    return spec


# ---------------------------------------------------------------------------
# reports


def report_to_json(obj) -> dict:
    """Convert a report dataclass into plain JSON-serialisable data."""
    if isinstance(obj, SpectralReport):
        return {
            "eigenvalues": [_complex_to_json(z) for z in obj.eigenvalues],
            "in_half_plane": obj.in_half_plane,
            "splitting_ok": obj.splitting_ok,
            "converges": obj.converges,
            "boundary_hit": obj.boundary_hit,
            "limit_projection": (
                matrix_to_json(obj.limit_projection)
                if obj.limit_projection is not None
                else None
            ),
        }
    if isinstance(obj, RegionVerdict):
        return {
            "eigenvalues": [_complex_to_json(z) for z in obj.eigenvalues],
            "in_region": obj.in_region,
            "boundary_hit": obj.boundary_hit,
            "splitting_ok": obj.splitting_ok,
            "predicted_convergence": obj.predicted_convergence,
        }
    if isinstance(obj, IterationTrace):
        return {
            "verdict": obj.verdict,
            "steps": obj.steps,
            "limit": vector_to_json(obj.limit) if obj.limit is not None else None,
            "step_norms": [float(s) for s in obj.step_norms],
            "hyperbolic_steps": [float(s) for s in obj.hyperbolic_steps],
        }
    if isinstance(obj, DissipativityReport):
        return {
            "omega": obj.omega,
            "varsigma_fit": obj.varsigma_fit,
            "epsilon_shell": obj.epsilon_shell,
            "max_violation": obj.max_violation,
            "holds": obj.holds,
            "samples": obj.samples,
            "seed": obj.seed,
        }
    if isinstance(obj, NumericalRadiusEstimate):
        return {
            "s_values": obj.s_values.tolist(),
            "sup_re_values": obj.sup_re_values.tolist(),
            "limsup_estimate": obj.limsup_estimate,
        }
    if isinstance(obj, BoundednessScan):
        return {
            "radii": obj.radii.tolist(),
            "sup_norms": obj.sup_norms.tolist(),
            "samples_per_radius": obj.samples_per_radius,
        }
    raise TypeError(f"no JSON form registered for {type(obj).__name__}")


def dumps(payload) -> str:
    """Deterministic JSON text: sorted keys, stable float formatting."""
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def write_trace_csv(trace: IterationTrace, path: str) -> None:
    """Dump a trace as CSV rows (step, norm_step, hyperbolic_step)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "norm_step", "hyperbolic_step"])
        for i, (s, rho) in enumerate(zip(trace.step_norms, trace.hyperbolic_steps)):
            writer.writerow([i, repr(float(s)), repr(float(rho))])
