"""Holomorphic maps on the Euclidean unit ball of C^n.

A map is represented by an evaluator together with an optional analytic
Jacobian; finite differences supply the Jacobian otherwise.  The module
also provides map algebra (linear, polynomial, constant, affine
perturbations T + g), boundedness scans over sub-spheres, and the
hyperbolic (Poincare) metric of the ball, with respect to which every
holomorphic self-map of the ball is non-expansive.

Throughout the library the norm is the Euclidean norm of C^n and the
pairing <a, b> = sum_i a_i * conj(b_i), so the duality map is J(x) = {x}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._sampling import sphere_points
from .errors import DomainEscape, EigensolverFailure, OutsideBall
from .linear import as_complex_matrix

__all__ = [
    "HoloMap",
    "BoundednessScan",
    "as_point",
    "eval_map",
    "jacobian",
    "spectrum_at_zero",
    "identity_map",
    "constant_map",
    "linear_map",
    "polynomial_map",
    "compose_affine_perturbation",
    "boundedness_scan",
    "mobius_translate",
    "poincare_distance",
]

#: Default finite-difference step for Jacobians (per complex coordinate).
FD_STEP = 1e-6

#: Tolerance on ||h(0)|| for maps claiming to fix the origin.
ORIGIN_TOL = 1e-12


def as_point(x) -> np.ndarray:
    """Coerce to a 1-D complex vector."""
    p = np.asarray(x, dtype=np.complex128)
    if p.ndim != 1:
        p = p.reshape(-1)
    return p


def _require_in_ball(x: np.ndarray) -> None:
    if np.linalg.norm(x) >= 1.0:
        raise OutsideBall(f"point has norm {np.linalg.norm(x):.6f} >= 1")


@dataclass(frozen=True)
class HoloMap:
    """Evaluatable holomorphic map from the open unit ball into C^dim.

    Parameters
    ----------
    dim : int
        Dimension of domain and codomain.
    evaluator : callable
        Maps a point of the open ball to a vector of C^dim.  Composite
        maps whose construction involves an inner solve may raise
        DomainEscape when that solve leaves the ball.
    jacobian_fn : callable, optional
        Analytic complex Jacobian at a point; when absent, central
        finite differences are used.
    fixes_origin : bool
        Claim that h(0) = 0, verified at construction.
    description : str
        Human-readable label used in reports.
    """

    dim: int
    evaluator: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    jacobian_fn: Optional[Callable[[np.ndarray], np.ndarray]] = field(
        default=None, repr=False
    )
    fixes_origin: bool = False
    description: str = ""

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if self.fixes_origin:
            z = self.evaluator(np.zeros(self.dim, dtype=np.complex128))
            if np.linalg.norm(z) > ORIGIN_TOL:
                raise ValueError(
                    f"map claims h(0)=0 but ||h(0)|| = {np.linalg.norm(z):.3e}"
                )

    @property
    def jacobian_kind(self) -> str:
        return "analytic" if self.jacobian_fn is not None else "finite-difference"

    def __call__(self, x) -> np.ndarray:
        return eval_map(self, x)

    def jacobian(self, x, fd_step: float = FD_STEP) -> np.ndarray:
        return jacobian(self, x, fd_step=fd_step)


def eval_map(h: HoloMap, x) -> np.ndarray:
    """Evaluate h at a point of the open unit ball.

    Raises OutsideBall if ||x|| >= 1 and DomainEscape if the evaluation
    produces non-finite components or the evaluator itself escapes.
    """
    p = as_point(x)
    if p.shape[0] != h.dim:
        raise ValueError(f"point has dimension {p.shape[0]}, map expects {h.dim}")
    _require_in_ball(p)
    y = np.asarray(h.evaluator(p), dtype=np.complex128)
    if not np.all(np.isfinite(y.real)) or not np.all(np.isfinite(y.imag)):
        raise DomainEscape("evaluation produced non-finite components", point=p)
    return y


def jacobian(h: HoloMap, x, fd_step: float = FD_STEP) -> np.ndarray:
    """Complex Jacobian h'(x), analytic when available.

    The finite-difference mode combines central differences along the real
    and imaginary coordinate directions; for holomorphic maps the two
    estimates agree to leading order and their mean cancels the O(step^2)
    error term.  The step shrinks automatically near the boundary so all
    probes stay inside the ball.
    """
    p = as_point(x)
    _require_in_ball(p)
    if h.jacobian_fn is not None:
        return as_complex_matrix(h.jacobian_fn(p))
    margin = 1.0 - np.linalg.norm(p)
    delta = min(fd_step, 0.25 * margin)
    if delta <= 0:
        raise DomainEscape(
            "no room for finite-difference probes near the boundary", point=p
        )
    J = np.empty((h.dim, h.dim), dtype=np.complex128)
    for k in range(h.dim):
        e = np.zeros(h.dim, dtype=np.complex128)
        e[k] = delta
        d_re = (eval_map(h, p + e) - eval_map(h, p - e)) / (2.0 * delta)
        d_im = (eval_map(h, p + 1j * e) - eval_map(h, p - 1j * e)) / (2j * delta)
        J[:, k] = 0.5 * (d_re + d_im)
    return J


def spectrum_at_zero(h: HoloMap) -> np.ndarray:
    """Eigenvalues of h'(0); the spectrum of the map near its fixed origin."""
    J = jacobian(h, np.zeros(h.dim, dtype=np.complex128))
    try:
        return np.linalg.eigvals(J)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise EigensolverFailure(str(exc)) from exc


# ---------------------------------------------------------------------------
# constructors


def identity_map(dim: int) -> HoloMap:
    eye = np.eye(dim, dtype=np.complex128)
    return HoloMap(
        dim=dim,
        evaluator=lambda x: x.copy(),
        jacobian_fn=lambda x: eye,
        fixes_origin=True,
        description="identity",
    )


def constant_map(value) -> HoloMap:
    c = as_point(value)
    zero = np.zeros((c.shape[0], c.shape[0]), dtype=np.complex128)
    return HoloMap(
        dim=c.shape[0],
        evaluator=lambda x: c.copy(),
        jacobian_fn=lambda x: zero,
        fixes_origin=bool(np.linalg.norm(c) == 0.0),
        description="constant",
    )


def linear_map(T) -> HoloMap:
    """The holomorphic map x -> T x induced by a square matrix."""
    M = as_complex_matrix(T)
    return HoloMap(
        dim=M.shape[0],
        evaluator=lambda x: M @ x,
        jacobian_fn=lambda x: M,
        fixes_origin=True,
        description=f"linear[{M.shape[0]}x{M.shape[0]}]",
    )


def polynomial_map(dim: int, monomials, description: str = "polynomial") -> HoloMap:
    """Polynomial map from a list of (coordinate, coefficient, exponents).

    Each monomial contributes coeff * prod_k x_k**exponents[k] to the given
    output coordinate.  The Jacobian is assembled analytically from the
    exponent calculus.
    """
    terms = []
    for coord, coeff, exps in monomials:
        coord = int(coord)
        exps = tuple(int(e) for e in exps)
        if coord < 0 or coord >= dim or len(exps) != dim or any(e < 0 for e in exps):
            raise ValueError(f"bad monomial ({coord}, {coeff}, {exps})")
        terms.append((coord, np.complex128(coeff), exps))
    fixes_origin = all(any(e > 0 for e in exps) for _, _, exps in terms)

    def evaluate(x):
        y = np.zeros(dim, dtype=np.complex128)
        for coord, coeff, exps in terms:
            v = coeff
            for k, e in enumerate(exps):
                if e:
                    v = v * x[k] ** e
            y[coord] += v
        return y

    def jac(x):
        J = np.zeros((dim, dim), dtype=np.complex128)
        for coord, coeff, exps in terms:
            for k, e in enumerate(exps):
                if e == 0:
                    continue
                v = coeff * e
                for m, em in enumerate(exps):
                    p = em - 1 if m == k else em
                    if p:
                        v = v * x[m] ** p
                J[coord, k] += v
        return J

    return HoloMap(
        dim=dim,
        evaluator=evaluate,
        jacobian_fn=jac,
        fixes_origin=fixes_origin,
        description=description,
    )


def compose_affine_perturbation(T, g: HoloMap) -> HoloMap:
    """The composite map x -> T x + g(x)."""
    M = as_complex_matrix(T)
    if M.shape[0] != g.dim:
        raise ValueError(
            f"matrix dimension {M.shape[0]} does not match map dimension {g.dim}"
        )
    jac_fn = None
    if g.jacobian_fn is not None:
        g_jac = g.jacobian_fn
        jac_fn = lambda x: M + g_jac(x)  # noqa: E731 - tiny closure
    g_eval = g.evaluator
    return HoloMap(
        dim=g.dim,
        evaluator=lambda x: M @ x + g_eval(x),
        jacobian_fn=jac_fn,
        fixes_origin=g.fixes_origin,
        description=f"linear+{g.description}",
    )


# ---------------------------------------------------------------------------
# boundedness


@dataclass(frozen=True)
class BoundednessScan:
    """Estimates of the sup of ||h|| over closed sub-balls of radius r.

    sup_norms[i] is a sampled lower bound of C_h(radii[i]); estimates are
    cumulatively maximised over increasing radii so the reported curve is
    nondecreasing, as the true boundedness constant is.
    """

    radii: np.ndarray
    sup_norms: np.ndarray
    samples_per_radius: int


def boundedness_scan(
    h: HoloMap,
    radii,
    samples: int,
    seed: int = 42,
) -> BoundednessScan:
    """Estimate C_h(r) = sup_{||x|| <= r} ||h(x)|| on each given radius.

    Uses `samples` seeded pseudo-random sphere points per radius plus the
    deterministic structured directions.  DomainEscape from the evaluator
    is re-raised with the offending radius attached.
    """
    rs = np.sort(np.asarray(radii, dtype=float))
    if rs.size == 0 or rs[0] <= 0.0 or rs[-1] >= 1.0:
        raise ValueError("radii must lie in (0, 1)")
    sups = np.empty_like(rs)
    running = 0.0
    for i, r in enumerate(rs):
        pts = sphere_points(h.dim, r, samples, seed=seed + i)
        try:
            val = max(float(np.linalg.norm(eval_map(h, p))) for p in pts)
        except DomainEscape as exc:
            raise DomainEscape(
                f"evaluation escaped at radius {r:.6f}: {exc}", point=exc.point
            ) from exc
        running = max(running, val)
        sups[i] = running
    return BoundednessScan(radii=rs, sup_norms=sups, samples_per_radius=samples)


# ---------------------------------------------------------------------------
# hyperbolic metric


def mobius_translate(a, z) -> np.ndarray:
    """The ball automorphism phi_a with phi_a(a) = 0, applied to z.

    phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z, a>) with P_a the
    orthogonal projection onto span{a}, Q_a = I - P_a and
    s_a = sqrt(1 - ||a||^2).
    """
    a = as_point(a)
    z = as_point(z)
    _require_in_ball(a)
    _require_in_ball(z)
    na2 = float(np.real(np.vdot(a, a)))
    if na2 == 0.0:
        return -z
    inner = np.vdot(a, z)  # <z, a> in the convention sum z_i conj(a_i)
    pz = (inner / na2) * a
    qz = z - pz
    s = np.sqrt(1.0 - na2)
    return (a - pz - s * qz) / (1.0 - inner)


def poincare_distance(x, y) -> float:
    """Hyperbolic distance of the Euclidean unit ball of C^n.

    rho(x, y) = arctanh ||phi_x(y)|| where phi_x is the ball automorphism
    moving x to the origin.  At the origin rho(0, y) = arctanh ||y||; the
    distance is symmetric and every holomorphic self-map of the ball is
    non-expansive for it.
    """
    u = as_point(x)
    v = as_point(y)
    m = float(np.linalg.norm(mobius_translate(u, v)))
    m = min(m, 1.0 - 1e-16)
    return float(np.arctanh(m))
