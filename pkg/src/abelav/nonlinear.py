"""Abel averages of holomorphic maps: solves, classification, iteration.

For a holomorphic map h on the open unit ball, a real weight omega and a
real parameter alpha with alpha*omega != 1, the Abel average is

    Phi_alpha = (I - alpha*h)^(-1) o ((1 - alpha*omega) I),

i.e. y = Phi_alpha(x) solves y - alpha*h(y) = (1 - alpha*omega) x.  This
module computes Phi_alpha by damped Newton iteration, probes whether it is
a self-map of the ball, checks the small-alpha limits, classifies power
convergence of Phi_alpha^n from the spectrum of h'(0), and iterates the
average to a holomorphic retraction onto {x : h(x) = omega x}.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from ._sampling import ball_points
from .errors import (
    DomainEscape,
    NoConvergence,
    OriginNotFixed,
    SingularJacobian,
    SingularResolvent,
)
from .linear import numerical_rank
from .maps import HoloMap, as_point, eval_map, jacobian, poincare_distance

__all__ = [
    "AbelConfig",
    "RegionVerdict",
    "IterationTrace",
    "RetractionAudit",
    "in_q_omega",
    "solve_abel",
    "abel_average_map",
    "pseudo_contractive_probe",
    "small_alpha_limit_check",
    "phi_derivative_at_zero",
    "classify_convergence",
    "iterate_to_retraction",
    "retraction_audit",
]

#: Smallest damping factor tried before declaring a stalled Newton step.
DAMPING_FLOOR = 2.0 ** -20

#: Continuation depth for restarts from the half-alpha average.
MAX_CONTINUATION_DEPTH = 6


@dataclass(frozen=True)
class AbelConfig:
    """Parameters of one Abel-average computation.

    alpha and omega define the average; the remaining fields govern the
    Newton solver.  alpha*omega = 1 is rejected at construction since the
    average is undefined there.
    """

    alpha: float
    omega: float
    newton_tol: float = 1e-12
    newton_max_iter: int = 100
    ball_margin: float = 1e-9
    damping: float = 1.0

    def __post_init__(self):
        if abs(1.0 - self.alpha * self.omega) < 1e-14:
            raise ValueError("alpha*omega = 1 leaves the Abel average undefined")
        if self.newton_tol <= 0:
            raise ValueError("newton_tol must be positive")
        if self.ball_margin <= 0:
            raise ValueError("ball_margin must be positive")
        if not 0.0 < self.damping <= 1.0:
            raise ValueError("damping must lie in (0, 1]")


def in_q_omega(alpha: float, omega: float) -> bool:
    """Admissible-alpha predicate for the dissipativity-derived guarantees.

    Q_omega = [0, 1/omega) for omega > 0, [0, inf) for omega = 0, and
    (-inf, 1/omega) union [0, inf) for omega < 0.
    """
    if omega > 0:
        return 0.0 <= alpha < 1.0 / omega
    if omega == 0:
        return alpha >= 0.0
    return alpha < 1.0 / omega or alpha >= 0.0


@dataclass(frozen=True)
class RegionVerdict:
    """Spectral prediction for power convergence of the Abel average.

    in_region holds when every eigenvalue zeta of h'(0) either equals
    omega (within eig_tol) or satisfies |zeta - 1/alpha| > |omega - 1/alpha|;
    splitting_ok is semisimplicity of the eigenvalue omega.  Convergence of
    the iterates is predicted exactly when both hold.
    """

    eigenvalues: np.ndarray
    in_region: bool
    boundary_hit: bool
    splitting_ok: bool
    predicted_convergence: bool


@dataclass(frozen=True)
class IterationTrace:
    """Orbit of a point under repeated application of the Abel average."""

    points: list
    step_norms: list
    hyperbolic_steps: list
    verdict: str  # converged | diverged | escaped | budget_exhausted
    limit: Optional[np.ndarray]

    @property
    def steps(self) -> int:
        return len(self.step_norms)


@dataclass(frozen=True)
class RetractionAudit:
    """Result of auditing iterated limits as a holomorphic retraction."""

    probes: list
    limits: list
    idempotence_defects: list
    membership_defects: list
    hyperbolic_pairs: list = field(repr=False)
    passed: bool = True


def _residual(h: HoloMap, cfg: AbelConfig, y: np.ndarray, target: np.ndarray):
    F = y - cfg.alpha * eval_map(h, y) - target
    return F, float(np.linalg.norm(F))


def _newton(h: HoloMap, cfg: AbelConfig, x: np.ndarray, y0: np.ndarray):
    """One damped Newton run.  Returns the solution or raises.

    Steps that would leave the closed ball of radius 1 - ball_margin are
    rejected; if every damped candidate leaves the ball, or the iteration
    stalls pressed against the boundary with the full step pointing
    outside, the solve is classified as a domain escape (the average of
    this point does not return to the ball).  Interior stalls raise
    NoConvergence so the caller can attempt continuation.
    """
    limit_r = 1.0 - cfg.ball_margin
    target = (1.0 - cfg.alpha * cfg.omega) * x
    y = y0.copy()
    nrm = np.linalg.norm(y)
    if nrm > limit_r:
        y *= limit_r / nrm
    F, res = _residual(h, cfg, y, target)
    eye = np.eye(h.dim, dtype=np.complex128)
    for _ in range(cfg.newton_max_iter):
        if res <= cfg.newton_tol:
            return y
        J = eye - cfg.alpha * jacobian(h, y)
        try:
            cond = np.linalg.cond(J)
        except np.linalg.LinAlgError:  # pragma: no cover - rare
            cond = np.inf
        if not np.isfinite(cond) or cond > 1e14:
            raise SingularJacobian(
                f"I - alpha*h'(y) is numerically singular (cond ~ {cond:.3e})"
            )
        d = np.linalg.solve(J, -F)
        t = cfg.damping
        accepted = False
        all_exited = True
        while t >= DAMPING_FLOOR:
            cand = y + t * d
            if np.linalg.norm(cand) > limit_r:
                t *= 0.5
                continue
            all_exited = False
            try:
                F_c, res_c = _residual(h, cfg, cand, target)
            except DomainEscape:
                t *= 0.5
                continue
            if res_c < res:
                y, F, res = cand, F_c, res_c
                accepted = True
                break
            t *= 0.5
        if not accepted:
            if all_exited:
                raise DomainEscape(
                    "every damped Newton step leaves the ball; "
                    "the Abel average escapes at this point",
                    point=x,
                )
            full = y + cfg.damping * d
            pinned = np.linalg.norm(y) >= limit_r - 1e-9
            if np.linalg.norm(full) > limit_r and (pinned or res > 1e3 * cfg.newton_tol):
                raise DomainEscape(
                    "Newton stalled against the ball boundary with the full "
                    "step pointing outside; the Abel average escapes here",
                    point=x,
                )
            raise NoConvergence(
                f"Newton stalled at residual {res:.3e} (tol {cfg.newton_tol:.1e})"
            )
    if res <= cfg.newton_tol:
        return y
    raise NoConvergence(
        f"Newton budget exhausted at residual {res:.3e} (tol {cfg.newton_tol:.1e})"
    )


def solve_abel(h: HoloMap, cfg: AbelConfig, x, _depth: int = 0) -> np.ndarray:
    """Evaluate the Abel average of h at x.

    Solves y - alpha*h(y) = (1 - alpha*omega) x by damped Newton iteration
    started from the scaled point (1 - alpha*omega) x clipped into the
    ball.  On an interior stall the solve restarts once per continuation
    level from the half-alpha average of x, which is closer to the target
    solution than the initial guess.

    Raises
    ------
    DomainEscape
        The solution lies outside the ball (pseudo-contractivity failure
        at x).
    NoConvergence
        Newton and its continuation restarts exhausted their budgets.
    SingularJacobian
        I - alpha*h'(y) became numerically singular along the way.
    """
    p = as_point(x)
    if np.linalg.norm(p) >= 1.0:
        raise DomainEscape("input point is not inside the open unit ball", point=p)
    if cfg.alpha == 0.0:
        return p.copy()
    y0 = (1.0 - cfg.alpha * cfg.omega) * p
    try:
        return _newton(h, cfg, p, y0)
    except NoConvergence:
        if _depth >= MAX_CONTINUATION_DEPTH:
            raise
        half = replace(cfg, alpha=cfg.alpha / 2.0)
        y0 = solve_abel(h, half, p, _depth=_depth + 1)
        return _newton(h, cfg, p, y0)


def abel_average_map(h: HoloMap, cfg: AbelConfig) -> HoloMap:
    """The Abel average of h packaged as a holomorphic map of the ball."""
    return HoloMap(
        dim=h.dim,
        evaluator=lambda x: solve_abel(h, cfg, x),
        jacobian_fn=None,
        fixes_origin=h.fixes_origin,
        description=f"abel[alpha={cfg.alpha},omega={cfg.omega}]({h.description})",
    )


def pseudo_contractive_probe(
    h: HoloMap,
    omega: float,
    alphas: Sequence[float],
    samples: int,
    seed: int = 42,
    shell_radius: float = 0.999,
    newton_tol: float = 1e-12,
) -> list:
    """Sampled certificate that the Abel average maps the ball into itself.

    For each alpha, attempts the solve on deterministic shell probes
    (structured directions placed at shell_radius, the strongest test)
    followed by `samples` seeded points with norms up to shell_radius.
    The per-alpha result is (alpha, all_solves_succeeded, witness) where
    witness is the first failing point, or None.
    """
    pts = ball_points(h.dim, shell_radius, samples, seed=seed)
    results = []
    for alpha in alphas:
        cfg = AbelConfig(
            alpha=float(alpha), omega=float(omega), newton_tol=newton_tol
        )
        ok, witness = True, None
        for p in pts:
            try:
                solve_abel(h, cfg, p)
            except (DomainEscape, NoConvergence, SingularJacobian):
                ok, witness = False, p
                break
        results.append((float(alpha), ok, witness))
    return results


def small_alpha_limit_check(
    h: HoloMap,
    omega: float,
    x,
    alphas: Sequence[float],
    newton_tol: float = 1e-12,
) -> list:
    """Residuals of the two small-alpha limits of the Abel average.

    Per alpha returns (||Phi_alpha(x) - x||,
    ||(Phi_alpha(x) - x)/alpha - (h(x) - omega x)||); the first is O(alpha)
    and the second vanishes as alpha -> 0+.
    """
    p = as_point(x)
    drift = eval_map(h, p) - omega * p
    out = []
    for alpha in alphas:
        cfg = AbelConfig(alpha=float(alpha), omega=float(omega), newton_tol=newton_tol)
        y = solve_abel(h, cfg, p)
        first = float(np.linalg.norm(y - p))
        second = float(np.linalg.norm((y - p) / alpha - drift))
        out.append((first, second))
    return out


def phi_derivative_at_zero(h: HoloMap, cfg: AbelConfig) -> np.ndarray:
    """Derivative of the Abel average at its fixed origin.

    Equals (1 - alpha*omega) * (I - alpha*h'(0))^(-1); requires h(0) = 0.
    """
    if not h.fixes_origin:
        raise OriginNotFixed("the map does not claim to fix the origin")
    zero = np.zeros(h.dim, dtype=np.complex128)
    if np.linalg.norm(eval_map(h, zero)) > 1e-12:
        raise OriginNotFixed("||h(0)|| exceeds 1e-12")
    J0 = jacobian(h, zero)
    eye = np.eye(h.dim, dtype=np.complex128)
    M = eye - cfg.alpha * J0
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > 1e12:
        raise SingularResolvent(
            f"I - alpha*h'(0) is numerically singular (cond ~ {cond:.3e})"
        )
    return (1.0 - cfg.alpha * cfg.omega) * np.linalg.solve(M, eye)


def _psi(zeta: np.ndarray, alpha: float, omega: float) -> np.ndarray:
    return (1.0 - alpha * omega) / (1.0 - alpha * zeta)


def _min_distance_matching(a: np.ndarray, b: np.ndarray) -> float:
    """Greedy minimal-distance multiset matching; max matched distance."""
    rem = list(b)
    worst = 0.0
    for z in a:
        d = [abs(z - w) for w in rem]
        j = int(np.argmin(d))
        worst = max(worst, d[j])
        rem.pop(j)
    return worst


def classify_convergence(
    h: HoloMap,
    cfg: AbelConfig,
    eig_tol: float = 1e-8,
    region_tol: float = 1e-9,
) -> RegionVerdict:
    """Predict power convergence of the Abel average from sigma(h'(0)).

    Requires h(0) = 0 and alpha != 0.  An eigenvalue zeta counts as inside
    the admissible region when zeta = omega (within eig_tol) or
    |zeta - 1/alpha| exceeds |omega - 1/alpha| by more than region_tol;
    boundary cases are flagged and classified as outside (the region is
    defined by a strict inequality).  Semisimplicity of omega is tested by
    rank(J - omega I) == rank((J - omega I)^2).  As a consistency check,
    the eigenvalues of the derivative of the average at 0 are verified to
    be the image of sigma(h'(0)) under zeta -> (1-alpha*omega)/(1-alpha*zeta).
    """
    if cfg.alpha == 0.0:
        raise ValueError("classification needs alpha != 0")
    if not h.fixes_origin:
        raise OriginNotFixed("classification requires h(0) = 0")
    zero = np.zeros(h.dim, dtype=np.complex128)
    J = jacobian(h, zero)
    eigs = np.linalg.eigvals(J)
    inv_alpha = 1.0 / cfg.alpha
    radius = abs(cfg.omega - inv_alpha)
    is_omega = np.abs(eigs - cfg.omega) <= eig_tol
    dist = np.abs(eigs - inv_alpha)
    outside = dist > radius + region_tol
    boundary = (~is_omega) & (np.abs(dist - radius) <= region_tol)
    in_region = bool(np.all(is_omega | outside))

    if np.any(is_omega):
        B = J - cfg.omega * np.eye(h.dim, dtype=np.complex128)
        splitting_ok = numerical_rank(B) == numerical_rank(B @ B)
    else:
        splitting_ok = True

    predicted = in_region and splitting_ok

    phi_eigs = np.linalg.eigvals(phi_derivative_at_zero(h, cfg))
    mapped = _psi(eigs, cfg.alpha, cfg.omega)
    mismatch = _min_distance_matching(mapped, phi_eigs)
    if mismatch > 1e-8 * max(1.0, float(np.max(np.abs(mapped)))):
        raise SingularResolvent(
            f"spectral mapping consistency check failed (mismatch {mismatch:.3e})"
        )
    if predicted:
        inside = np.abs(phi_eigs) < 1.0 + 1e-8
        near_one = np.abs(phi_eigs - 1.0) <= 1e-8
        if not bool(np.all(inside | near_one)):
            raise SingularResolvent(
                "predicted convergence but the derivative spectrum leaves "
                "the closed disk"
            )
    return RegionVerdict(
        eigenvalues=eigs,
        in_region=in_region,
        boundary_hit=bool(np.any(boundary)),
        splitting_ok=splitting_ok,
        predicted_convergence=predicted,
    )


def iterate_to_retraction(
    h: HoloMap,
    cfg: AbelConfig,
    x,
    max_n: int = 500,
    trace_tol: float = 1e-10,
) -> IterationTrace:
    """Iterate the Abel average from x and detect the orbit's fate.

    Stops with verdict "converged" when the hyperbolic step drops below
    trace_tol and the geometric tail estimate (from the observed
    contraction rate) is below 5*trace_tol, so that the returned limit p
    satisfies ||omega p - h(p)|| <= 10*trace_tol.  The orbit is "escaped"
    when it reaches norm 1 - ball_margin or the solver reports a domain
    escape, "diverged" when steps grow by a factor above 10 over a 5-step
    window, and "budget_exhausted" at max_n.
    """
    p = as_point(x)
    points = [p.copy()]
    step_norms: list = []
    hyp_steps: list = []
    limit_r = 1.0 - cfg.ball_margin
    for k in range(max_n):
        try:
            q = solve_abel(h, cfg, points[-1])
        except DomainEscape:
            return IterationTrace(points, step_norms, hyp_steps, "escaped", None)
        except (NoConvergence, SingularJacobian) as exc:
            raise type(exc)(f"solver failed at orbit step {k}: {exc}") from exc
        step = float(np.linalg.norm(q - points[-1]))
        rho = poincare_distance(q, points[-1])
        points.append(q)
        step_norms.append(step)
        hyp_steps.append(rho)
        if np.linalg.norm(q) >= limit_r:
            return IterationTrace(points, step_norms, hyp_steps, "escaped", None)
        if rho < trace_tol:
            if len(hyp_steps) >= 2 and hyp_steps[-2] > 0:
                rate = min(hyp_steps[-1] / hyp_steps[-2], 0.999)
            else:
                rate = 0.0
            tail = rho * rate / max(1.0 - rate, 1e-3)
            if tail < 5.0 * trace_tol:
                return IterationTrace(points, step_norms, hyp_steps, "converged", q)
        if (
            len(step_norms) > 5
            and step_norms[-1] > 1e3 * trace_tol
            and step_norms[-1] > 10.0 * step_norms[-6]
        ):
            return IterationTrace(points, step_norms, hyp_steps, "diverged", None)
    return IterationTrace(points, step_norms, hyp_steps, "budget_exhausted", None)


def retraction_audit(
    h: HoloMap,
    cfg: AbelConfig,
    probes,
    max_n: int = 500,
    trace_tol: float = 1e-10,
) -> RetractionAudit:
    """Audit iterated limits as a holomorphic retraction.

    For each probe the orbit limit p must (a) be idempotent:
    ||Phi_alpha(p) - p|| < 10*trace_tol, (b) lie in the fixed-point set:
    ||omega p - h(p)|| < 10*trace_tol, and (c) pairwise contract the
    hyperbolic metric: rho(p_i, p_j) <= rho(x_i, x_j) + 1e-6.

    Raises AuditFailure naming the violated clause and its witness.
    """
    from .errors import AuditFailure

    pts = [as_point(p) for p in probes]
    limits = []
    for p in pts:
        trace = iterate_to_retraction(h, cfg, p, max_n=max_n, trace_tol=trace_tol)
        if trace.verdict != "converged":
            raise AuditFailure(
                "convergence", p, f"orbit from probe finished '{trace.verdict}'"
            )
        limits.append(trace.limit)

    bound = 10.0 * trace_tol
    idem, member = [], []
    for p, lim in zip(pts, limits):
        moved = float(np.linalg.norm(solve_abel(h, cfg, lim) - lim))
        idem.append(moved)
        if moved >= bound:
            raise AuditFailure(
                "idempotence", p, f"iterating from the limit moves by {moved:.3e}"
            )
        defect = float(np.linalg.norm(cfg.omega * lim - eval_map(h, lim)))
        member.append(defect)
        if defect >= bound:
            raise AuditFailure(
                "membership", p, f"||omega p - h(p)|| = {defect:.3e} at the limit"
            )
    pairs = []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            before = poincare_distance(pts[i], pts[j])
            after = poincare_distance(limits[i], limits[j])
            pairs.append((i, j, before, after))
            if after > before + 1e-6:
                raise AuditFailure(
                    "hyperbolic_contraction",
                    (pts[i], pts[j]),
                    f"rho(p_i, p_j) = {after:.6e} > rho(x_i, x_j) = {before:.6e}",
                )
    return RetractionAudit(
        probes=pts,
        limits=limits,
        idempotence_defects=idem,
        membership_defects=member,
        hyperbolic_pairs=pairs,
        passed=True,
    )
