"""Gallery of concrete maps with closed-form oracles.

Two constructions:

* the two-dimensional polynomial map (xi, eta) -> (lambda xi + eps eta^2, 0)
  on the unit ball of C^2, whose Abel averages, their iterates and the
  limiting retraction all have closed forms, making it an end-to-end
  oracle for the numeric solver;

* a grid discretisation of a Fisher-KPP-type integro-differential map
  h = T + g, with T the Dirichlet second difference on [-L, L] and
  g(x) = b x (1 - int a(., s) x(s) ds) folded onto the grid.  Grid vectors
  carry sqrt(spacing) weights so the Euclidean norm of coordinates equals
  the grid L^2 norm and the unit ball is the L^2 ball.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import solve_banded

from .errors import NoConvergence
from .maps import HoloMap, as_point, compose_affine_perturbation
from .nonlinear import AbelConfig

__all__ = [
    "B2Example",
    "FisherKppGrid",
    "b2_map",
    "b2_phi_closed_form",
    "b2_phi_n_closed_form",
    "b2_omega_zero_phi",
    "b2_retraction_closed_form",
    "fisher_kpp_grid",
    "fisher_kpp_map",
    "fisher_kpp_nested_resolvent",
]


@dataclass(frozen=True)
class B2Example:
    """Parameters of the quadratic map on the ball of C^2."""

    lam: complex = 1.0
    epsilon: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")


def b2_map(e: B2Example) -> HoloMap:
    """The map (xi, eta) -> (lam xi + eps eta^2, 0); fixes the origin."""
    lam = np.complex128(e.lam)
    eps = float(e.epsilon)

    def evaluate(x):
        return np.array([lam * x[0] + eps * x[1] ** 2, 0.0], dtype=np.complex128)

    def jac(x):
        return np.array(
            [[lam, 2.0 * eps * x[1]], [0.0, 0.0]], dtype=np.complex128
        )

    return HoloMap(
        dim=2,
        evaluator=evaluate,
        jacobian_fn=jac,
        fixes_origin=True,
        description=f"b2[lam={lam}, eps={eps}]",
    )


def b2_phi_closed_form(e: B2Example, alpha: float, point) -> np.ndarray:
    """Closed form of the Abel average with omega = lam.

    Phi_alpha(xi, eta) = (xi + alpha eps (1 - alpha lam) eta^2,
                          (1 - alpha lam) eta).  The expression is
    polynomial in alpha, so it extends through alpha lam = 1, where the
    second coordinate is annihilated.
    """
    p = as_point(point)
    q = 1.0 - alpha * np.complex128(e.lam)
    return np.array(
        [p[0] + alpha * e.epsilon * q * p[1] ** 2, q * p[1]], dtype=np.complex128
    )


def b2_phi_n_closed_form(e: B2Example, alpha: float, n: int, point) -> np.ndarray:
    """Closed form of the n-th iterate of the omega = lam average.

    The first coordinate accumulates the finite geometric sum
    sum_{j=0}^{n-1} (1 - alpha lam)^(2j); the second contracts by
    (1 - alpha lam)^n.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    p = as_point(point)
    q = 1.0 - alpha * np.complex128(e.lam)
    ratio = q * q
    if abs(1.0 - ratio) < 1e-14:
        geom = np.complex128(n)
    else:
        geom = (1.0 - ratio**n) / (1.0 - ratio)
    first = p[0] + alpha * e.epsilon * q * p[1] ** 2 * geom
    return np.array([first, q**n * p[1]], dtype=np.complex128)


def b2_retraction_closed_form(e: B2Example, alpha: float, point) -> np.ndarray:
    """Limit of the iterates: (xi + eps (1-alpha lam)/(2-alpha lam) eta^2, 0)."""
    p = as_point(point)
    q = 1.0 - alpha * np.complex128(e.lam)
    first = p[0] + e.epsilon * q / (1.0 + q) * p[1] ** 2
    return np.array([first, 0.0], dtype=np.complex128)


def b2_omega_zero_phi(e: B2Example, alpha: float, point) -> np.ndarray:
    """Closed form of the omega = 0 average.

    Phi_alpha(xi, eta) = ((xi + alpha eps eta^2)/(1 - alpha lam), eta).
    Its fixed points (-(eps/lam) eta^2, eta) leave the ball as |eta| -> 1,
    which is why no retraction onto the null set of the map exists.
    """
    p = as_point(point)
    q = 1.0 - alpha * np.complex128(e.lam)
    if abs(q) < 1e-15:
        raise ValueError("alpha * lam = 1 is excluded")
    return np.array(
        [(p[0] + alpha * e.epsilon * p[1] ** 2) / q, p[1]], dtype=np.complex128
    )


# ---------------------------------------------------------------------------
# Fisher-KPP grid model


@dataclass(frozen=True)
class FisherKppGrid:
    """Dirichlet grid discretisation of the reaction-diffusion map.

    n_points interior nodes on [-L, L] with spacing 2L/(n_points + 1);
    kernel holds the raw values a(t_i, t_j) >= 0 of the symmetric
    interaction kernel, and a_bound dominates the row sums of
    kernel * spacing (the bound on the integral operator).  Grid
    coordinates carry sqrt(spacing), so Euclidean norms are grid L^2
    norms and the second-difference matrix is unchanged by the scaling.
    """

    n_points: int
    half_width: float
    spacing: float
    b: float
    kernel: np.ndarray = field(repr=False)
    a_bound: float

    def __post_init__(self):
        if self.n_points < 2:
            raise ValueError("need at least two grid points")
        if self.b <= 0:
            raise ValueError("b must be positive")
        k = self.kernel
        if k.shape != (self.n_points, self.n_points):
            raise ValueError("kernel shape must be (n_points, n_points)")
        if np.any(k < 0):
            raise ValueError("kernel entries must be nonnegative")
        if not np.allclose(k, k.T, atol=1e-12):
            raise ValueError("kernel must be symmetric")
        row_bound = float(np.max(k.sum(axis=1)) * self.spacing)
        if self.a_bound < row_bound - 1e-9:
            raise ValueError(
                f"a_bound = {self.a_bound} is below the kernel row-sum bound "
                f"{row_bound:.6f}"
            )

    @property
    def nodes(self) -> np.ndarray:
        i = np.arange(1, self.n_points + 1, dtype=float)
        return -self.half_width + i * self.spacing

    def second_difference(self) -> np.ndarray:
        """Dirichlet second-difference matrix (1/spacing^2) tridiag(1,-2,1)."""
        n = self.n_points
        T = np.zeros((n, n), dtype=np.complex128)
        w = 1.0 / self.spacing**2
        idx = np.arange(n)
        T[idx, idx] = -2.0 * w
        T[idx[:-1], idx[:-1] + 1] = w
        T[idx[1:], idx[1:] - 1] = w
        return T

    def quadrature_kernel(self) -> np.ndarray:
        """Kernel action in sqrt(spacing)-scaled coordinates.

        With u = sqrt(spacing) x, the trapezoid value of the integral
        int a(t_i, s) x(s) ds is (kernel * sqrt(spacing)) @ u.
        """
        return self.kernel * np.sqrt(self.spacing)


def fisher_kpp_grid(
    n_points: int = 64,
    half_width: float = 10.0,
    b: float = 0.4,
    a_bound: float = 1.0,
    kernel: Optional[np.ndarray] = None,
) -> FisherKppGrid:
    """Build the default grid model.

    When no kernel is given, a Gaussian kernel c * exp(-(t-s)^2) is used
    with c chosen so the maximal row sum of kernel * spacing equals
    a_bound exactly.
    """
    spacing = 2.0 * half_width / (n_points + 1)
    if kernel is None:
        i = np.arange(1, n_points + 1, dtype=float)
        t = -half_width + i * spacing
        raw = np.exp(-np.subtract.outer(t, t) ** 2)
        c = a_bound / (float(np.max(raw.sum(axis=1))) * spacing)
        kernel = c * raw
    else:
        kernel = np.asarray(kernel, dtype=float)
    return FisherKppGrid(
        n_points=n_points,
        half_width=half_width,
        spacing=spacing,
        b=b,
        kernel=kernel,
        a_bound=a_bound,
    )


def fisher_kpp_map(gcfg: FisherKppGrid) -> HoloMap:
    """Assemble h = T + g on the grid.

    T is the Dirichlet second difference and the logistic-competition part
    acts on scaled coordinates as g(u) = b u (1 - W u) with W the
    quadrature kernel; the Jacobian
    T + b diag(1 - W u) - b diag(u) W is assembled exactly.
    """
    T = gcfg.second_difference()
    W = gcfg.quadrature_kernel().astype(np.complex128)
    b = gcfg.b
    n = gcfg.n_points
    eye = np.eye(n, dtype=np.complex128)

    def g_eval(u):
        return b * u * (1.0 - W @ u)

    def g_jac(u):
        return b * np.diag(1.0 - W @ u) - b * np.diag(u) @ W

    g = HoloMap(
        dim=n,
        evaluator=g_eval,
        jacobian_fn=g_jac,
        fixes_origin=True,
        description=f"logistic[b={b}]",
    )
    h = compose_affine_perturbation(T, g)
    return HoloMap(
        dim=n,
        evaluator=h.evaluator,
        jacobian_fn=h.jacobian_fn,
        fixes_origin=True,
        description=f"fisher-kpp[n={n}, b={b}, a={gcfg.a_bound}]",
    )


def _resolvent_solver(gcfg: FisherKppGrid, alpha: float):
    """Banded factor-free solver y -> (I - alpha T)^(-1) y (tridiagonal)."""
    n = gcfg.n_points
    w = alpha / gcfg.spacing**2
    ab = np.zeros((3, n), dtype=np.complex128)
    ab[0, 1:] = -w        # superdiagonal of I - alpha T
    ab[1, :] = 1.0 + 2.0 * w
    ab[2, :-1] = -w
    return lambda rhs: solve_banded((1, 1), ab, rhs)


def fisher_kpp_nested_resolvent(
    gcfg: FisherKppGrid,
    cfg: AbelConfig,
    x,
    max_iter: int = 2000,
) -> np.ndarray:
    """Abel average of the grid map via the nested-resolvent fixed point.

    Solves y = alpha (I - alpha T)^(-1) g(y) + (1 - alpha omega)
    (I - alpha T)^(-1) x by Picard iteration, applying the linear
    resolvent with a tridiagonal solve at every step.  This is an
    algorithm independent of the Newton solve on the assembled h = T + g
    and must agree with it on the same equation.

    A warning is emitted when the a-priori contraction estimate
    alpha * ||(I-alpha T)^{-1}|| * Lip(g) reaches 1; NoConvergence is
    raised if the iteration then stalls.
    """
    p = as_point(x)
    n = gcfg.n_points
    if p.shape[0] != n:
        raise ValueError(f"point has dimension {p.shape[0]}, grid expects {n}")
    alpha, omega = cfg.alpha, cfg.omega
    solve_r = _resolvent_solver(gcfg, alpha)
    T = gcfg.second_difference()
    W = gcfg.quadrature_kernel().astype(np.complex128)
    b = gcfg.b

    def g_eval(u):
        return b * u * (1.0 - W @ u)

    # Eigenvalues of the Dirichlet second difference are known in closed
    # form; the resolvent norm is 1/min|1 - alpha lambda_k|.
    k = np.arange(1, n + 1, dtype=float)
    lam = -2.0 / gcfg.spacing**2 * (1.0 - np.cos(k * np.pi / (n + 1)))
    res_norm = 1.0 / max(float(np.min(np.abs(1.0 - alpha * lam))), 1e-12)
    lip_g = b * (1.0 + 2.0 * float(np.linalg.norm(W, 2)))
    contraction = abs(alpha) * res_norm * lip_g
    if contraction >= 1.0:
        warnings.warn(
            f"nested-resolvent contraction estimate {contraction:.3f} >= 1; "
            "Picard iteration may stall",
            RuntimeWarning,
            stacklevel=2,
        )

    base = (1.0 - alpha * omega) * solve_r(p)
    y = base.copy()
    target = (1.0 - alpha * omega) * p
    for _ in range(max_iter):
        y = alpha * solve_r(g_eval(y)) + base
        residual = np.linalg.norm(y - alpha * (T @ y + g_eval(y)) - target)
        if residual <= cfg.newton_tol:
            return y
    raise NoConvergence(
        f"Picard iteration stalled after {max_iter} steps "
        f"(contraction estimate {contraction:.3f})"
    )
