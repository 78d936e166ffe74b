"""Abel averages of finite-dimensional linear operators.

The Abel average of a square complex matrix T at parameter alpha in (0,1)
is A_alpha = (1-alpha) * (I - alpha*T)^(-1).  The power sequence A_alpha^n
converges in operator norm exactly when every eigenvalue of T other than 1
has real part < 1 and the eigenvalue 1 (if present) is semisimple; the
limit is then the spectral projection onto Ker(I-T) along Im(I-T).  This
module computes the average, its series form, the spectral classification,
power limits, and the linear dissipativity test.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import EigensolverFailure, Overflow, SingularResolvent

__all__ = [
    "SpectralReport",
    "as_complex_matrix",
    "abel_linear",
    "abel_series",
    "classify_linear",
    "power_limit",
    "is_dissipative_linear",
    "numerical_rank",
    "spectral_projection",
]

#: Relative singular-value cutoff used by every numerical rank decision.
RANK_CUTOFF = 1e-9

#: Condition-number estimate above which a resolvent is treated as singular.
SINGULAR_COND = 1e12


def as_complex_matrix(entries) -> np.ndarray:
    """Validate and return a square complex matrix as a complex128 array.

    Raises ValueError if the array is not square 2-D or contains
    non-finite entries.
    """
    a = np.asarray(entries, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError("matrix entries must be finite")
    return a


@dataclass(frozen=True)
class SpectralReport:
    """Power-convergence classification of a linear Abel average.

    converges is equivalent to in_half_plane and splitting_ok; when it
    holds, limit_projection is the projection onto Ker(I-T) along
    Im(I-T), which is the common limit of A_alpha^n for every alpha.
    """

    eigenvalues: np.ndarray
    in_half_plane: bool
    splitting_ok: bool
    converges: bool
    limit_projection: Optional[np.ndarray]
    boundary_hit: bool = False


def _eigvals(a: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise EigensolverFailure(str(exc)) from exc


def numerical_rank(a: np.ndarray, rel_cutoff: float = RANK_CUTOFF) -> int:
    """Rank of `a` counting singular values above rel_cutoff * sigma_max."""
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rel_cutoff * s[0]))


def abel_linear(T, alpha: float, solver_tol: float = 1e-9) -> np.ndarray:
    """Abel average (1-alpha) * (I - alpha*T)^(-1) of a bounded operator.

    Parameters
    ----------
    T : array_like
        Square complex matrix.
    alpha : float
        Averaging parameter in (0, 1); more generally any real with
        I - alpha*T invertible.
    solver_tol : float
        Relative residual bound enforced on the linear solve.

    Raises
    ------
    SingularResolvent
        If I - alpha*T is numerically singular (condition estimate above
        the module threshold), e.g. when 1/alpha is an eigenvalue of T.
    """
    T = as_complex_matrix(T)
    n = T.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    M = eye - alpha * T
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > SINGULAR_COND:
        raise SingularResolvent(
            f"I - alpha*T is numerically singular (cond ~ {cond:.3e})"
        )
    A = np.linalg.solve(M, (1.0 - alpha) * eye)
    residual = np.linalg.norm(M @ A - (1.0 - alpha) * eye)
    scale = 1.0 + np.linalg.norm(M) * np.linalg.norm(A)
    if residual > solver_tol * scale:
        raise SingularResolvent(
            f"resolvent solve residual {residual:.3e} exceeds tolerance"
        )
    return A


def abel_series(T, alpha: float, terms: int) -> np.ndarray:
    """Partial sum (1-alpha) * sum_{k=0}^{terms} alpha^k T^k.

    Converges to abel_linear(T, alpha) as terms grows whenever the
    spectral radius of alpha*T is below 1; outside that regime a warning
    is emitted and the partial sum is still returned.
    """
    T = as_complex_matrix(T)
    rho = float(np.max(np.abs(_eigvals(alpha * T)))) if T.shape[0] else 0.0
    if rho >= 1.0:
        warnings.warn(
            f"spectral radius of alpha*T is {rho:.4f} >= 1; "
            "the series does not converge and only the partial sum is returned",
            RuntimeWarning,
            stacklevel=2,
        )
    n = T.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    # Horner form: S = I + (aT)(I + (aT)(... )) accumulates sum_{k<=terms}.
    S = eye.copy()
    aT = alpha * T
    for _ in range(terms):
        S = eye + aT @ S
    return (1.0 - alpha) * S


def spectral_projection(T, eig_tol: float = 1e-8) -> np.ndarray:
    """Projection onto Ker(I-T) along Im(I-T).

    Valid when the eigenvalue 1 of T is absent or semisimple; bases for
    kernel and image come from the SVD of T - I.
    """
    T = as_complex_matrix(T)
    n = T.shape[0]
    B = T - np.eye(n, dtype=np.complex128)
    U, s, Vh = np.linalg.svd(B)
    if s.size and s[0] > 0:
        r = int(np.count_nonzero(s > RANK_CUTOFF * s[0]))
    else:
        r = 0
    k = n - r
    if k == 0:
        return np.zeros((n, n), dtype=np.complex128)
    ker = Vh.conj().T[:, r:]          # orthonormal basis of Ker(T - I)
    im = U[:, :r]                     # orthonormal basis of Im(T - I)
    M = np.concatenate([ker, im], axis=1)
    try:
        Minv = np.linalg.inv(M)
    except np.linalg.LinAlgError as exc:
        raise EigensolverFailure(
            "kernel and image of I - T do not span the space; "
            "the eigenvalue 1 is not semisimple"
        ) from exc
    return ker @ Minv[:k, :]


def classify_linear(
    T,
    eig_tol: float = 1e-8,
    boundary_tol: float = 1e-9,
) -> SpectralReport:
    """Classify the power convergence of the Abel averages of T.

    Every eigenvalue within eig_tol of 1 is treated as the eigenvalue 1.
    in_half_plane requires the remaining spectrum to satisfy
    Re(zeta) < 1 - boundary_tol; eigenvalues on the strip boundary are
    flagged via boundary_hit and classified as outside (the half-plane in
    the convergence criterion is open).  splitting_ok tests semisimplicity
    of the eigenvalue 1 through rank(T-I) == rank((T-I)^2).
    """
    T = as_complex_matrix(T)
    eigs = _eigvals(T)
    is_one = np.abs(eigs - 1.0) <= eig_tol
    others = eigs[~is_one]
    boundary = np.any(others.real >= 1.0 - boundary_tol) if others.size else False
    in_half_plane = bool(not boundary)

    if np.any(is_one):
        B = T - np.eye(T.shape[0], dtype=np.complex128)
        splitting_ok = numerical_rank(B) == numerical_rank(B @ B)
    else:
        splitting_ok = True

    converges = in_half_plane and splitting_ok
    projection = spectral_projection(T, eig_tol=eig_tol) if converges else None
    return SpectralReport(
        eigenvalues=eigs,
        in_half_plane=in_half_plane,
        splitting_ok=splitting_ok,
        converges=converges,
        limit_projection=projection,
        boundary_hit=bool(boundary),
    )


def power_limit(
    A,
    tol: float,
    max_n: int,
    blowup: float = 1e12,
    window: int = 5,
) -> Optional[np.ndarray]:
    """Limit of the matrix power sequence A^n, or None on divergence.

    Uses repeated squaring: once two successive squarings differ by less
    than tol, the value is confirmed over `window` further single steps
    (multiplications by A), each allowed to move by at most 10 tol.  The
    step confirmation is what rejects period-2 oscillation, which plain
    squaring cannot see, and the returned limit satisfies
    ||A L - L|| <= 10 tol.

    Raises
    ------
    Overflow
        If some power's norm exceeds `blowup` (divergence by blow-up).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    A = as_complex_matrix(A)
    B = A.copy()
    n_eff = 1
    while n_eff <= max_n:
        C = B @ B
        n_eff *= 2
        norm_C = np.linalg.norm(C)
        if not np.isfinite(norm_C) or norm_C > blowup:
            raise Overflow(
                f"||A^{n_eff}|| = {norm_C:.3e} exceeded the blow-up threshold"
            )
        if np.linalg.norm(C - B, 2) < tol:
            limit = C
            for _ in range(window):
                nxt = A @ limit
                if not np.isfinite(np.linalg.norm(nxt)) or np.linalg.norm(
                    nxt - limit, 2
                ) > 10.0 * tol:
                    return None
                limit = nxt
            if np.linalg.norm(A @ limit - limit, 2) <= 10.0 * tol:
                return limit
            return None
        B = C
    return None


def is_dissipative_linear(T) -> tuple[bool, float]:
    """Dissipativity test Re<Tx, x> <= 0 for all x, with certificate.

    In the Euclidean setting the duality map is J(x) = {x}, so
    dissipativity reduces to the largest eigenvalue of the Hermitian part
    (T + T*)/2 being non-positive.  Returns (is_dissipative, lambda_max).
    """
    T = as_complex_matrix(T)
    H = (T + T.conj().T) / 2.0
    try:
        lam = np.linalg.eigvalsh(H)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise EigensolverFailure(str(exc)) from exc
    lam_max = float(lam[-1])
    return lam_max <= 0.0, lam_max
