"""Numerical range, numerical radius and dissipativity certification.

For a holomorphic map h on the unit ball, the numerical range collects the
pairings <h(s x), x> over unit vectors x and s in (0, 1); the numerical
radius is the limsup of its real part as s -> 1-.  A map is
omega-dissipative when, near the boundary of the ball,

    Re <h(x), x>  <=  omega ||x||^2 + varsigma (1 - ||x||^2)

for some finite varsigma.  This module estimates these quantities by
seeded sampling plus deterministic boundary ladders and sphere ascent; all
reported numbers are attained sample values, never extrapolations, except
for the secant limit of the norm derivative which is labelled as such.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._sampling import (
    random_directions,
    sphere_ascend,
    structured_directions,
    top_k,
)
from .maps import HoloMap, eval_map, jacobian

__all__ = [
    "DissipativityReport",
    "NumericalRadiusEstimate",
    "numerical_range_samples",
    "numerical_radius",
    "omega_dissipative_estimate",
    "harris_norm_limit",
]

#: Default s-ladder for numerical-radius estimates.
S_LADDER = (0.9, 0.99, 0.999, 0.9999)

#: Default t-ladder for the norm-derivative secants.
T_LADDER = (1e-2, 1e-3, 1e-4)


@dataclass(frozen=True)
class NumericalRadiusEstimate:
    """Sampled sups of Re<h(s x), x> along an increasing s-ladder.

    limsup_estimate is the max over the last three ladder entries.
    """

    s_values: np.ndarray
    sup_re_values: np.ndarray
    limsup_estimate: float


@dataclass(frozen=True)
class DissipativityReport:
    """Outcome of a boundary-shell dissipativity fit.

    varsigma_fit is the smallest slack constant making the defining
    inequality hold on every sample.  Stability is probed by refitting on
    a doubled, deeper sample set: max_violation is the worst amount by
    which the refined samples exceed the first fit plus a 10% stability
    band, so holds is equivalent to the fit being stable under refinement.
    """

    omega: float
    varsigma_fit: float
    epsilon_shell: float
    max_violation: float
    holds: bool
    samples: int
    seed: int


def _pairings(h: HoloMap, s: float, dirs: np.ndarray) -> np.ndarray:
    vals = np.empty(dirs.shape[0], dtype=np.complex128)
    for i, u in enumerate(dirs):
        vals[i] = np.vdot(u, eval_map(h, s * u))  # <h(su), u>
    return vals


def _unit_dirs(dim: int, samples: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.concatenate(
        [structured_directions(dim), random_directions(dim, samples, rng)], axis=0
    )


def numerical_range_samples(
    h: HoloMap, s: float, samples: int, seed: int = 42
) -> np.ndarray:
    """Pairings <h(s x), x> over seeded unit vectors x.

    Deterministic structured directions are included ahead of the random
    ones; every returned value is a genuine numerical-range point.
    """
    if not 0.0 < s < 1.0:
        raise ValueError("s must lie in (0, 1)")
    return _pairings(h, s, _unit_dirs(h.dim, samples, seed))


def _ascend_re_pairing(h: HoloMap, s: float, u0: np.ndarray, iters: int = 40):
    def objective(u):
        return float(np.real(np.vdot(u, eval_map(h, s * u))))

    def grad(u):
        x = s * u
        return s * (jacobian(h, x).conj().T @ u) + eval_map(h, x)

    return sphere_ascend(objective, grad, u0, iters=iters)


def numerical_radius(
    h: HoloMap,
    s_values: Optional[Sequence[float]] = None,
    samples: int = 10_000,
    seed: int = 42,
    polish_iters: int = 40,
) -> NumericalRadiusEstimate:
    """Estimate the numerical radius limsup_{s->1-} sup Re<h(sx), x>.

    Per ladder entry s, the sup is taken over the seeded sample set and
    then sharpened by projected-gradient ascent from the best starting
    directions; ascent evaluates true pairings so the estimate remains a
    lower bound of the sup.  The limsup is reported as the max over the
    last three ladder entries.
    """
    s_arr = np.asarray(S_LADDER if s_values is None else s_values, dtype=float)
    if np.any(s_arr <= 0.0) or np.any(s_arr >= 1.0) or np.any(np.diff(s_arr) <= 0):
        raise ValueError("s_values must be increasing inside (0, 1)")
    sups = np.empty_like(s_arr)
    for i, s in enumerate(s_arr):
        dirs = _unit_dirs(h.dim, samples, seed + i)
        re_vals = _pairings(h, s, dirs).real
        best = float(np.max(re_vals))
        for j in top_k(re_vals, 3):
            _, v = _ascend_re_pairing(h, s, dirs[j], iters=polish_iters)
            best = max(best, v)
        sups[i] = best
    tail = sups[-3:] if sups.size >= 3 else sups
    return NumericalRadiusEstimate(
        s_values=s_arr,
        sup_re_values=sups,
        limsup_estimate=float(np.max(tail)),
    )


def _ladder_directions(h: HoloMap, epsilon: float, samples: int, seed: int,
                       extra_directions) -> np.ndarray:
    """Unit directions for the boundary ladder.

    Structured directions and any caller-supplied ones, plus the worst
    directions of the shallow-shell pairing Re<h(r u), u> found by ascent
    from the best sampled starts; for maps violating the dissipativity
    inequality these are the directions whose deep-shell ratios blow up.
    """
    dim = h.dim
    dirs = [structured_directions(dim)]
    if extra_directions is not None:
        extra = np.asarray(extra_directions, dtype=np.complex128)
        norms = np.linalg.norm(extra, axis=1, keepdims=True)
        dirs.append(extra / norms)
    rng = np.random.default_rng(seed)
    pool = np.concatenate(dirs + [random_directions(dim, samples, rng)], axis=0)
    r0 = 1.0 - 0.5 * epsilon
    vals = _pairings(h, r0, pool).real
    ascended = []
    for j in top_k(vals, 3):
        u, _ = _ascend_re_pairing(h, r0, pool[j], iters=40)
        ascended.append(u)
    return np.concatenate(dirs + [np.array(ascended)], axis=0)


def _shell_samples(
    h: HoloMap,
    epsilon: float,
    samples: int,
    seed: int,
    extra_directions,
) -> np.ndarray:
    """Shell points: deterministic direction/radius ladder plus random fill.

    The ladder radii 1 - epsilon/2 * 4^(-k) march toward the boundary with
    a depth that grows with the sample count, so refining the sample set
    genuinely probes deeper shells.
    """
    dim = h.dim
    depth = max(4, int(math.ceil(math.log2(max(samples, 2)))))
    radii = 1.0 - 0.5 * epsilon * 4.0 ** (-np.arange(depth, dtype=float))
    det = _ladder_directions(h, epsilon, samples, seed, extra_directions)
    parts = [r * det for r in radii]
    rng = np.random.default_rng(seed + 1)
    rand_dirs = random_directions(dim, samples, rng)
    rand_radii = 1.0 - epsilon * rng.uniform(1e-9, 1.0, size=(samples, 1))
    parts.append(rand_dirs * rand_radii)
    return np.concatenate(parts, axis=0)


def _fit_varsigma(h: HoloMap, omega: float, pts: np.ndarray):
    """Smallest varsigma feasible on the samples, with per-point data."""
    num = np.empty(pts.shape[0])
    slack = np.empty(pts.shape[0])
    for i, x in enumerate(pts):
        r2 = float(np.real(np.vdot(x, x)))
        num[i] = float(np.real(np.vdot(x, eval_map(h, x)))) - omega * r2
        slack[i] = 1.0 - r2
    return float(np.max(num / slack)), num, slack


def omega_dissipative_estimate(
    h: HoloMap,
    omega: float,
    epsilon_shell: float = 0.1,
    samples: int = 10_000,
    seed: int = 42,
    violation_tol: float = 0.0,
    extra_directions=None,
) -> DissipativityReport:
    """Certify omega-dissipativity by boundary-shell sampling.

    Fits the minimal varsigma on a first sample batch, then refits on a
    doubled batch whose deterministic ladder reaches one rung deeper.  For
    genuinely dissipative maps the fitted constant is bounded by the true
    slack and stays put; for violating maps the deeper rungs drive it to
    grow without bound.  holds records whether the refined samples stay
    within a 10% stability band of the first fit.

    extra_directions, if given, are additional unit directions folded into
    the deterministic ladder (useful for maps whose violating directions
    are known in structure, e.g. smooth grid profiles).
    """
    if not 0.0 < epsilon_shell < 1.0:
        raise ValueError("epsilon_shell must lie in (0, 1)")
    pts1 = _shell_samples(h, epsilon_shell, samples, seed, extra_directions)
    fit1, _, _ = _fit_varsigma(h, omega, pts1)
    pts2 = _shell_samples(
        h, epsilon_shell, 2 * samples, seed + 1_000_003, extra_directions
    )
    fit2, num2, slack2 = _fit_varsigma(h, omega, pts2)
    cap = fit1 + 0.1 * (1.0 + abs(fit1))
    max_violation = float(np.max(num2 - cap * slack2))
    holds = max_violation <= violation_tol
    return DissipativityReport(
        omega=float(omega),
        varsigma_fit=max(fit1, fit2),
        epsilon_shell=float(epsilon_shell),
        max_violation=max_violation,
        holds=bool(holds),
        samples=samples,
        seed=seed,
    )


def harris_norm_limit(
    h: HoloMap,
    t_values: Optional[Sequence[float]] = None,
    r: float = 0.999,
    samples: int = 10_000,
    seed: int = 42,
    polish_iters: int = 40,
) -> float:
    """Secant estimate of the norm derivative lim_{t->0+} (||I + t h|| - 1)/t.

    ||I + t h|| is estimated on the sphere of radius r as the sup of
    ||x + t h(x)|| relative to the sphere radius (the relative form keeps
    the secant free of the 1 - r offset), sharpened by sphere ascent; the
    returned value is the secant at the smallest t.  Agrees with the
    numerical radius within combined sampling slack.
    """
    ts = np.asarray(T_LADDER if t_values is None else t_values, dtype=float)
    if np.any(ts <= 0.0) or np.any(np.diff(ts) >= 0):
        raise ValueError("t_values must be positive and decreasing")
    if not 0.0 < r < 1.0:
        raise ValueError("r must lie in (0, 1)")
    secant = np.nan
    for i, t in enumerate(ts):

        def objective(u, t=t):
            x = r * u
            return float(np.linalg.norm(x + t * eval_map(h, x)))

        def grad(u, t=t):
            x = r * u
            w = x + t * eval_map(h, x)
            nw = np.linalg.norm(w)
            if nw == 0.0:
                return np.zeros_like(u)
            return r * (w + t * (jacobian(h, x).conj().T @ w)) / nw

        dirs = _unit_dirs(h.dim, samples, seed + i)
        vals = np.array([objective(u) for u in dirs])
        best = float(np.max(vals))
        for j in top_k(vals, 3):
            _, v = sphere_ascend(objective, grad, dirs[j], iters=polish_iters)
            best = max(best, v)
        secant = (best / r - 1.0) / t
    return float(secant)
