"""Seeded point generation on spheres and shells of the complex unit ball.

Sup-type quantities (boundedness constants, numerical radii, dissipativity
fits) are estimated by maximising over sample sets.  Pure random sampling
badly under-covers extrema in more than a few dimensions, so every sampler
here mixes three ingredients:

* seeded random directions (complex Gaussian, normalised),
* a deterministic structured family: coordinate axes, the constant vector
  and low-frequency sine profiles, each with a few phases — cheap
  candidates for extrema of smooth functionals, in particular for maps
  that discretise differential operators on a grid,
* optional projected-gradient ascent on the sphere to polish the best
  candidates.

All generation is deterministic given (dim, seed, count).
"""

from __future__ import annotations

from typing import Callable, Iterable, Optional

import numpy as np

_PHASES = (1.0 + 0.0j, -1.0 + 0.0j, 1.0j)


def random_directions(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """(count, dim) array of uniformly distributed unit vectors in C^dim."""
    z = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    norms = np.linalg.norm(z, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return z / norms


def structured_directions(dim: int, max_axes: int = 8) -> np.ndarray:
    """Deterministic unit directions: axes, constant, low sine modes, phased."""
    base = []
    for j in range(min(dim, max_axes)):
        e = np.zeros(dim, dtype=np.complex128)
        e[j] = 1.0
        base.append(e)
    if dim > max_axes:  # always include the last axis
        e = np.zeros(dim, dtype=np.complex128)
        e[-1] = 1.0
        base.append(e)
    ones = np.ones(dim, dtype=np.complex128) / np.sqrt(dim)
    base.append(ones)
    if dim >= 3:
        theta = np.arange(1, dim + 1) / (dim + 1.0)
        for k in (1, 2, 3):
            v = np.sin(k * np.pi * theta).astype(np.complex128)
            nrm = np.linalg.norm(v)
            if nrm > 0:
                base.append(v / nrm)
    out = [phase * v for v in base for phase in _PHASES]
    return np.array(out)


def sphere_points(
    dim: int,
    radius: float,
    count: int,
    seed: int,
    include_structured: bool = True,
) -> np.ndarray:
    """Points of norm exactly `radius`: structured directions first."""
    rng = np.random.default_rng(seed)
    parts = []
    if include_structured:
        parts.append(structured_directions(dim))
    if count > 0:
        parts.append(random_directions(dim, count, rng))
    return radius * np.concatenate(parts, axis=0)


def ball_points(
    dim: int,
    max_radius: float,
    count: int,
    seed: int,
    include_structured: bool = True,
) -> np.ndarray:
    """Points with norms spread over (0, max_radius].

    Structured directions are placed at max_radius first (the extreme
    shell is the strongest probe), then random directions at random radii.
    """
    rng = np.random.default_rng(seed)
    parts = []
    if include_structured:
        parts.append(max_radius * structured_directions(dim))
    if count > 0:
        dirs = random_directions(dim, count, rng)
        radii = max_radius * rng.uniform(0.05, 1.0, size=(count, 1))
        parts.append(dirs * radii)
    return np.concatenate(parts, axis=0)


def shell_radii_ladder(epsilon: float, depth: int) -> np.ndarray:
    """Radii 1 - epsilon * 4^(-k), k = 0..depth-1, marching toward 1."""
    k = np.arange(depth, dtype=float)
    return 1.0 - epsilon * 4.0 ** (-k)


def sphere_ascend(
    objective: Callable[[np.ndarray], float],
    gradient: Callable[[np.ndarray], np.ndarray],
    u0: np.ndarray,
    iters: int = 40,
    step0: float = 0.5,
) -> tuple[np.ndarray, float]:
    """Projected-gradient ascent of a smooth functional on the unit sphere.

    `gradient` is the gradient with respect to the real inner product
    Re<., .>; the tangential component is followed with backtracking.
    Returns the best (unit vector, value) visited, so the result is always
    an attained value, never an extrapolation.
    """
    u = u0 / np.linalg.norm(u0)
    best_u, best_v = u, objective(u)
    step = step0
    for _ in range(iters):
        g = gradient(u)
        g_t = g - np.real(np.vdot(u, g)) * u
        gnorm = np.linalg.norm(g_t)
        if gnorm < 1e-14:
            break
        improved = False
        while step >= 1e-10:
            cand = u + step * g_t / gnorm
            cand = cand / np.linalg.norm(cand)
            v = objective(cand)
            if v > best_v:
                u, best_u, best_v = cand, cand, v
                improved = True
                step *= 1.5
                break
            step *= 0.5
        if not improved:
            break
    return best_u, best_v


def top_k(values: Iterable[float], k: int) -> np.ndarray:
    """Indices of the k largest values, descending."""
    arr = np.asarray(list(values), dtype=float)
    k = min(k, arr.size)
    idx = np.argpartition(-arr, k - 1)[:k] if k > 0 else np.array([], dtype=int)
    return idx[np.argsort(-arr[idx])]
