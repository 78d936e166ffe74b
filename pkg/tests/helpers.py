"""Shared constructions for the nonlinear test suites."""

import numpy as np

from abelav import compose_affine_perturbation, polynomial_map


def quadratic_perturbation(dim, scale, seed, support=None):
    """Polynomial map with g(0) = 0 and g'(0) = 0 (pure quadratic).

    When `support` is given, monomials only involve those coordinates.
    Feeding the eigendirections of a neutral eigenvalue from themselves
    would break the self-map structure the convergence theory assumes, so
    convergent test maps restrict the support to contracting coordinates.
    """
    rng = np.random.default_rng(seed)
    pool = list(range(dim)) if support is None else list(support)
    monomials = []
    for coord in range(dim):
        j, k = rng.choice(pool, size=2)
        exps = [0] * dim
        exps[j] += 1
        exps[k] += 1
        coeff = scale * (rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1))
        monomials.append((coord, coeff, tuple(exps)))
    return polynomial_map(dim, monomials, description=f"quad[{scale}]")


def engineered_map(eigs, scale=0.15, seed=0, omega=None):
    """h = D + g with D diagonal and g quadratic: sigma(h'(0)) = eigs.

    With omega given, the quadratic part is supported on the coordinates
    whose eigenvalue differs from omega, so the omega-eigenplane stays a
    genuine fixed manifold of the average.
    """
    eigs = np.asarray(eigs, dtype=np.complex128)
    support = None
    if omega is not None:
        support = [i for i, lam in enumerate(eigs) if abs(lam - omega) > 1e-12]
        if not support:
            support = None  # pure omega*I: keep g = quadratic anyway
    g = quadratic_perturbation(eigs.size, scale, seed, support=support)
    return compose_affine_perturbation(np.diag(eigs), g)


def engineered_cases(omega=1.0, alpha=0.5):
    """Gallery for the two directions of the convergence criterion.

    Returns (positive, negative, jordan_like) lists of maps for which,
    at the given (alpha, omega):

    * positive: spectrum inside the admissible region, omega semisimple
      -> every orbit from a small probe converges;
    * negative: some eigenvalue strictly inside the complementary disk
      (away from its boundary) -> orbits blow up or escape;
    * jordan_like: maps whose linear part has a non-semisimple eigenvalue
      omega -> splitting fails, no convergence prediction.
    """
    assert omega == 1.0 and alpha == 0.5, "cases are engineered for (0.5, 1)"
    positive = [
        engineered_map([1.0, 0.5], seed=1, omega=omega),
        engineered_map([0.3 + 0.4j, -0.5], seed=2, omega=omega),
        engineered_map([1.0, 1.0, 0.2], scale=0.1, seed=3, omega=omega),
        engineered_map([-0.2 - 0.3j, 0.6, 1.0], scale=0.1, seed=4, omega=omega),
    ]
    # complementary disk at (alpha, omega) = (0.5, 1): |zeta - 2| < 1
    negative = [
        engineered_map([1.7, 0.3], seed=5),
        engineered_map([2.0 + 0.5j, 0.2], seed=6),
        engineered_map([2.9, 1.0], seed=7),
    ]
    jordan = np.array([[1.0, 1.0], [0.0, 1.0]], dtype=np.complex128)
    jordan_like = [
        compose_affine_perturbation(jordan, quadratic_perturbation(2, 0.1, 8))
    ]
    return positive, negative, jordan_like


def seeded_probes(dim, count, seed, max_norm=0.35):
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(count):
        z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        pts.append(z * (max_norm * rng.uniform(0.3, 1.0) / np.linalg.norm(z)))
    return pts
