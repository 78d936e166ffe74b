"""Tests for the nonlinear Abel average: solves, classification, orbits."""

import numpy as np
import pytest

from abelav import (
    AbelConfig,
    AuditFailure,
    B2Example,
    DomainEscape,
    abel_average_map,
    b2_map,
    b2_omega_zero_phi,
    b2_phi_closed_form,
    b2_phi_n_closed_form,
    b2_retraction_closed_form,
    classify_convergence,
    constant_map,
    eval_map,
    identity_map,
    in_q_omega,
    iterate_to_retraction,
    jacobian,
    linear_map,
    numerical_rank,
    phi_derivative_at_zero,
    pseudo_contractive_probe,
    retraction_audit,
    small_alpha_limit_check,
    solve_abel,
    spectrum_at_zero,
)
from helpers import engineered_cases, seeded_probes

E = B2Example(lam=1.0, epsilon=0.5)


def residual(h, cfg, x, y):
    return np.linalg.norm(
        y - cfg.alpha * eval_map(h, y) - (1 - cfg.alpha * cfg.omega) * np.asarray(x)
    )


class TestConfig:
    def test_rejects_alpha_omega_product_one(self):
        with pytest.raises(ValueError):
            AbelConfig(alpha=0.5, omega=2.0)

    def test_rejects_bad_tolerances(self):
        with pytest.raises(ValueError):
            AbelConfig(alpha=0.5, omega=1.0, newton_tol=0.0)
        with pytest.raises(ValueError):
            AbelConfig(alpha=0.5, omega=1.0, ball_margin=-1.0)

    def test_q_omega(self):
        assert in_q_omega(0.5, 1.0) and not in_q_omega(1.2, 1.0)
        assert in_q_omega(100.0, 0.0) and not in_q_omega(-0.1, 0.0)
        assert in_q_omega(-1.0, -2.0) and in_q_omega(3.0, -2.0)
        assert not in_q_omega(-0.3, -2.0)  # -0.5 < -0.3 < 0


class TestSolve:
    def test_scaled_identity_is_fixed(self):
        for omega in (1.0, -0.5, 2.0):
            h = linear_map(omega * np.eye(2))
            cfg = AbelConfig(alpha=0.3, omega=omega)
            x = np.array([0.3, 0.2])
            np.testing.assert_allclose(solve_abel(h, cfg, x), x, atol=1e-11)

    def test_b2_closed_form_point(self):
        cfg = AbelConfig(alpha=0.5, omega=1.0)
        y = solve_abel(b2_map(E), cfg, [0.1, 0.4])
        np.testing.assert_allclose(y, [0.12, 0.2], atol=1e-11)

    def test_zero_map_omega_zero_is_identity(self):
        h = constant_map([0.0, 0.0])
        cfg = AbelConfig(alpha=0.7, omega=0.0)
        x = np.array([0.4, -0.2 + 0.1j])
        np.testing.assert_allclose(solve_abel(h, cfg, x), x, atol=1e-12)

    def test_residual_recheck(self):
        rng = np.random.default_rng(0)
        h = b2_map(E)
        cfg = AbelConfig(alpha=0.5, omega=1.0)
        for _ in range(10):
            x = rng.standard_normal(2) * 0.3
            y = solve_abel(h, cfg, x)
            assert residual(h, cfg, x, y) <= cfg.newton_tol

    def test_origin_preserved(self):
        cfg = AbelConfig(alpha=0.5, omega=1.0)
        y = solve_abel(b2_map(E), cfg, [0.0, 0.0])
        assert np.linalg.norm(y) <= cfg.newton_tol

    def test_fixed_point_set(self):
        # (xi, 0) solve lam*xi = h_1(xi, 0) exactly for omega = lam
        cfg = AbelConfig(alpha=0.5, omega=1.0)
        for xi in (0.3, -0.5 + 0.2j):
            p = np.array([xi, 0.0])
            np.testing.assert_allclose(
                solve_abel(b2_map(E), cfg, p), p, atol=10 * cfg.newton_tol
            )
        # omega = 0: the null set lam*xi = -eps*eta^2, inside the ball
        cfg0 = AbelConfig(alpha=0.4, omega=0.0)
        eta = 0.3
        p = np.array([-0.5 * eta**2, eta])
        np.testing.assert_allclose(
            solve_abel(b2_map(E), cfg0, p), p, atol=10 * cfg0.newton_tol
        )

    def test_domain_escape_near_boundary(self):
        cfg = AbelConfig(alpha=1.9, omega=1.0)
        with pytest.raises(DomainEscape):
            solve_abel(b2_map(E), cfg, [0.0, 0.97])

    def test_matches_closed_form_on_grid(self):
        h = b2_map(E)
        for alpha in (0.1, 0.5, 0.9):
            cfg = AbelConfig(alpha=alpha, omega=1.0)
            for xi in np.linspace(-0.4, 0.4, 5):
                for eta in np.linspace(-0.4, 0.4, 5):
                    x = [xi, eta]
                    np.testing.assert_allclose(
                        solve_abel(h, cfg, x),
                        b2_phi_closed_form(E, alpha, x),
                        atol=1e-10,
                    )

    def test_alpha_zero_is_identity(self):
        cfg = AbelConfig(alpha=0.0, omega=1.0)
        x = np.array([0.2, 0.1j])
        np.testing.assert_allclose(solve_abel(b2_map(E), cfg, x), x)


class TestProbe:
    def test_identity_always_self_map(self):
        res = pseudo_contractive_probe(identity_map(2), 1.0, [0.5], samples=50)
        assert res[0][1] is True and res[0][2] is None

    def test_b2_small_alpha_self_map(self):
        # oracle: the closed form maps a dense boundary shell into the ball
        rng = np.random.default_rng(11)
        z = rng.standard_normal((20_000, 2)) + 1j * rng.standard_normal((20_000, 2))
        z *= 0.9999 / np.linalg.norm(z, axis=1, keepdims=True)
        img = np.stack([b2_phi_closed_form(E, 0.1, p) for p in z])
        assert np.max(np.linalg.norm(img, axis=1)) < 1.0
        res = pseudo_contractive_probe(b2_map(E), 1.0, [0.1], samples=100)
        assert res[0][1] is True

    def test_b2_large_alpha_fails_on_axis_family(self):
        res = pseudo_contractive_probe(b2_map(E), 1.0, [0.5, 1.9], samples=100)
        by_alpha = {a: (ok, w) for a, ok, w in res}
        assert by_alpha[0.5][0] is True
        ok, witness = by_alpha[1.9]
        assert ok is False
        # witness sits on the second-coordinate axis near the boundary
        assert abs(witness[0]) < 1e-12 and abs(abs(witness[1]) - 0.999) < 1e-12


class TestSmallAlphaLimits:
    def test_scaled_identity_zero_residuals(self):
        h = linear_map(1.0 * np.eye(2))
        out = small_alpha_limit_check(h, 1.0, [0.3, 0.2], [0.1, 0.01])
        for first, second in out:
            assert first < 1e-11 and second < 1e-9

    def test_b2_residuals_match_hand_expansion(self):
        # expanding the closed form: (Phi(x)-x)/alpha - (h(x)-x) = (-eps*alpha*eta^2, 0)
        x = np.array([0.1, 0.2])
        alphas = [0.1, 0.01, 0.001]
        out = small_alpha_limit_check(b2_map(E), 1.0, x, alphas)
        seconds = [s for _, s in out]
        for (first, second), alpha in zip(out, alphas):
            assert abs(second - 0.5 * alpha * abs(x[1]) ** 2) < 1e-9
        assert seconds == sorted(seconds, reverse=True)
        assert seconds[-1] < 1e-3

    def test_zero_map_omega_zero(self):
        h = constant_map([0.0, 0.0])
        out = small_alpha_limit_check(h, 0.0, [0.2, -0.1], [0.1, 0.01])
        for first, second in out:
            assert first < 1e-12 and second < 1e-10


class TestDerivativeAtZero:
    def test_diagonal_formula(self):
        h = linear_map(np.diag([1.0, 0.0]))
        cfg = AbelConfig(alpha=0.5, omega=1.0)
        np.testing.assert_allclose(
            phi_derivative_at_zero(h, cfg), np.diag([1.0, 0.5]), atol=1e-12
        )

    def test_scaled_identity_gives_identity(self):
        h = linear_map(0.7 * np.eye(3))
        cfg = AbelConfig(alpha=0.4, omega=0.7)
        np.testing.assert_allclose(phi_derivative_at_zero(h, cfg), np.eye(3), atol=1e-12)

    def test_finite_difference_of_numeric_solve(self):
        h = b2_map(E)
        cfg = AbelConfig(alpha=0.5, omega=1.0)
        phi = abel_average_map(h, cfg)
        J_fd = jacobian(phi, np.zeros(2))
        np.testing.assert_allclose(
            J_fd, phi_derivative_at_zero(h, cfg), atol=1e-6
        )


class TestClassify:
    def test_b2_region_omega_lambda(self):
        # admissible exactly when |1 - alpha*lam| < 1
        for lam in (1.0, 0.8 + 0.3j):
            h = b2_map(B2Example(lam=lam, epsilon=0.5))
            for alpha in (0.3, 0.9, 1.5, 2.5, -0.4):
                if abs(alpha * lam - 1) < 1e-12:
                    continue
                cfg = AbelConfig(alpha=alpha, omega=1.0)
                if lam != 1.0:
                    # omega must equal lam for the eigenvalue lam to be exempt
                    cfg = None
                if cfg is None:
                    continue
                verdict = classify_convergence(h, cfg)
                assert verdict.in_region == (abs(1 - alpha * lam) < 1)

    def test_b2_region_omega_zero(self):
        h = b2_map(E)
        for alpha in (-1.5, -0.5, 0.5, 2.5):
            verdict = classify_convergence(h, AbelConfig(alpha=alpha, omega=0.0))
            assert verdict.in_region == (abs(1 - alpha * 1.0) > 1)

    def test_scaled_identity_trivial(self):
        h = linear_map(0.8 * np.eye(2))
        verdict = classify_convergence(h, AbelConfig(alpha=0.5, omega=0.8))
        assert verdict.in_region and verdict.splitting_ok
        assert verdict.predicted_convergence

    def test_boundary_hit_flag(self):
        # eigenvalue on the circle |zeta - 1/alpha| = |omega - 1/alpha|:
        # alpha=0.5, omega=1 -> circle centre 2 radius 1; zeta=3 sits on it
        h = linear_map(np.diag([1.0, 3.0]))
        verdict = classify_convergence(h, AbelConfig(alpha=0.5, omega=1.0))
        assert verdict.boundary_hit and not verdict.in_region

    def test_jordan_block_at_omega(self):
        _, _, jordan_like = engineered_cases()
        verdict = classify_convergence(jordan_like[0], AbelConfig(alpha=0.5, omega=1.0))
        assert not verdict.splitting_ok
        assert not verdict.predicted_convergence

    def test_spectral_mapping_across_gallery(self):
        pos, neg, jor = engineered_cases()
        cfg = AbelConfig(alpha=0.5, omega=1.0)
        for h in pos + neg + jor:
            eigs_h = spectrum_at_zero(h)
            mapped = np.sort_complex(
                (1 - cfg.alpha * cfg.omega) / (1 - cfg.alpha * eigs_h)
            )
            eigs_phi = np.sort_complex(np.linalg.eigvals(phi_derivative_at_zero(h, cfg)))
            np.testing.assert_allclose(mapped, eigs_phi, atol=1e-8)

    def test_kernel_dimension_transfer(self):
        # dim Ker(I - Phi'(0)) == dim Ker(omega I - h'(0))
        pos, _, _ = engineered_cases()
        cfg = AbelConfig(alpha=0.5, omega=1.0)
        for h in pos:
            n = h.dim
            J = jacobian(h, np.zeros(n))
            D = phi_derivative_at_zero(h, cfg)
            dim_h = n - numerical_rank(cfg.omega * np.eye(n) - J)
            dim_phi = n - numerical_rank(np.eye(n) - D)
            assert dim_h == dim_phi


class TestIterate:
    def test_point_already_fixed(self):
        cfg = AbelConfig(alpha=0.5, omega=1.0)
        trace = iterate_to_retraction(b2_map(E), cfg, [0.3, 0.0])
        assert trace.verdict == "converged"
        assert trace.steps == 1
        np.testing.assert_allclose(trace.limit, [0.3, 0.0], atol=1e-11)

    def test_b2_limit_matches_retraction_formula(self):
        cfg = AbelConfig(alpha=0.5, omega=1.0)
        trace = iterate_to_retraction(b2_map(E), cfg, [0.1, 0.4])
        assert trace.verdict == "converged"
        np.testing.assert_allclose(
            trace.limit, b2_retraction_closed_form(E, 0.5, [0.1, 0.4]), atol=1e-8
        )
        np.testing.assert_allclose(
            trace.limit, [0.1 + (1 / 6) * 0.16, 0.0], atol=1e-8
        )

    def test_orbit_matches_iterate_closed_form(self):
        cfg = AbelConfig(alpha=0.5, omega=1.0)
        x = [0.1, 0.4]
        trace = iterate_to_retraction(b2_map(E), cfg, x)
        for k in range(min(21, len(trace.points))):
            np.testing.assert_allclose(
                trace.points[k], b2_phi_n_closed_form(E, 0.5, k, x), atol=1e-9
            )

    def test_identity_converges_immediately(self):
        h = linear_map(np.eye(2))
        cfg = AbelConfig(alpha=0.5, omega=1.0)
        x = np.array([0.2, -0.3])
        trace = iterate_to_retraction(h, cfg, x)
        assert trace.verdict == "converged" and trace.steps == 1
        np.testing.assert_allclose(trace.limit, x, atol=1e-12)

    def test_fixed_point_characterization_of_limit(self):
        cfg = AbelConfig(alpha=0.3, omega=1.0)
        tol = 1e-10
        trace = iterate_to_retraction(b2_map(E), cfg, [0.2, 0.5], trace_tol=tol)
        assert trace.verdict == "converged"
        p = trace.limit
        assert np.linalg.norm(1.0 * p - eval_map(b2_map(E), p)) <= 10 * tol

    def test_escape_for_expanding_map(self):
        _, negative, _ = engineered_cases()
        cfg = AbelConfig(alpha=0.5, omega=1.0)
        trace = iterate_to_retraction(negative[0], cfg, [0.3, 0.1])
        assert trace.verdict in ("escaped", "diverged")


class TestConvergenceTheoremBothDirections:
    def test_positive_and_negative_cases(self):
        positive, negative, _ = engineered_cases()
        cfg = AbelConfig(alpha=0.5, omega=1.0)
        for h in positive:
            verdict = classify_convergence(h, cfg)
            assert verdict.predicted_convergence
            for x in seeded_probes(h.dim, 5, seed=13):
                trace = iterate_to_retraction(h, cfg, x)
                assert trace.verdict == "converged"
        for h in negative:
            verdict = classify_convergence(h, cfg)
            assert not verdict.in_region
            fates = [
                iterate_to_retraction(h, cfg, x).verdict
                for x in seeded_probes(h.dim, 5, seed=14)
            ]
            assert any(v in ("escaped", "diverged") for v in fates)


class TestRetractionAudit:
    def test_b2_grid_passes_all_clauses(self):
        cfg = AbelConfig(alpha=0.5, omega=1.0)
        probes = [
            [xi, eta]
            for xi in np.linspace(-0.3, 0.3, 3)
            for eta in np.linspace(-0.3, 0.3, 3)
        ]
        audit = retraction_audit(b2_map(E), cfg, probes)
        assert audit.passed
        assert max(audit.idempotence_defects) < 1e-9
        assert max(audit.membership_defects) < 1e-9

    def test_null_points_are_their_own_limits(self):
        cfg = AbelConfig(alpha=0.5, omega=1.0)
        probes = [[0.2, 0.0], [-0.4, 0.0]]
        audit = retraction_audit(b2_map(E), cfg, probes)
        for p, lim in zip(audit.probes, audit.limits):
            np.testing.assert_allclose(lim, p, atol=1e-10)

    def test_alpha_dependence_of_limits(self):
        # the retraction genuinely depends on alpha; gap from the closed form
        x = [0.1, 0.4]
        lim_a = retraction_audit(b2_map(E), AbelConfig(alpha=0.3, omega=1.0), [x]).limits[0]
        lim_b = retraction_audit(b2_map(E), AbelConfig(alpha=0.6, omega=1.0), [x]).limits[0]
        predicted_gap = 0.5 * 0.16 * ((1 - 0.3) / (2 - 0.3) - (1 - 0.6) / (2 - 0.6))
        assert abs((lim_a - lim_b)[0] - predicted_gap) < 1e-9
        assert abs(predicted_gap) > 1e-3

    def test_audit_failure_reports_clause(self):
        cfg = AbelConfig(alpha=1.9, omega=1.0)
        with pytest.raises(AuditFailure) as err:
            retraction_audit(b2_map(E), cfg, [[0.0, 0.97]])
        assert err.value.clause == "convergence"


class TestOmegaZeroNonRetract:
    def test_closed_form_fixed_family_exits_ball(self):
        # fixed points (-(eps/lam) eta^2, eta): norm^2 -> eps^2/|lam|^2 + 1 > 1
        for eta in (0.95, 0.99):
            p = np.array([-0.5 * eta**2, eta])
            np.testing.assert_allclose(
                b2_omega_zero_phi(E, -1.5, p), p, atol=1e-14
            )
            assert np.linalg.norm(p) ** 2 > 1.0
        p99 = np.array([-0.5 * 0.99**2, 0.99])
        assert abs(np.linalg.norm(p99) ** 2 - 1.2202) < 1e-4
