"""State families: validation, spectral branching with derivative blocks,
projection identities, derivative modes, and the discontinuous-projection
example."""

from __future__ import annotations

import math

import numpy as np
import pytest

from ldqfi import (
    Analytic,
    CentralDifference,
    DensityMatrix,
    StateFamily,
    branches_at,
    nonsmooth_projection_state,
    projection_audit,
    projection_curvature_residual,
    random_analytic_family,
    spectral_branches,
)
from ldqfi.errors import DegenerateCrossing, DomainError, InvalidInput, SingularState
from ldqfi.family import default_step, eval_rho, eval_rho_prime
from ldqfi.linalg import random_hermitian


def _diag_state(*values: float) -> np.ndarray:
    return np.diag(np.asarray(values, dtype=float)).astype(complex)


class TestDensityMatrix:
    def test_accepts_valid_state(self) -> None:
        dm = DensityMatrix(_diag_state(0.5, 0.3, 0.2))
        assert dm.matrix.shape == (3, 3)

    def test_rejects_nonhermitian(self) -> None:
        m = _diag_state(0.5, 0.5)
        m[0, 1] = 0.1
        with pytest.raises(InvalidInput):
            DensityMatrix(m)

    def test_rejects_bad_trace(self) -> None:
        with pytest.raises(InvalidInput):
            DensityMatrix(_diag_state(0.5, 0.4))

    def test_rejects_singular(self) -> None:
        with pytest.raises(SingularState):
            DensityMatrix(_diag_state(1.0 - 1e-14, 1e-14))

    def test_rejects_negative_eigenvalue(self) -> None:
        with pytest.raises(SingularState):
            DensityMatrix(_diag_state(1.01, -0.01))


class TestSpectralBranches:
    def test_simple_spectrum(self, random_branches) -> None:
        br = random_branches
        assert br.n_clusters == br.dim == 4
        assert list(br.cluster_mults) == [1, 1, 1, 1]
        # projections resolve the identity and are orthogonal
        total = sum(br.projection(k) for k in range(br.n_clusters))
        assert np.linalg.norm(total - np.eye(4)) <= 1e-12
        for j in range(4):
            for k in range(4):
                prod = br.projection(j) @ br.projection(k)
                ref = br.projection(j) if j == k else np.zeros((4, 4))
                assert np.linalg.norm(prod - ref) <= 1e-12

    def test_reconstruction(self, random_branches) -> None:
        br = random_branches
        rec = sum(
            br.cluster_value_primes[k] * br.projection(k)
            + br.cluster_values[k] * br.projection_prime(k)
            for k in range(br.n_clusters)
        )
        assert np.linalg.norm(rec - br.rho_prime()) <= 1e-8

    def test_true_multiplicity_clusters(self) -> None:
        rho = _diag_state(0.4, 0.4, 0.2)
        rho_prime = np.zeros((3, 3), dtype=complex)
        rho_prime[0, 2] = rho_prime[2, 0] = 0.05
        br = spectral_branches(rho, rho_prime)
        assert br.n_clusters == 2
        assert sorted(br.cluster_mults) == [1, 2]

    def test_near_crossing_with_fast_rotation_is_flagged(self) -> None:
        delta = 1e-9
        rho = _diag_state(0.5 - delta, 0.5 + delta)
        rho_prime = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
        with pytest.raises(DegenerateCrossing):
            spectral_branches(rho, rho_prime)

    def test_gap_tol_flags_close_clusters(self) -> None:
        rho = _diag_state(0.5 - 1e-4, 0.5 + 1e-4)
        rho_prime = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
        with pytest.raises(DegenerateCrossing):
            spectral_branches(rho, rho_prime, gap_tol=1e-3)
        # without gap_tol the same pair is perfectly resolvable
        assert spectral_branches(rho, rho_prime).n_clusters == 2

    def test_thermal_tail_not_merged(self) -> None:
        # eigenvalues spanning ten orders of magnitude stay separate even
        # though neighbouring tail gaps are tiny relative to the diameter
        q = 0.5
        w = q ** np.arange(30)
        w /= w.sum()
        rho = np.diag(w).astype(complex)
        rho_prime = np.zeros_like(rho)
        br = spectral_branches(rho, rho_prime)
        assert br.n_clusters == 30

    def test_gauge_invariance_inside_cluster(self, rng) -> None:
        # rotating the eigenbasis inside a degenerate cluster must not move
        # any reported output
        rho = _diag_state(0.35, 0.35, 0.3)
        h = random_hermitian(3, rng, scale=0.1)
        h = h - np.trace(h) / 3 * np.eye(3)
        br1 = spectral_branches(rho, h)
        phi = rng.uniform(0, 2 * np.pi)
        u = np.eye(3, dtype=complex)
        u[:2, :2] = np.array(
            [[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]], dtype=complex
        )
        br2 = spectral_branches(u @ rho @ u.conj().T, u @ h @ u.conj().T)
        for k in range(br1.n_clusters):
            p1 = u @ br1.projection(k) @ u.conj().T
            assert np.linalg.norm(p1 - br2.projection(k)) <= 1e-10
            dp1 = u @ br1.projection_prime(k) @ u.conj().T
            assert np.linalg.norm(dp1 - br2.projection_prime(k)) <= 1e-9
        assert np.allclose(br1.cluster_values, br2.cluster_values, atol=1e-12)
        assert np.allclose(br1.cluster_value_primes, br2.cluster_value_primes, atol=1e-10)


class TestProjectionAudit:
    def test_identities_random(self, random_branches) -> None:
        rep = projection_audit(random_branches)
        assert rep.max_identity_residual() <= 1e-9

    def test_commuting_family(self, rng) -> None:
        fam = random_analytic_family(4, rng, commuting=True)
        rep = projection_audit(branches_at(fam, 0.3))
        assert rep.max_identity_residual() <= 1e-10
        assert rep.weighted_prime_sum <= 1e-10
        assert rep.commutator <= 1e-10

    def test_noncommuting_family_has_moving_projections(self, rng) -> None:
        fam = random_analytic_family(4, rng, commuting=False)
        rep = projection_audit(branches_at(fam, 0.3))
        assert rep.max_identity_residual() <= 1e-9
        assert rep.weighted_prime_sum > 1e-6
        assert rep.commutator > 1e-6

    def test_curvature_identity(self, rng) -> None:
        worst = 0.0
        for _ in range(3):
            fam = random_analytic_family(4, rng)
            worst = max(worst, projection_curvature_residual(fam, 0.15))
        assert worst <= 1e-6


class TestDerivativeModes:
    def test_central_difference_matches_analytic(self, rng) -> None:
        fam = random_analytic_family(4, rng)
        exact = eval_rho_prime(fam, 0.2)
        import dataclasses

        numeric_fam = dataclasses.replace(fam, derivative_mode=CentralDifference())
        approx = eval_rho_prime(numeric_fam, 0.2)
        assert np.linalg.norm(exact - approx) <= 1e-8

    def test_richardson_is_tighter(self, rng) -> None:
        import dataclasses

        fam = random_analytic_family(4, rng)
        exact = eval_rho_prime(fam, 0.2)
        plain = dataclasses.replace(fam, derivative_mode=CentralDifference(step=1e-4))
        rich = dataclasses.replace(
            fam, derivative_mode=CentralDifference(step=1e-4, richardson=True)
        )
        err_plain = np.linalg.norm(eval_rho_prime(plain, 0.2) - exact)
        err_rich = np.linalg.norm(eval_rho_prime(rich, 0.2) - exact)
        assert err_rich <= err_plain

    def test_default_step_floor(self) -> None:
        assert default_step(0.0) >= 1e-5
        assert default_step(100.0) > default_step(0.0)

    def test_domain_enforced(self, rng) -> None:
        fam = random_analytic_family(4, rng)
        with pytest.raises(DomainError):
            eval_rho(fam, fam.theta_domain[1] + 1.0)


class TestBranchesAt:
    def test_matches_manual_route(self, rng) -> None:
        fam = random_analytic_family(5, rng)
        br = branches_at(fam, 0.1)
        manual = spectral_branches(eval_rho(fam, 0.1).matrix, eval_rho_prime(fam, 0.1))
        assert np.allclose(np.sort(br.eigenvalues), np.sort(manual.eigenvalues), atol=1e-12)
        assert np.linalg.norm(br.rho() - manual.rho()) <= 1e-12
        assert np.linalg.norm(br.rho_prime() - manual.rho_prime()) <= 1e-12

    def test_rho_roundtrip(self, random_branches) -> None:
        br = random_branches
        rho = br.rho()
        assert np.linalg.norm(rho - rho.conj().T) <= 1e-13
        assert abs(np.trace(rho).real - 1.0) <= 1e-12


class TestNonsmoothProjectionState:
    def test_far_from_zero(self) -> None:
        st = nonsmooth_projection_state(0.5)
        assert not st.degenerate_at_zero
        p1, p2 = st.p1, st.p2
        assert np.linalg.norm(p1 + p2 - np.eye(2)) <= 1e-12
        assert np.linalg.norm(p1 @ p2) <= 1e-12
        assert np.linalg.norm(p1 @ p1 - p1) <= 1e-12

    def test_projection_aligned_at_cosine_one(self) -> None:
        n = 1000
        theta = 1.0 / (2 * math.pi * n)
        st = nonsmooth_projection_state(theta)
        assert np.linalg.norm(st.p1 - np.array([[1.0, 0.0], [0.0, 0.0]])) <= 1e-9

    def test_states_converge_projections_oscillate(self) -> None:
        n = 10**6
        ta = 1.0 / (2 * math.pi * n)
        tb = 1.0 / (2 * math.pi * n + math.pi / 2)
        sa, sb = nonsmooth_projection_state(ta), nonsmooth_projection_state(tb)
        state_gap = np.linalg.svd(sa.rho.matrix - sb.rho.matrix, compute_uv=False).sum()
        proj_gap = np.linalg.norm(sa.p1 - sb.p1, 2)
        assert state_gap <= 1e-10
        assert abs(proj_gap - 1.0) <= 1e-12

    def test_zero_flagged_degenerate(self) -> None:
        st = nonsmooth_projection_state(0.0)
        assert st.degenerate_at_zero
        assert np.linalg.norm(st.rho.matrix - np.eye(2) / 2) <= 1e-15

    def test_outside_domain(self) -> None:
        with pytest.raises(DomainError):
            nonsmooth_projection_state(1.5)


class TestRandomFamily:
    def test_draws_are_reproducible(self) -> None:
        f1 = random_analytic_family(4, np.random.default_rng(3))
        f2 = random_analytic_family(4, np.random.default_rng(3))
        assert np.allclose(eval_rho(f1, 0.1).matrix, eval_rho(f2, 0.1).matrix)

    def test_commuting_flag(self) -> None:
        fam = random_analytic_family(4, np.random.default_rng(5), commuting=True)
        rho = eval_rho(fam, 0.2).matrix
        rho_prime = eval_rho_prime(fam, 0.2)
        assert np.linalg.norm(rho @ rho_prime - rho_prime @ rho) <= 1e-12

    def test_derivative_consistent_with_difference(self) -> None:
        fam = random_analytic_family(3, np.random.default_rng(11))
        h = 1e-6
        fd = (eval_rho(fam, 0.1 + h).matrix - eval_rho(fam, 0.1 - h).matrix) / (2 * h)
        assert np.linalg.norm(fd - eval_rho_prime(fam, 0.1)) <= 1e-7


def test_family_requires_domain_membership() -> None:
    fam = StateFamily(
        dim=2,
        theta_domain=(-1.0, 1.0),
        rho_of=lambda t: np.array([[0.6, 0.0], [0.0, 0.4]], dtype=complex),
        rho_prime_of=lambda t: np.zeros((2, 2), dtype=complex),
        derivative_mode=Analytic(),
        name="const",
    )
    assert fam.contains(0.5)
    assert not fam.contains(2.0)
    with pytest.raises(DomainError):
        branches_at(fam, 2.0)


def test_exact_crossing_merges_into_one_cluster() -> None:
    # at an exact degeneracy the two branches merge into a single cluster
    # (multiplicity 2); slightly away they resolve into two
    def rho_of(t: float) -> np.ndarray:
        return np.array([[0.5 + t, 0.0], [0.0, 0.5 - t]], dtype=complex)

    def rho_prime_of(t: float) -> np.ndarray:
        return np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

    fam = StateFamily(
        dim=2,
        theta_domain=(-0.3, 0.3),
        rho_of=rho_of,
        rho_prime_of=rho_prime_of,
        derivative_mode=Analytic(),
        name="crossing",
    )
    assert branches_at(fam, 0.0).n_clusters == 1
    assert branches_at(fam, 0.2).n_clusters == 2
