"""Parametrized density-matrix families and their spectral derivative data.

A family is a smooth map theta -> rho(theta) of full-rank states on an open
interval.  This module evaluates states and derivatives, splits rho' into
eigenvalue and eigenprojection branches, and audits the operator identities
that the projection derivatives must satisfy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import (
    DegenerateCrossing,
    DomainError,
    InvalidInput,
    SingularState,
)
from .linalg import hermitize, is_hermitian, random_hermitian, require_hermitian

# A state is rejected as numerically rank deficient below this eigenvalue.
RANK_TOL = 1e-12

# Consecutive eigenvalues merge into one cluster when their gap is below
# max(CLUSTER_ABS_FLOOR_REL * spectral diameter, CLUSTER_REL * pair mean).
# The relative term keeps genuinely distinct but geometrically decaying
# spectra (thermal tails) apart, while the absolute floor still merges true
# multiplets whose members differ only by eigensolver noise.
CLUSTER_REL = 1e-9
CLUSTER_ABS_FLOOR_REL = 1e-13

# A near-crossing is flagged when the first-order projection rotation rate
# ||P_j rho' P_k|| / gap exceeds this cap; beyond it the branch derivative
# formula divides noise by a vanishing gap.
MIXING_CAP = 1e8

TRACE_TOL_ANALYTIC = 1e-12
TRACE_TOL_NUMERIC = 1e-7


@dataclass(frozen=True)
class DensityMatrix:
    """Validated density matrix: Hermitian, unit trace, full rank."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = require_hermitian(np.asarray(self.matrix), "density matrix")
        tr = float(np.trace(mat).real)
        if abs(tr - 1.0) > 1e-12:
            raise InvalidInput(f"density matrix trace {tr!r} differs from 1")
        w = np.linalg.eigvalsh(mat)
        if w[0] <= RANK_TOL:
            raise SingularState(
                f"smallest eigenvalue {w[0]:.3e} at or below rank tolerance {RANK_TOL:g}"
            )
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Analytic:
    """Derivative supplied in closed form by the family."""


@dataclass(frozen=True)
class CentralDifference:
    """Symmetric finite-difference derivative.

    step None picks max(1e-5, cbrt(eps) * (1 + |theta|)).  richardson adds
    one extrapolation level combining steps h and h/2.
    """

    step: float | None = None
    richardson: bool = False


DerivativeMode = Analytic | CentralDifference


@dataclass(frozen=True)
class StateFamily:
    """Smooth family of full-rank states over an open parameter interval."""

    dim: int
    theta_domain: tuple[float, float]
    rho_of: Callable[[float], np.ndarray]
    rho_prime_of: Callable[[float], np.ndarray] | None = None
    derivative_mode: DerivativeMode = field(default_factory=Analytic)
    name: str = "family"

    def __post_init__(self):
        lo, hi = self.theta_domain
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise InvalidInput(f"theta_domain {self.theta_domain!r} is not an open interval")
        if isinstance(self.derivative_mode, Analytic) and self.rho_prime_of is None:
            raise InvalidInput("analytic derivative mode requires rho_prime_of")

    def contains(self, theta: float) -> bool:
        lo, hi = self.theta_domain
        return lo < theta < hi


def default_step(theta: float) -> float:
    """Central-difference step balancing truncation against rounding."""
    return max(1e-5, float(np.cbrt(np.finfo(float).eps)) * (1.0 + abs(theta)))


def _check_theta(fam: StateFamily, theta: float, pad: float = 0.0) -> None:
    if not math.isfinite(theta):
        raise DomainError("theta must be finite", value=theta)
    lo, hi = fam.theta_domain
    if not (lo < theta - pad and theta + pad < hi):
        raise DomainError(
            f"theta={theta!r} (stencil pad {pad:g}) outside open domain ({lo!r}, {hi!r})",
            value=theta,
        )


def eval_rho(fam: StateFamily, theta: float) -> DensityMatrix:
    """Evaluate the family and validate the result as a density matrix."""
    _check_theta(fam, theta)
    mat = np.asarray(fam.rho_of(theta))
    if mat.shape != (fam.dim, fam.dim):
        raise InvalidInput(f"family returned shape {mat.shape}, expected {(fam.dim, fam.dim)}")
    return DensityMatrix(mat)


def _central_difference(fam: StateFamily, theta: float, h: float) -> np.ndarray:
    plus = np.asarray(fam.rho_of(theta + h))
    minus = np.asarray(fam.rho_of(theta - h))
    return (plus - minus) / (2.0 * h)


def eval_rho_prime(fam: StateFamily, theta: float) -> np.ndarray:
    """Derivative of the family at theta, per its derivative mode.

    The result is Hermitian and traceless within the mode tolerance
    (1e-12 analytic, 1e-7 numerical); violations mean the family itself is
    inconsistent and raise InvalidInput.
    """
    mode = fam.derivative_mode
    if isinstance(mode, Analytic):
        _check_theta(fam, theta)
        rp = np.asarray(fam.rho_prime_of(theta))
        tol = TRACE_TOL_ANALYTIC
    else:
        h = mode.step if mode.step is not None else default_step(theta)
        if not (h > 0.0 and math.isfinite(h)):
            raise InvalidInput(f"invalid finite-difference step {h!r}")
        _check_theta(fam, theta, pad=h)
        rp = _central_difference(fam, theta, h)
        if mode.richardson:
            finer = _central_difference(fam, theta, 0.5 * h)
            rp = (4.0 * finer - rp) / 3.0
        tol = TRACE_TOL_NUMERIC
    if rp.shape != (fam.dim, fam.dim):
        raise InvalidInput(f"derivative has shape {rp.shape}, expected {(fam.dim, fam.dim)}")
    if not is_hermitian(rp, tol=max(tol, 1e-12)):
        raise InvalidInput("family derivative is not Hermitian within mode tolerance")
    rp = hermitize(rp)
    scale = max(1.0, float(np.abs(rp).max(initial=0.0)))
    if abs(float(np.trace(rp).real)) > tol * scale:
        raise InvalidInput("family derivative has non-zero trace beyond mode tolerance")
    return rp


@dataclass(frozen=True)
class SpectralCluster:
    """One eigenvalue branch: value, multiplicity, projection and derivatives."""

    value: float
    multiplicity: int
    projection: np.ndarray
    value_prime: float
    projection_prime: np.ndarray


class SpectralBranches:
    """Eigen-data of (rho, rho') resolved into clustered spectral branches.

    basis columns hold the orthonormal eigenvectors in ascending eigenvalue
    order; eigenvalues are the raw solver values and cluster_values their
    per-cluster means.  rho' decomposes as
        rho' = sum_k value_prime_k P_k + sum_k cluster_value_k P'_k.
    Dense per-cluster projections are materialized lazily so that
    information-only paths stay O(dim^2) in memory.
    """

    def __init__(
        self,
        basis: np.ndarray,
        eigenvalues: np.ndarray,
        rho_prime_eig: np.ndarray,
        cluster_slices: list[slice],
        cluster_values: np.ndarray,
        cluster_value_primes: np.ndarray,
    ):
        self.basis = basis
        self.eigenvalues = eigenvalues
        self.rho_prime_eig = rho_prime_eig
        self.cluster_slices = cluster_slices
        self.cluster_values = cluster_values
        self.cluster_value_primes = cluster_value_primes

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def n_clusters(self) -> int:
        return len(self.cluster_slices)

    @property
    def cluster_mults(self) -> np.ndarray:
        return np.array([s.stop - s.start for s in self.cluster_slices])

    def rho(self) -> np.ndarray:
        return (self.basis * self.eigenvalues) @ self.basis.conj().T

    def rho_prime(self) -> np.ndarray:
        return self.basis @ self.rho_prime_eig @ self.basis.conj().T

    def projection(self, k: int) -> np.ndarray:
        cols = self.basis[:, self.cluster_slices[k]]
        return cols @ cols.conj().T

    def projection_prime(self, k: int) -> np.ndarray:
        """dP_k/dtheta from first-order perturbation of the other clusters."""
        sk = self.cluster_slices[k]
        block = np.zeros((self.dim, self.dim), dtype=complex)
        for j in range(self.n_clusters):
            if j == k:
                continue
            sj = self.cluster_slices[j]
            gap = self.cluster_values[k] - self.cluster_values[j]
            block[sj, sk] = self.rho_prime_eig[sj, sk] / gap
            block[sk, sj] = self.rho_prime_eig[sk, sj] / gap
        return self.basis @ block @ self.basis.conj().T

    @cached_property
    def clusters(self) -> tuple[SpectralCluster, ...]:
        out = []
        for k in range(self.n_clusters):
            out.append(
                SpectralCluster(
                    value=float(self.cluster_values[k]),
                    multiplicity=self.cluster_slices[k].stop - self.cluster_slices[k].start,
                    projection=self.projection(k),
                    value_prime=float(self.cluster_value_primes[k]),
                    projection_prime=self.projection_prime(k),
                )
            )
        return tuple(out)


def _cluster_slices(w: np.ndarray, cluster_tol: float | None) -> list[slice]:
    n = w.shape[0]
    diam = float(w[-1] - w[0])
    gaps = np.diff(w)
    if cluster_tol is not None:
        merge = gaps <= cluster_tol
    else:
        floor = CLUSTER_ABS_FLOOR_REL * diam
        merge = gaps <= np.maximum(floor, CLUSTER_REL * 0.5 * (w[:-1] + w[1:]))
    slices = []
    start = 0
    for i in range(n - 1):
        if not merge[i]:
            slices.append(slice(start, i + 1))
            start = i + 1
    slices.append(slice(start, n))
    return slices


def spectral_branches(
    rho: DensityMatrix | np.ndarray,
    rho_prime: np.ndarray,
    cluster_tol: float | None = None,
    gap_tol: float | None = None,
) -> SpectralBranches:
    """Resolve (rho, rho') into spectral branches.

    cluster_tol overrides the default merge rule with an absolute gap below
    which consecutive eigenvalues join one cluster.  gap_tol, when given,
    raises DegenerateCrossing for any surviving inter-cluster gap below it;
    independent of gap_tol, a crossing is flagged when the projection
    rotation rate ||coupling||/gap exceeds MIXING_CAP.  The caller may then
    refine theta or pass a larger cluster_tol to accept a merged cluster.
    """
    if isinstance(rho, DensityMatrix):
        mat = rho.matrix
    else:
        mat = DensityMatrix(np.asarray(rho)).matrix
    rho_prime = require_hermitian(np.asarray(rho_prime), "rho_prime")
    if rho_prime.shape != mat.shape:
        raise InvalidInput("rho and rho_prime must share a dimension")

    w, v = np.linalg.eigh(mat)
    if w[0] <= RANK_TOL:
        raise SingularState(f"smallest eigenvalue {w[0]:.3e} at or below {RANK_TOL:g}")
    rp_eig = v.conj().T @ rho_prime @ v

    slices = _cluster_slices(w, cluster_tol)
    values = np.array([float(w[s].mean()) for s in slices])
    primes = np.array([float(np.trace(rp_eig[s, s]).real) / (s.stop - s.start) for s in slices])

    for k in range(len(slices) - 1):
        gap = values[k + 1] - values[k]
        if gap_tol is not None and gap < gap_tol:
            raise DegenerateCrossing(
                f"clusters at {values[k]:.6g} and {values[k + 1]:.6g} closer than gap_tol {gap_tol:g}",
                pair=(float(values[k]), float(values[k + 1])),
            )
        coupling = np.linalg.norm(rp_eig[slices[k], slices[k + 1]])
        if coupling / gap > MIXING_CAP:
            raise DegenerateCrossing(
                f"projection rotation rate {coupling / gap:.3e} exceeds {MIXING_CAP:g} "
                f"between eigenvalues {values[k]:.6g} and {values[k + 1]:.6g}",
                pair=(float(values[k]), float(values[k + 1])),
            )

    return SpectralBranches(
        basis=v,
        eigenvalues=w,
        rho_prime_eig=rp_eig,
        cluster_slices=slices,
        cluster_values=values,
        cluster_value_primes=primes,
    )


def branches_at(fam: StateFamily, theta: float, **kwargs) -> SpectralBranches:
    """Convenience: branches of (rho, rho') evaluated from a family."""
    return spectral_branches(eval_rho(fam, theta), eval_rho_prime(fam, theta), **kwargs)


@dataclass(frozen=True)
class ProjectionAuditReport:
    """Largest residuals of the projection-derivative identities.

    The identities follow from differentiating P_j P_k = delta_jk P_j and
    sum_k P_k = I:
      offdiag_exchange   P'_j P_j = (I - P_j) P'_j  and  P'_j P_k = -P_j P'_k
      compression        P_k P'_j P_k = 0
      adjoint_exchange   (P'_j P'_k) P_j = P_j (P'_j P'_k)†
    weighted_prime_sum is ||sum_k lambda_k P'_k||_2 and commutator is
    ||[rho, rho']||_2; they vanish together exactly when the family commutes
    at every parameter value.
    """

    offdiag_exchange: float
    compression: float
    adjoint_exchange: float
    weighted_prime_sum: float
    commutator: float

    def max_identity_residual(self) -> float:
        return max(self.offdiag_exchange, self.compression, self.adjoint_exchange)


def projection_audit(br: SpectralBranches) -> ProjectionAuditReport:
    """Evaluate the projection-derivative identities on dense cluster data."""
    cl = br.clusters
    eye = np.eye(br.dim)
    off = 0.0
    comp = 0.0
    adj = 0.0
    for j, cj in enumerate(cl):
        pj, dpj = cj.projection, cj.projection_prime
        off = max(off, float(np.linalg.norm(dpj @ pj - (eye - pj) @ dpj)))
        off = max(off, float(np.linalg.norm(dpj @ (eye - pj) - pj @ dpj)))
        for k, ck in enumerate(cl):
            pk, dpk = ck.projection, ck.projection_prime
            if k != j:
                off = max(off, float(np.linalg.norm(dpj @ pk + pj @ dpk)))
            comp = max(comp, float(np.linalg.norm(pk @ dpj @ pk)))
            prod = dpj @ dpk
            adj = max(adj, float(np.linalg.norm(prod @ pj - pj @ prod.conj().T)))
    weighted = sum(c.value * c.projection_prime for c in cl)
    rho = br.rho()
    rho_prime = br.rho_prime()
    comm = rho @ rho_prime - rho_prime @ rho
    return ProjectionAuditReport(
        offdiag_exchange=off,
        compression=comp,
        adjoint_exchange=adj,
        weighted_prime_sum=float(np.linalg.norm(weighted)),
        commutator=float(np.linalg.norm(comm)),
    )


def projection_curvature_residual(fam: StateFamily, theta: float, h: float = 1e-3) -> float:
    """Residual of the second-derivative identity
    P_j P''_k + P''_j P_k + 2 P'_j P'_k = delta_jk P''_j,
    with P'' from a Richardson-extrapolated symmetric second difference
    (step h combined with step h/2, cancelling the h^2 truncation term).

    Clusters are matched across the stencil by ascending order, so the
    family must keep a constant cluster count on [theta - h, theta + h].
    """
    brs = [
        branches_at(fam, t)
        for t in (theta - h, theta - h / 2, theta, theta + h / 2, theta + h)
    ]
    counts = {b.n_clusters for b in brs}
    if len(counts) != 1:
        raise DegenerateCrossing(
            "cluster count changes across the finite-difference stencil; refine theta or h"
        )
    mid = brs[2]

    def second_diff(lo: SpectralBranches, hi: SpectralBranches, step: float, k: int) -> np.ndarray:
        return (hi.projection(k) - 2.0 * mid.projection(k) + lo.projection(k)) / step**2

    second = [
        (4.0 * second_diff(brs[1], brs[3], h / 2, k) - second_diff(brs[0], brs[4], h, k)) / 3.0
        for k in range(mid.n_clusters)
    ]
    worst = 0.0
    for j in range(mid.n_clusters):
        for k in range(mid.n_clusters):
            lhs = (
                mid.projection(j) @ second[k]
                + second[j] @ mid.projection(k)
                + 2.0 * mid.projection_prime(j) @ mid.projection_prime(k)
            )
            rhs = second[j] if j == k else np.zeros_like(lhs)
            worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    return worst


@dataclass(frozen=True)
class NonsmoothProjectionState:
    """State whose eigenvalues are C-infinity flat at 0 while the
    eigenprojections oscillate without a limit."""

    rho: DensityMatrix
    p1: np.ndarray
    p2: np.ndarray
    degenerate_at_zero: bool


def nonsmooth_projection_state(theta: float) -> NonsmoothProjectionState:
    """Two-level family with smooth spectrum but discontinuous projections.

    lambda_1,2 = (1 ± exp(-1/theta^2))/2 and the eigenbasis rotates by the
    angle 1/theta.  At theta = 0 every eigenvalue derivative vanishes and
    rho = I/2, flagged degenerate_at_zero; the projections have no limit as
    theta -> 0, which is why branch data cannot be assigned there.
    """
    if not math.isfinite(theta) or abs(theta) > 1.0:
        raise DomainError("theta must lie in [-1, 1]", value=theta)
    eye = np.eye(2)
    if theta == 0.0:
        rho = DensityMatrix(0.5 * eye)
        return NonsmoothProjectionState(
            rho=rho,
            p1=np.diag([1.0, 0.0]),
            p2=np.diag([0.0, 1.0]),
            degenerate_at_zero=True,
        )
    gap = math.exp(-1.0 / theta**2)
    lam1 = 0.5 * (1.0 + gap)
    lam2 = 0.5 * (1.0 - gap)
    c = math.cos(1.0 / theta)
    s = math.sin(1.0 / theta)
    p1 = np.array([[c * c, c * s], [c * s, s * s]])
    p2 = eye - p1
    rho = DensityMatrix(lam1 * p1 + lam2 * p2)
    return NonsmoothProjectionState(rho=rho, p1=p1, p2=p2, degenerate_at_zero=theta == 0.0)


def random_analytic_family(
    dim: int,
    rng: np.random.Generator,
    commuting: bool = False,
    min_rel_gap: float = 1e-2,
    name: str = "random",
) -> StateFamily:
    """Random analytic full-rank family rho(theta) = exp(G0 + theta G1)/trace.

    The derivative comes from the Frechet derivative of expm, so both rho
    and rho' are analytic in theta.  Draws are rejected until the spectrum
    at theta = 0 has relative gaps of at least min_rel_gap, keeping branch
    tracking well conditioned on a neighbourhood of 0.  With commuting=True
    the generators share an eigenbasis, so [rho, rho'] = 0 for every theta.
    """
    for _ in range(200):
        g0 = random_hermitian(dim, rng, scale=0.6)
        if commuting:
            # same eigenbasis, independent spectrum for the direction
            _, v = np.linalg.eigh(g0)
            g1 = (v * rng.standard_normal(dim)) @ v.conj().T
        else:
            g1 = random_hermitian(dim, rng, scale=0.6)
        w = np.linalg.eigh(hermitize(g0))[0]
        diam = w[-1] - w[0]
        if diam <= 0 or np.min(np.diff(w)) < min_rel_gap * diam:
            continue

        def rho_of(theta: float, g0=g0, g1=g1) -> np.ndarray:
            e = scipy.linalg.expm(g0 + theta * g1)
            return e / np.trace(e).real

        def rho_prime_of(theta: float, g0=g0, g1=g1) -> np.ndarray:
            e, de = scipy.linalg.expm_frechet(g0 + theta * g1, g1)
            t = np.trace(e).real
            dt = np.trace(de).real
            return de / t - e * (dt / t**2)

        return StateFamily(
            dim=dim,
            theta_domain=(-1.0, 1.0),
            rho_of=rho_of,
            rho_prime_of=rho_prime_of,
            name=name,
        )
    raise InvalidInput("failed to draw a well-separated random family")
