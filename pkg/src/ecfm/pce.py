"""Stochastic Galerkin machinery for the random-stiffness beam: polynomial
chaos assembly, prediction moments, the Gaussian pseudo-likelihood with its
analytic gradient, and the buckling (critical load) computation.

The stochastic basis is the unnormalized shifted Legendre family on [0,1];
its Gramians follow from the three-term recurrence, so no omega-quadrature
is needed as long as the bending stiffness is affine in the random variable.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .basis import clamped_beam_sine, eval_basis, hat_1d
from .errors import SingularJacobianError
from .operators import BeamOperatorSet, assemble_beam
from .solvers import LUFactor

VARIANCE_FLOOR = 1e-12


class VarianceFloorWarning(UserWarning):
    """A predicted variance was pinned at the floor inside the likelihood."""


@dataclass(frozen=True)
class StochasticGramian:
    """Legendre moments: g0_k = int Psi_k, g2 = int Psi_k Psi_q (diagonal),
    g2w = int w Psi_k Psi_q (tridiagonal)."""

    g0: np.ndarray
    g2: np.ndarray
    g2w: np.ndarray


def legendre_gramians(m: int) -> StochasticGramian:
    if m < 1:
        raise ValueError("need at least one stochastic mode")
    g0 = np.zeros(m)
    g0[0] = 1.0
    norms = 1.0 / (2.0 * np.arange(m) + 1.0)
    g2 = np.diag(norms)
    g2w = np.zeros((m, m))
    for k in range(m):
        # w P_k = ((k+1) P_{k+1} + k P_{k-1}) / (2(2k+1)) + P_k / 2
        g2w[k, k] = 0.5 * norms[k]
        if k + 1 < m:
            g2w[k, k + 1] = (k + 1) / (2.0 * (2 * k + 1)) * norms[k + 1]
            g2w[k + 1, k] = g2w[k, k + 1]
    return StochasticGramian(g0=g0, g2=g2, g2w=g2w)


@dataclass(frozen=True)
class MeasurementReplicates:
    """C measurement points with D replicate observations each."""

    points: np.ndarray
    values: np.ndarray  # C x D

    def __post_init__(self):
        if self.values.ndim != 2 or self.values.shape[1] < 2:
            raise ValueError("need at least two replicates per point")


@dataclass
class StochasticSystem:
    """Factorized block operator of the polynomial chaos projection, with
    the solved coefficient matrix (spatial x stochastic)."""

    matrix: np.ndarray
    lu: LUFactor
    gram: StochasticGramian
    theta: np.ndarray  # N x M
    n: int
    m: int


def assemble_stochastic_galerkin(beam_ops: BeamOperatorSet, stoch_count: int,
                                 eps: float, lam: np.ndarray) -> StochasticSystem:
    """Project the beam equilibrium onto the stochastic basis and solve.

    Requires the bending stiffness to be affine in the random variable, so
    the omega-integrals reduce to the two Legendre Gramians.
    """
    if not beam_ops.affine:
        raise ValueError("stochastic projection needs a bending stiffness affine in omega")
    gram = legendre_gramians(stoch_count)
    keff0 = beam_ops.bending0 - eps * beam_ops.geometric - beam_ops.boundary
    matrix = np.kron(keff0, gram.g2) + np.kron(beam_ops.bending1, gram.g2w)
    force = beam_ops.load + beam_ops.constraint @ np.atleast_1d(lam)
    rhs = np.kron(force, gram.g0)
    try:
        lu = LUFactor(matrix)
    except SingularJacobianError as exc:
        raise SingularJacobianError(
            f"stochastic block system singular (load at or beyond buckling?): {exc}"
        ) from exc
    n = beam_ops.n
    theta = lu.solve(rhs).reshape(n, stoch_count)
    return StochasticSystem(matrix=matrix, lu=lu, gram=gram, theta=theta,
                            n=n, m=stoch_count)


def moments(theta: np.ndarray, measurement: np.ndarray, gram: StochasticGramian):
    """Mean and variance of the measured expansion at each measurement point."""
    mth = measurement @ theta  # C x M
    mu = mth @ gram.g0
    second = np.einsum("ck,cq,kq->c", mth, mth, gram.g2, optimize=True)
    var = second - mu * mu
    if np.any(var < -VARIANCE_FLOOR):
        raise ValueError(f"negative predicted variance {var.min():.3e}: assembly error")
    return mu, np.maximum(var, 0.0)


def pseudo_log_likelihood(mu: np.ndarray, var: np.ndarray,
                          replicates: MeasurementReplicates,
                          floor: float = VARIANCE_FLOOR) -> float:
    """Negative log of the product of per-point Gaussian surrogates."""
    var_eff = np.maximum(var, floor)
    if np.any(var < floor):
        warnings.warn("predicted variance at floor inside the pseudo-likelihood",
                      VarianceFloorWarning, stacklevel=2)
    resid = replicates.values - mu[:, None]
    per_point = (0.5 * np.log(2.0 * np.pi * var_eff) * replicates.values.shape[1]
                 + np.sum(resid**2, axis=1) / (2.0 * var_eff))
    return float(np.sum(per_point))


def _moment_gradients(theta, measurement, gram, dtheta, floored):
    """(dmu, dvar) for one parameter direction; dvar is zeroed where the
    variance sits at the floor (it is constant there)."""
    mth = measurement @ theta
    mdth = measurement @ dtheta
    dmu = mdth @ gram.g0
    mu = mth @ gram.g0
    dvar = 2.0 * np.einsum("ck,cq,kq->c", mth, mdth, gram.g2, optimize=True) - 2.0 * mu * dmu
    dvar = np.where(floored, 0.0, dvar)
    return dmu, dvar


def grad_pseudo_likelihood(theta: np.ndarray, gram: StochasticGramian,
                           measurement: np.ndarray, replicates: MeasurementReplicates,
                           dtheta_dlam: np.ndarray, dtheta_deps: np.ndarray,
                           floor: float = VARIANCE_FLOOR):
    """Chain the likelihood through the moment gradients.

    Returns (d/dlam: C-vector, d/deps: scalar).  Where the variance is
    pinned at the floor the variance chain drops out and the gradient
    reduces to the weighted-least-squares form.
    """
    mu, var = moments(theta, measurement, gram)
    floored = var < floor
    var_eff = np.maximum(var, floor)
    resid = replicates.values - mu[:, None]
    s1 = resid.sum(axis=1)
    s2 = np.sum(resid**2, axis=1)
    d = replicates.values.shape[1]
    var_coef = d / (2.0 * var_eff) - s2 / (2.0 * var_eff**2)
    mu_coef = -s1 / var_eff

    def chain(dtheta):
        dmu, dvar = _moment_gradients(theta, measurement, gram, dtheta, floored)
        return float(np.sum(var_coef * dvar + mu_coef * dmu))

    c = dtheta_dlam.shape[2]
    glam = np.array([chain(dtheta_dlam[:, :, q]) for q in range(c)])
    geps = chain(dtheta_deps)
    return glam, geps


def stochastic_sensitivity(system: StochasticSystem, beam_ops: BeamOperatorSet):
    """Derivatives of the chaos coefficients: one solve per constraint column
    (right-hand side Gamma_q x g0) and one for the load parameter (the
    geometric-stiffness action on the current solution), all sharing the
    factorized block operator."""
    n, m = system.n, system.m
    c = beam_ops.constraint.shape[1]
    dtheta_dlam = np.zeros((n, m, c))
    for q in range(c):
        rhs = np.kron(beam_ops.constraint[:, q], system.gram.g0)
        dtheta_dlam[:, :, q] = system.lu.solve(rhs).reshape(n, m)
    rhs_eps = np.kron(beam_ops.geometric, system.gram.g2) @ system.theta.reshape(-1)
    dtheta_deps = system.lu.solve(rhs_eps).reshape(n, m)
    return dtheta_dlam, dtheta_deps


def evaluate_expansion(theta: np.ndarray, spatial_basis, x, omega):
    """Field values of the expansion at spatial points x and realizations
    omega: returns an array of shape (len(x), len(omega))."""
    from .basis import shifted_legendre

    x = np.atleast_1d(np.asarray(x, dtype=float))
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    n, m = theta.shape
    fx = np.stack([eval_basis(spatial_basis, i, x) for i in range(1, n + 1)])  # n x X
    stoch = shifted_legendre(m)
    pw = np.stack([eval_basis(stoch, k, omega) for k in range(1, m + 1)])  # m x W
    return fx.T @ theta @ pw


def critical_load(beam_ops: BeamOperatorSet, omega: float, beta_hi: float = 16.0) -> float:
    """Smallest positive load that makes the effective stiffness singular,
    located by bisection on the sign of the smallest eigenvalue."""
    base = beam_ops.bending(omega) - beam_ops.boundary
    geo = beam_ops.geometric
    if np.abs(base - base.T).max() > 1e-8 * max(1.0, np.abs(base).max()):
        raise ValueError("effective stiffness is not symmetric")
    sym = 0.5 * (base + base.T)

    def smallest_eig(beta):
        return float(np.linalg.eigvalsh(sym - beta * geo).min())

    lo = 0.0
    if smallest_eig(lo) <= 0:
        raise ValueError("structure is singular already at zero load")
    hi = beta_hi
    for _ in range(60):
        if smallest_eig(hi) < 0:
            break
        hi *= 2.0
    else:
        raise ValueError("no buckling load found below the search cap")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if smallest_eig(mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12 * hi:
            break
    return 0.5 * (lo + hi)


def corrected_stiffness_field(h0: float):
    """Bending stiffness h0 * (2 w |x - 1/2| + 1 - w): a random center defect
    that reduces stiffness while keeping the right end deterministic."""

    def fn(x, omega):
        return h0 * (2.0 * omega * np.abs(np.asarray(x, dtype=float) - 0.5) + 1.0 - omega)

    return fn


@lru_cache(maxsize=None)
def calibrated_h0(reference_modes: int = 15, target: float = 2.24) -> float:
    """End stiffness calibrated so the worst-case (omega=1) buckling load of
    the corrected field equals ``target`` at the reference fidelity.  The
    critical load scales linearly in h0, so one unit-stiffness eigensolve
    fixes the constant."""
    ops = assemble_beam(
        clamped_beam_sine(reference_modes),
        corrected_stiffness_field(1.0),
        1.0,
        lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        hat_1d(1.0 / 6.0),
        np.arange(1, 6) / 6.0,
        breakpoints=(0.5,),
    )
    return target / critical_load(ops, 1.0)
