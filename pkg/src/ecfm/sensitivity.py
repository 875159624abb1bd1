"""Forward (tangent) sensitivity systems for the dynamic problem and the
analytic gradients of the two inverse objectives.

The tangent operator at each step equals the converged Newton Jacobian of
the forward solve (plus constraint blocks in the augmented case), so one LU
factorization per step serves both parameter columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularJacobianError
from .operators import residual_burgers_jac
from .solvers import LUFactor, NewtonConfig, TimeGrid, Trajectory

_LN10 = math.log(10.0)


@dataclass
class SensitivityTrajectory:
    """Per-node parameter derivatives: dtheta[t, :, p] for p in (e1, e2);
    dlam likewise when constraint forces are present.  Row 0 is zero: the
    initial state does not depend on the model parameters."""

    dtheta: np.ndarray
    dlam: np.ndarray | None = None


def _forcing(ops, theta_next, eps, step_index):
    """Right-hand sides from differentiating the step residual in each
    parameter (negated residual partials)."""
    visc = 10.0 ** (-eps[0])
    rhs_e1 = _LN10 * visc * (ops.stiffness @ theta_next)
    rhs_e2 = ops.source[step_index].copy()
    return rhs_e1, rhs_e2


def march_sensitivity_standard(ops, grid: TimeGrid, eps, traj: Trajectory,
                               config: NewtonConfig) -> SensitivityTrajectory:
    """Solve the tangent systems along an already-converged trajectory."""
    dt = grid.dt
    n = ops.n
    dtheta = np.zeros((grid.steps + 1, n, 2))
    for t in range(grid.steps):
        theta_next = traj.theta[t + 1]
        try:
            lu = LUFactor(residual_burgers_jac(ops, theta_next, dt, eps))
        except SingularJacobianError as exc:
            raise SingularJacobianError(f"tangent operator singular at step {t + 1}: {exc}") from exc
        rhs_e1, rhs_e2 = _forcing(ops, theta_next, eps, t + 1)
        carry = ops.mass @ dtheta[t] / dt  # n x 2
        dtheta[t + 1, :, 0] = lu.solve(carry[:, 0] + rhs_e1)
        dtheta[t + 1, :, 1] = lu.solve(carry[:, 1] + rhs_e2)
    return SensitivityTrajectory(dtheta=dtheta)


def march_sensitivity_ecfm(ops, grid: TimeGrid, eps, traj: Trajectory,
                           config: NewtonConfig) -> SensitivityTrajectory:
    """Tangent systems for the augmented march.

    The constraint rows force the measured sensitivity to zero exactly, so
    all data mismatch is absorbed by the force-magnitude derivatives.  With
    no constraints this reduces to the standard tangent march.
    """
    if traj.lam is None:
        raise ValueError("trajectory has no constraint forces")
    dt = grid.dt
    n = ops.n
    c = ops.n_measure
    dtheta = np.zeros((grid.steps + 1, n, 2))
    dlam = np.zeros((grid.steps + 1, c, 2))
    zero_block = np.zeros((c, c))
    for t in range(grid.steps):
        theta_next = traj.theta[t + 1]
        j11 = residual_burgers_jac(ops, theta_next, dt, eps)
        block = np.vstack([
            np.hstack([j11, -ops.constraint]),
            np.hstack([ops.measurement, zero_block]),
        ])
        try:
            lu = LUFactor(block)
        except SingularJacobianError as exc:
            raise SingularJacobianError(f"augmented tangent operator singular at step {t + 1}: {exc}") from exc
        rhs_e1, rhs_e2 = _forcing(ops, theta_next, eps, t + 1)
        carry = ops.mass @ dtheta[t] / dt
        pad = np.zeros(c)
        z1 = lu.solve(np.concatenate([carry[:, 0] + rhs_e1, pad]))
        z2 = lu.solve(np.concatenate([carry[:, 1] + rhs_e2, pad]))
        dtheta[t + 1, :, 0], dlam[t + 1, :, 0] = z1[:n], z1[n:]
        dtheta[t + 1, :, 1], dlam[t + 1, :, 1] = z2[:n], z2[n:]
    return SensitivityTrajectory(dtheta=dtheta, dlam=dlam)


def objective_standard(ops, traj: Trajectory, data, dt: float) -> float:
    """Time-integrated squared data misfit, summed over steps 1..P."""
    gaps = ops.measurement @ traj.theta[1:].T - np.asarray(data)[:, 1:]
    return 0.5 * dt * float(np.sum(gaps**2))


def objective_ecfm(traj: Trajectory, dt: float) -> float:
    """Time-integrated squared constraint-force magnitude."""
    return 0.5 * dt * float(np.sum(traj.lam[1:] ** 2))


def grad_objective_standard(ops, traj: Trajectory, sens: SensitivityTrajectory,
                            data, dt: float) -> np.ndarray:
    """dt * sum_t (M th_t - v_t) . M dth_t/de, per parameter."""
    gaps = ops.measurement @ traj.theta[1:].T - np.asarray(data)[:, 1:]  # c x P
    grad = np.zeros(2)
    for p in range(2):
        mdth = ops.measurement @ sens.dtheta[1:, :, p].T  # c x P
        grad[p] = dt * float(np.sum(gaps * mdth))
    return grad


def grad_objective_ecfm(traj: Trajectory, sens: SensitivityTrajectory, dt: float) -> np.ndarray:
    """dt * sum_t lam_t . dlam_t/de, per parameter."""
    grad = np.zeros(2)
    for p in range(2):
        grad[p] = dt * float(np.sum(traj.lam[1:] * sens.dlam[1:, :, p]))
    return grad
