"""Newton's method, backward-Euler marching, and the augmented
state + constraint-force solves."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .errors import (
    InconsistentInitialDataError,
    MaxIterationsError,
    SingularAugmentedSystemError,
    SingularJacobianError,
)
from .operators import residual_burgers, residual_burgers_jac, residual_kpp, residual_kpp_jac_theta

_DIVERGENCE_STREAK = 5  # consecutive residual-norm increases before aborting
_PIVOT_FLOOR = 1e-12  # relative to the matrix inf-norm


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid: ``steps`` backward-Euler steps covering [0, total_time]."""

    total_time: float
    steps: int

    def __post_init__(self):
        if self.steps < 1 or self.total_time <= 0:
            raise ValueError("need total_time > 0 and at least one step")

    @property
    def dt(self) -> float:
        return self.total_time / self.steps

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.total_time, self.steps + 1)


@dataclass(frozen=True)
class NewtonConfig:
    tol: float = 1e-6
    max_iters: int = 50

    def __post_init__(self):
        if self.tol <= 0 or self.max_iters < 1:
            raise ValueError("need tol > 0 and max_iters >= 1")


@dataclass
class Trajectory:
    """Solution coefficients (and constraint-force magnitudes) per time node.

    theta has shape (steps+1, n); lam, when present, (steps+1, c) with the
    first row identically zero (the initial condition needs no force).
    """

    theta: np.ndarray
    lam: np.ndarray | None = None


@dataclass(frozen=True)
class NewtonResult:
    x: np.ndarray
    iterations: int
    residual_norm: float


class LUFactor:
    """Dense LU with partial pivoting and an explicit singularity guard."""

    def __init__(self, matrix: np.ndarray):
        matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        scale = np.abs(matrix).sum(axis=1).max()  # inf-norm
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")  # pivot check below supersedes LAPACK's warning
                self._lu, self._piv = lu_factor(matrix)
        except Exception as exc:  # ValueError from LAPACK on non-finite entries
            raise SingularJacobianError(f"LU factorization failed: {exc}") from exc
        pivots = np.abs(np.diag(self._lu))
        if scale == 0.0 or pivots.min() < _PIVOT_FLOOR * scale:
            raise SingularJacobianError("matrix is numerically singular")

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return lu_solve((self._lu, self._piv), rhs)


def newton_solve(residual_fn, jacobian_fn, x0, config: NewtonConfig) -> NewtonResult:
    """Plain (undamped) Newton iteration on ||residual|| < tol.

    Aborts early when the residual norm grows for several consecutive
    iterations, which signals divergence long before max_iters.
    """
    x = np.atleast_1d(np.asarray(x0, dtype=float)).copy()
    r = np.atleast_1d(residual_fn(x))
    rnorm = float(np.linalg.norm(r))
    streak = 0
    for it in range(config.max_iters):
        if rnorm < config.tol:
            return NewtonResult(x, it, rnorm)
        jac = jacobian_fn(x)
        x = x - LUFactor(jac).solve(r)
        r = np.atleast_1d(residual_fn(x))
        new_norm = float(np.linalg.norm(r))
        streak = streak + 1 if new_norm > rnorm else 0
        rnorm = new_norm
        if streak >= _DIVERGENCE_STREAK:
            raise MaxIterationsError(
                f"Newton diverging: residual grew {streak} iterations in a row",
                x=x, residual_norm=rnorm,
            )
    if rnorm < config.tol:
        return NewtonResult(x, config.max_iters, rnorm)
    raise MaxIterationsError(
        f"Newton did not reach tol={config.tol} in {config.max_iters} iterations "
        f"(residual {rnorm:.3e})",
        x=x, residual_norm=rnorm,
    )


def march_burgers_standard(ops, grid: TimeGrid, eps, theta0, config: NewtonConfig) -> Trajectory:
    """March the forward problem; each step warm-starts from the previous one."""
    dt = grid.dt
    theta = np.zeros((grid.steps + 1, ops.n))
    theta[0] = theta0
    for t in range(grid.steps):
        prev = theta[t]

        def res(x):
            return residual_burgers(ops, x, prev, dt, eps, t + 1)

        def jac(x):
            return residual_burgers_jac(ops, x, dt, eps)

        try:
            theta[t + 1] = newton_solve(res, jac, prev, config).x
        except (MaxIterationsError, SingularJacobianError) as exc:
            raise type(exc)(f"step {t + 1}: {exc}") from exc
    return Trajectory(theta=theta)


def march_burgers_ecfm(ops, grid: TimeGrid, eps, theta0, data, config: NewtonConfig) -> Trajectory:
    """March the augmented problem: at each step solve jointly for the state
    and the force magnitudes that pin the measured state to the data."""
    data = np.asarray(data, dtype=float)
    c = ops.n_measure
    if data.shape != (c, grid.steps + 1):
        raise ValueError(f"data must be {c} x {grid.steps + 1}")
    v0 = ops.measurement @ theta0
    if np.linalg.norm(v0 - data[:, 0]) > 1e-8 * (1.0 + np.linalg.norm(data[:, 0])):
        raise InconsistentInitialDataError(
            "first data column disagrees with the projected initial condition"
        )
    dt = grid.dt
    n = ops.n
    theta = np.zeros((grid.steps + 1, n))
    lam = np.zeros((grid.steps + 1, c))
    theta[0] = theta0
    for t in range(grid.steps):
        prev = theta[t]
        v_next = data[:, t + 1]

        def res(z):
            th, la = z[:n], z[n:]
            r1 = residual_burgers(ops, th, prev, dt, eps, t + 1, lam_next=la)
            r2 = ops.measurement @ th - v_next
            return np.concatenate([r1, r2])

        def jac(z):
            th = z[:n]
            j11 = residual_burgers_jac(ops, th, dt, eps)
            top = np.hstack([j11, -ops.constraint])
            bottom = np.hstack([ops.measurement, np.zeros((c, c))])
            return np.vstack([top, bottom])

        z0 = np.concatenate([prev, lam[t]])
        try:
            z = newton_solve(res, jac, z0, config).x
        except SingularJacobianError as exc:
            raise SingularAugmentedSystemError(f"step {t + 1}: {exc}") from exc
        except MaxIterationsError as exc:
            raise MaxIterationsError(f"step {t + 1}: {exc}", x=exc.x,
                                     residual_norm=exc.residual_norm) from exc
        theta[t + 1] = z[:n]
        lam[t + 1] = z[n:]
    return Trajectory(theta=theta, lam=lam)


def solve_kpp_equilibrium(ops, eps, lam, theta_guess, config: NewtonConfig) -> np.ndarray:
    """Newton solve of the static equilibrium for given source/force settings."""

    def res(x):
        return residual_kpp(ops, x, eps, lam)

    def jac(x):
        return residual_kpp_jac_theta(ops, x)

    return newton_solve(res, jac, theta_guess, config).x
