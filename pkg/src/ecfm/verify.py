"""Fast self-checks wired to the `ecfm verify` subcommand: one line per
invariant, PASS/FAIL, covering quadrature, assembly, solver, sensitivity,
statistics, and chaos-expansion behavior at reduced problem sizes."""

from __future__ import annotations

import math

import numpy as np

from .basis import (
    clamped_beam_sine,
    eval_basis,
    eval_basis_dx,
    eval_constraint_shape,
    gauss_legendre,
    gaussian_rbf,
    hat_1d,
    sine_1d,
)
from .operators import assemble_burgers, project_l2, residual_burgers, residual_burgers_jac
from .optimize import AdamConfig, adam_minimize
from .pce import (
    assemble_stochastic_galerkin,
    calibrated_h0,
    corrected_stiffness_field,
    critical_load,
    legendre_gramians,
    moments,
)
from .sensitivity import (
    grad_objective_ecfm,
    grad_objective_standard,
    march_sensitivity_ecfm,
    march_sensitivity_standard,
    objective_ecfm,
    objective_standard,
)
from .solvers import NewtonConfig, TimeGrid, march_burgers_ecfm, march_burgers_standard
from .stats import chi2_quantile, normal_quantile, sample_moments, sample_uniform
from .operators import assemble_beam


def _check_quadrature():
    q = gauss_legendre(40, 1)
    fam = sine_1d(12)
    vals = np.stack([eval_basis(fam, i, q.points) for i in range(1, 13)])
    gram = (vals * q.weights) @ vals.T
    assert np.abs(gram - 0.5 * np.eye(12)).max() < 1e-12
    assert abs(q.weights.sum() - 1.0) < 1e-14


def _check_rbf_mass():
    q = gauss_legendre(200, 2)
    total = np.sum(q.weights * eval_constraint_shape(gaussian_rbf(500.0), np.array([0.5, 0.5]), q.points))
    assert abs(total - 1.0) < 1e-6


def _check_derivatives():
    fam = sine_1d(8)
    x = np.linspace(0.05, 0.95, 37)
    h = 1e-6
    for i in (1, 4, 8):
        fd = (eval_basis(fam, i, x + h) - eval_basis(fam, i, x - h)) / (2 * h)
        an = eval_basis_dx(fam, i, x)
        assert np.all(np.abs(fd - an) <= 1e-6 * (1 + np.abs(an)))


def _burgers_small():
    grid = TimeGrid(total_time=1.0, steps=20)
    ops = assemble_burgers(sine_1d(10), hat_1d(0.25), np.linspace(0.25, 0.75, 3),
                           lambda x, t: np.sin(2 * np.pi * x) * np.sin(2 * np.pi * t), grid)
    theta0 = project_l2(sine_1d(10), lambda x: np.sin(2 * np.pi * x))
    return ops, grid, theta0


def _check_jacobian():
    ops, grid, theta0 = _burgers_small()
    rng = np.random.default_rng(0)
    theta = rng.normal(size=ops.n)
    jac = residual_burgers_jac(ops, theta, grid.dt, (1.5, 1.0))
    h = 1e-7
    for m in (0, 3, 9):
        e = np.zeros(ops.n)
        e[m] = h
        fd = (residual_burgers(ops, theta + e, theta0, grid.dt, (1.5, 1.0), 1)
              - residual_burgers(ops, theta - e, theta0, grid.dt, (1.5, 1.0), 1)) / (2 * h)
        assert np.all(np.abs(fd - jac[:, m]) <= 1e-5 * (1 + np.abs(jac[:, m])))


def _check_gradients():
    ops, grid, theta0 = _burgers_small()
    cfg = NewtonConfig(tol=1e-12)
    truth = march_burgers_standard(ops, grid, (1.75, 1.0), theta0, cfg)
    data = ops.measurement @ truth.theta.T
    eps = np.array([1.5, 0.8])
    delta = 1e-4
    traj = march_burgers_standard(ops, grid, tuple(eps), theta0, cfg)
    sens = march_sensitivity_standard(ops, grid, tuple(eps), traj, cfg)
    grad = grad_objective_standard(ops, traj, sens, data, grid.dt)
    for p in range(2):
        e = np.zeros(2)
        e[p] = delta
        hi = objective_standard(ops, march_burgers_standard(ops, grid, tuple(eps + e), theta0, cfg), data, grid.dt)
        lo = objective_standard(ops, march_burgers_standard(ops, grid, tuple(eps - e), theta0, cfg), data, grid.dt)
        fd = (hi - lo) / (2 * delta)
        assert abs(grad[p] - fd) <= 1e-3 * max(abs(fd), 1e-12)
    traj_e = march_burgers_ecfm(ops, grid, tuple(eps), theta0, data, cfg)
    sens_e = march_sensitivity_ecfm(ops, grid, tuple(eps), traj_e, cfg)
    grad_e = grad_objective_ecfm(traj_e, sens_e, grid.dt)
    for p in range(2):
        e = np.zeros(2)
        e[p] = delta
        hi = objective_ecfm(march_burgers_ecfm(ops, grid, tuple(eps + e), theta0, data, cfg), grid.dt)
        lo = objective_ecfm(march_burgers_ecfm(ops, grid, tuple(eps - e), theta0, data, cfg), grid.dt)
        fd = (hi - lo) / (2 * delta)
        assert abs(grad_e[p] - fd) <= 1e-3 * max(abs(fd), 1e-12)


def _check_consistent_forces_vanish():
    ops, grid, theta0 = _burgers_small()
    cfg = NewtonConfig(tol=1e-12)
    truth = march_burgers_standard(ops, grid, (1.6, 0.9), theta0, cfg)
    data = ops.measurement @ truth.theta.T
    traj = march_burgers_ecfm(ops, grid, (1.6, 0.9), theta0, data, cfg)
    assert np.abs(traj.lam).max() <= 1e-6 * (1 + np.abs(data).max())


def _check_quantiles():
    assert abs(normal_quantile(0.025) + 1.96) <= 0.05
    assert abs(chi2_quantile(0.025, 224) - 184.44) <= 0.05
    assert abs(chi2_quantile(0.975, 224) - 267.35) <= 0.05
    assert abs(normal_quantile(0.5)) < 1e-12


def _check_moments():
    mean, var = sample_moments(np.array([1.0, 2.0, 3.0]))
    assert mean == 2.0 and abs(var - 1.0) < 1e-14


def _check_adam():
    out = adam_minimize(lambda x: 2 * x, lambda x: float(x @ x), np.array([1.0]),
                        AdamConfig(learning_rate=0.1, epochs=1))
    assert abs(out.x[0] - 0.9) < 1e-8


def _check_pce_moments_mc():
    h0 = calibrated_h0()
    ops = assemble_beam(clamped_beam_sine(6), corrected_stiffness_field(h0), h0,
                        lambda x: np.full_like(np.asarray(x, dtype=float), 100.0),
                        hat_1d(1.0 / 6.0), np.arange(1, 6) / 6.0, breakpoints=(0.5,))
    system = assemble_stochastic_galerkin(ops, 6, 1.0, np.zeros(5))
    mu, var = moments(system.theta, ops.measurement, system.gram)
    om = sample_uniform(7, 10**5)
    from .basis import shifted_legendre

    psi = np.stack([eval_basis(shifted_legendre(6), k, om) for k in range(1, 7)])
    samples = ops.measurement @ system.theta @ psi
    se_mu = samples.std(axis=1) / math.sqrt(om.size)
    assert np.all(np.abs(samples.mean(axis=1) - mu) <= 3 * se_mu)
    m2 = (samples - mu[:, None]) ** 2
    se_var = m2.std(axis=1) / math.sqrt(om.size)
    assert np.all(np.abs(samples.var(axis=1) - var) <= 3 * se_var)


def _check_buckling():
    h0 = calibrated_h0()
    ops = assemble_beam(clamped_beam_sine(15), corrected_stiffness_field(h0), h0,
                        lambda x: np.zeros_like(np.asarray(x, dtype=float)),
                        hat_1d(1.0 / 6.0), np.arange(1, 6) / 6.0, breakpoints=(0.5,))
    assert abs(critical_load(ops, 1.0) - 2.24) <= 0.05
    assert critical_load(ops, 0.0) >= critical_load(ops, 1.0)


def _check_legendre_gramians():
    gram = legendre_gramians(6)
    q = gauss_legendre(20, 1)
    from .basis import shifted_legendre

    fam = shifted_legendre(6)
    for k in range(1, 7):
        for q_idx in range(1, 7):
            pk = eval_basis(fam, k, q.points)
            pq = eval_basis(fam, q_idx, q.points)
            val = np.sum(q.weights * q.points * pk * pq)
            assert abs(gram.g2w[k - 1, q_idx - 1] - val) < 1e-13


CHECKS = [
    ("quadrature orthogonality (sine Gramian = I/2)", _check_quadrature),
    ("constraint RBF integrates to one on the square", _check_rbf_mass),
    ("basis derivatives match finite differences", _check_derivatives),
    ("step-residual Jacobian matches finite differences", _check_jacobian),
    ("objective gradients match finite differences (both formulations)", _check_gradients),
    ("consistent data needs no constraint force", _check_consistent_forces_vanish),
    ("printed quantiles reproduced (z and chi-squared)", _check_quantiles),
    ("sample moments", _check_moments),
    ("ADAM first-step identity", _check_adam),
    ("chaos moments match Monte Carlo of the expansion", _check_pce_moments_mc),
    ("worst-case buckling load 2.24 +/- 0.05", _check_buckling),
    ("Legendre Gramian recurrence matches quadrature", _check_legendre_gramians),
]


def run_verification(stream=None) -> bool:
    """Run every check; print one PASS/FAIL line each; True when all pass."""
    import sys

    stream = stream or sys.stdout
    all_ok = True
    for name, fn in CHECKS:
        try:
            fn()
            print(f"PASS  {name}", file=stream)
        except Exception as exc:  # report and continue
            all_ok = False
            print(f"FAIL  {name}: {exc}", file=stream)
    return all_ok
