"""Static reaction-diffusion experiment drivers: noisy data synthesis from a
discontinuous truth source, the squared-misfit and constraint-force programs
(both solved as one joint NLP), and field/source reconstructions."""

from __future__ import annotations

import numpy as np

from ..basis import gaussian_rbf, tensor_sine_2d
from ..io import write_csv
from ..operators import (
    assemble_kpp,
    indicator_load_vector,
    residual_kpp,
    residual_kpp_jac_eps,
    residual_kpp_jac_lam,
    residual_kpp_jac_theta,
)
from ..optimize import NLPProblem, solve_nlp
from ..solvers import NewtonConfig, newton_solve, solve_kpp_equilibrium
from ..stats import NoiseModel, confidence_bounds, sample_moments, sample_noise
from .config import ExperimentConfig
from .report import ExperimentReport, Stopwatch


class KppSetup:
    """Assembled operators plus the truth field for one config."""

    def __init__(self, config: ExperimentConfig):
        d = config.discretization
        self.config = config
        self.basis = tensor_sine_2d(d.n)
        self.source_basis = tensor_sine_2d(d.m)
        self.ops = assemble_kpp(
            self.basis,
            self.source_basis,
            gaussian_rbf(config.physics.rbf_width),
            config.kpp_points(),
            diffusion=config.physics.diffusion,
            reaction=config.physics.reaction,
        )
        lo, hi = config.physics.source_box
        self.truth_load = indicator_load_vector(self.basis, lo, hi, config.physics.source_amplitude)
        self.newton = NewtonConfig(tol=config.optimizer.newton_tol,
                                   max_iters=config.optimizer.newton_max_iters)
        self._theta_true = None

    @property
    def theta_true(self) -> np.ndarray:
        if self._theta_true is None:
            ops = self.ops

            def res(x):
                r = (ops.stiffness - ops.mass) @ x
                r += np.einsum("ijk,j,k->i", ops.advection, x, x, optimize=True)
                return r - self.truth_load

            out = newton_solve(res, lambda x: residual_kpp_jac_theta(ops, x),
                               np.zeros(ops.n), self.newton)
            self._theta_true = out.x
        return self._theta_true

    def warm_start(self, v):
        """Fit the measured field by least squares, read a source estimate off
        its equilibrium residual, then forward-solve at that estimate."""
        ops = self.ops
        theta_data = np.linalg.lstsq(ops.measurement, v, rcond=None)[0]
        r_pde = (ops.stiffness - ops.mass) @ theta_data
        r_pde += np.einsum("ijk,j,k->i", ops.advection, theta_data, theta_data, optimize=True)
        eps0 = np.linalg.lstsq(ops.source, r_pde, rcond=None)[0]
        theta0 = solve_kpp_equilibrium(ops, eps0, np.zeros(ops.n_measure),
                                       np.zeros(ops.n), self.newton)
        return eps0, theta0


def generate_kpp_data(config: ExperimentConfig, out_dir=None) -> np.ndarray:
    """Truth solve with the discontinuous source plus seeded Gaussian noise."""
    setup = KppSetup(config)
    clean = setup.ops.measurement @ setup.theta_true
    noise = sample_noise(NoiseModel(config.noise.sigma, config.noise.seed), clean.size)
    v = clean + noise
    if out_dir is not None:
        pts = setup.ops.measure_points
        write_csv(f"{out_dir}/data.csv", ["x1", "x2", "value"],
                  [(pts[i, 0], pts[i, 1], v[i]) for i in range(v.size)])
    return v


def _field_matrix(side: int, grid_points: int) -> tuple[np.ndarray, np.ndarray]:
    g = np.linspace(0.0, 1.0, grid_points)
    xx, yy = np.meshgrid(g, g, indexing="ij")
    pairs = [(i1 + 1, i2 + 1) for i1 in range(side) for i2 in range(side)]
    basis = np.stack([np.sin(a * np.pi * xx) * np.sin(b * np.pi * yy) for a, b in pairs])
    return g, basis


def field_error_l1(setup: KppSetup, theta, grid_points: int = 200) -> float:
    """Relative L1 gap to the truth field on a uniform evaluation grid."""
    side = setup.basis.tensor_side()
    _, basis = _field_matrix(side, grid_points)
    u = np.einsum("k,kxy->xy", setup.theta_true, basis)
    w = np.einsum("k,kxy->xy", np.asarray(theta), basis)
    return float(np.abs(u - w).sum() / np.abs(u).sum())


def source_fields(setup: KppSetup, eps, lam, grid_points: int = 200):
    """(truth source, recovered source, force field) on the evaluation grid."""
    cfg = setup.config
    g = np.linspace(0.0, 1.0, grid_points)
    xx, yy = np.meshgrid(g, g, indexing="ij")
    lo, hi = cfg.physics.source_box
    s_true = np.where((xx >= lo) & (xx <= hi) & (yy >= lo) & (yy <= hi),
                      cfg.physics.source_amplitude, 0.0)
    src_side = setup.source_basis.tensor_side()
    pairs = [(i1 + 1, i2 + 1) for i1 in range(src_side) for i2 in range(src_side)]
    b_field = np.zeros_like(xx)
    for coef, (a, b) in zip(np.asarray(eps), pairs):
        b_field += coef * np.sin(a * np.pi * xx) * np.sin(b * np.pi * yy)
    w = cfg.physics.rbf_width
    force = np.zeros_like(xx)
    for q, (px, py) in enumerate(setup.ops.measure_points):
        force += lam[q] * (w / np.pi) * np.exp(-w * ((xx - px) ** 2 + (yy - py) ** 2))
    return g, s_true, b_field, force


def _solve_inverse(setup: KppSetup, v):
    ops = setup.ops
    m = ops.source.shape[1]
    eps0, theta0 = setup.warm_start(v)

    def objective(x):
        gap = ops.measurement @ x[m:] - v
        return 0.5 * float(gap @ gap)

    def gradient(x):
        gap = ops.measurement @ x[m:] - v
        return np.concatenate([np.zeros(m), ops.measurement.T @ gap])

    problem = NLPProblem(
        objective=objective,
        gradient=gradient,
        x0=np.concatenate([eps0, theta0]),
        eq_constraints=lambda x: residual_kpp(ops, x[m:], x[:m]),
        eq_jacobian=lambda x: np.hstack([residual_kpp_jac_eps(ops),
                                         residual_kpp_jac_theta(ops, x[m:])]),
    )
    out = solve_nlp(problem, tol=setup.config.optimizer.tol,
                    max_iters=setup.config.optimizer.max_iters,
                    feasibility_tol=setup.config.optimizer.feasibility_tol)
    return out, out.x[:m], np.zeros(ops.n_measure), out.x[m:]


def _solve_ecfm(setup: KppSetup, v):
    ops = setup.ops
    cfg = setup.config
    m = ops.source.shape[1]
    c = ops.n_measure
    bounds = confidence_bounds(cfg.noise.sigma, c, cfg.physics.alpha)
    eps0, theta0 = setup.warm_start(v)

    def gradient(x):
        g = np.zeros_like(x)
        g[m:m + c] = x[m:m + c]
        return g

    def ineq(x):
        e = ops.measurement @ x[m + c:] - v
        mean, var = sample_moments(e)
        return np.array([mean - bounds.l1, bounds.l2 - mean, var - bounds.p1, bounds.p2 - var])

    def ineq_jac(x):
        e = ops.measurement @ x[m + c:] - v
        dmean = ops.measurement.sum(axis=0) / c
        dvar = (2.0 / (c - 1)) * ((e - e.mean()) @ ops.measurement)
        rows = np.zeros((4, x.size))
        rows[0, m + c:] = dmean
        rows[1, m + c:] = -dmean
        rows[2, m + c:] = dvar
        rows[3, m + c:] = -dvar
        return rows

    problem = NLPProblem(
        objective=lambda x: 0.5 * float(x[m:m + c] @ x[m:m + c]),
        gradient=gradient,
        x0=np.concatenate([eps0, np.zeros(c), theta0]),
        eq_constraints=lambda x: residual_kpp(ops, x[m + c:], x[:m], x[m:m + c]),
        eq_jacobian=lambda x: np.hstack([residual_kpp_jac_eps(ops),
                                         residual_kpp_jac_lam(ops),
                                         residual_kpp_jac_theta(ops, x[m + c:])]),
        ineq_constraints=ineq,
        ineq_jacobian=ineq_jac,
    )
    out = solve_nlp(problem, tol=cfg.optimizer.tol, max_iters=cfg.optimizer.max_iters,
                    feasibility_tol=cfg.optimizer.feasibility_tol)
    return out, out.x[:m], out.x[m:m + c], out.x[m + c:], bounds


def _write_common(setup: KppSetup, out_dir, eps, lam, theta, grid_points: int = 101):
    side = setup.basis.tensor_side()
    g, basis = _field_matrix(side, grid_points)
    truth = np.einsum("k,kxy->xy", setup.theta_true, basis)
    recovered = np.einsum("k,kxy->xy", np.asarray(theta), basis)
    gs, s_true, b_field, force = source_fields(setup, eps, lam, grid_points)

    def dump(name, field):
        rows = [(gs[i], gs[j], field[i, j]) for i in range(gs.size) for j in range(gs.size)]
        write_csv(f"{out_dir}/{name}.csv", ["x1", "x2", "value"], rows)

    dump("field_truth", truth)
    dump("field_recovered", recovered)
    dump("source_truth", s_true)
    dump("source_recovered", b_field)
    dump("force_field", force)
    dump("source_sum", b_field + force)
    pts = setup.ops.measure_points
    write_csv(f"{out_dir}/forces.csv", ["x1", "x2", "lambda"],
              [(pts[q, 0], pts[q, 1], lam[q]) for q in range(lam.size)])


def _report(setup: KppSetup, out, eps, lam, theta, v, bounds=None) -> ExperimentReport:
    e = setup.ops.measurement @ theta - v
    mean, var = sample_moments(e)
    _, s_true, b_field, force = source_fields(setup, eps, lam)
    metrics = {
        "objective": float(out.objective_trace[-1]),
        "field_error_l1": field_error_l1(setup, theta),
        "force_norm": float(np.linalg.norm(lam)),
        "discrepancy_mean": mean,
        "discrepancy_var": var,
        "source_dist_l1": float(np.abs(b_field - s_true).mean()),
        "source_sum_dist_l1": float(np.abs(b_field + force - s_true).mean()),
        "equality_residual": float(np.linalg.norm(residual_kpp(setup.ops, theta, eps, lam))),
        "stationarity_residual": out.stationarity_residual,
    }
    extra = {"seed": setup.config.noise.seed, "sigma": setup.config.noise.sigma,
             "nlp_iterations": out.iterations, "nlp_converged": out.converged,
             "nlp_message": out.message}
    if bounds is not None:
        extra["bounds"] = {"l1": bounds.l1, "l2": bounds.l2, "p1": bounds.p1, "p2": bounds.p2}
    return ExperimentReport(
        experiment=setup.config.experiment,
        recovered_params=[float(x) for x in eps],
        objective_trace=[float(x) for x in out.objective_trace],
        final_constraint_forces=[float(x) for x in lam],
        error_metrics=metrics,
        extra=extra,
    )


def _finish(setup, report, eps, lam, theta, out_dir):
    if out_dir is not None:
        _write_common(setup, out_dir, eps, lam, theta)
        write_csv(f"{out_dir}/trace.csv", ["iteration", "objective"],
                  list(enumerate(report.objective_trace)))
        report.save(f"{out_dir}/report.json")
    return report


def run_kpp_inverse(config: ExperimentConfig, data, out_dir=None) -> ExperimentReport:
    setup = KppSetup(config)
    v = np.asarray(data, dtype=float)
    with Stopwatch() as watch:
        out, eps, lam, theta = _solve_inverse(setup, v)
    report = _report(setup, out, eps, lam, theta, v)
    report.wall_time = watch.elapsed
    return _finish(setup, report, eps, lam, theta, out_dir)


def run_kpp_ecfm(config: ExperimentConfig, data, out_dir=None) -> ExperimentReport:
    setup = KppSetup(config)
    v = np.asarray(data, dtype=float)
    with Stopwatch() as watch:
        out, eps, lam, theta, bounds = _solve_ecfm(setup, v)
    report = _report(setup, out, eps, lam, theta, v, bounds=bounds)
    report.wall_time = watch.elapsed
    return _finish(setup, report, eps, lam, theta, out_dir)
