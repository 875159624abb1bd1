"""Optimizers: a deterministic ADAM loop for the reduced unconstrained
problems, an inequality-constrained NLP solve with a KKT certificate, and
the logarithmic penalty composite used by the stochastic-model experiment.

The NLP engine is SLSQP (dense sequential least-squares programming); the
contract is the KKT certificate computed here from the caller's analytic
gradients and Jacobians, not the engine itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .errors import InfeasibleError, MaxIterationsError, NonFiniteGradientError


@dataclass(frozen=True)
class AdamConfig:
    learning_rate: float = 1e-2
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    epochs: int = 250

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ValueError("moment decay rates must lie in (0,1)")
        if self.epochs < 0:
            raise ValueError("epochs must be nonnegative")


@dataclass
class OptResult:
    x: np.ndarray
    objective_trace: list = field(default_factory=list)
    violation_trace: list = field(default_factory=list)
    converged: bool = False
    iterations: int = 0
    stationarity_residual: float = float("nan")
    multipliers: dict = field(default_factory=dict)
    message: str = ""


def adam_minimize(grad_fn: Callable, value_fn: Callable, x0, config: AdamConfig) -> OptResult:
    """Standard ADAM with bias correction, run for exactly ``config.epochs``
    steps.  The trace holds the objective at the initial point and after each
    step; the loop is fully deterministic given (x0, config)."""
    x = np.atleast_1d(np.asarray(x0, dtype=float)).copy()
    m = np.zeros_like(x)
    v = np.zeros_like(x)
    trace = [float(value_fn(x))]
    for t in range(1, config.epochs + 1):
        g = np.atleast_1d(np.asarray(grad_fn(x), dtype=float))
        if not np.all(np.isfinite(g)):
            partial = OptResult(x=x, objective_trace=trace,
                                violation_trace=[0.0] * len(trace),
                                converged=False, iterations=t - 1,
                                message="non-finite gradient")
            raise NonFiniteGradientError(f"non-finite gradient at epoch {t}", result=partial)
        m = config.beta1 * m + (1.0 - config.beta1) * g
        v = config.beta2 * v + (1.0 - config.beta2) * g * g
        mhat = m / (1.0 - config.beta1**t)
        vhat = v / (1.0 - config.beta2**t)
        x = x - config.learning_rate * mhat / (np.sqrt(vhat) + config.eps)
        trace.append(float(value_fn(x)))
    return OptResult(x=x, objective_trace=trace, violation_trace=[0.0] * len(trace),
                     converged=True, iterations=config.epochs)


@dataclass
class NLPProblem:
    """Smooth program: minimize objective(x) subject to eq(x) = 0 and
    ineq(x) >= 0, with analytic gradient and Jacobians."""

    objective: Callable
    gradient: Callable
    x0: np.ndarray
    eq_constraints: Callable | None = None
    eq_jacobian: Callable | None = None
    ineq_constraints: Callable | None = None
    ineq_jacobian: Callable | None = None


def _max_violation(problem: NLPProblem, x) -> float:
    worst = 0.0
    if problem.eq_constraints is not None:
        h = np.atleast_1d(problem.eq_constraints(x))
        if h.size:
            worst = max(worst, float(np.abs(h).max()))
    if problem.ineq_constraints is not None:
        g = np.atleast_1d(problem.ineq_constraints(x))
        if g.size:
            worst = max(worst, float(max(0.0, -g.min())))
    return worst


def _kkt_certificate(problem: NLPProblem, x, active_tol: float):
    """Estimate multipliers by least squares on the stationarity condition
    and report its residual.  Negative inequality multipliers are clipped to
    zero and the fit repeated once (inactive constraints get zero)."""
    g = np.atleast_1d(problem.gradient(x)).astype(float)
    rows = []
    n_eq = 0
    if problem.eq_jacobian is not None:
        jeq = np.atleast_2d(problem.eq_jacobian(x))
        n_eq = jeq.shape[0]
        rows.append(jeq)
    active_idx = np.array([], dtype=int)
    nu_full = np.zeros(0)
    if problem.ineq_constraints is not None:
        vals = np.atleast_1d(problem.ineq_constraints(x))
        nu_full = np.zeros(vals.size)
        active_idx = np.where(vals <= active_tol)[0]
        if active_idx.size:
            jin = np.atleast_2d(problem.ineq_jacobian(x))
            rows.append(jin[active_idx])
    if not rows:
        return float(np.linalg.norm(g)), {}
    a = np.vstack(rows).T  # n x (n_eq + n_active)
    coef, *_ = np.linalg.lstsq(a, g, rcond=None)
    nu = coef[n_eq:]
    if np.any(nu < 0):
        keep = nu >= 0
        cols = np.concatenate([np.arange(n_eq), n_eq + np.where(keep)[0]])
        coef_kept, *_ = np.linalg.lstsq(a[:, cols], g, rcond=None)
        full = np.zeros_like(coef)
        full[cols] = coef_kept
        coef = full
        coef[n_eq:] = np.maximum(coef[n_eq:], 0.0)
    resid = float(np.linalg.norm(g - a @ coef))
    if active_idx.size or n_eq:
        nu_full[active_idx] = coef[n_eq:]
    return resid, {"eq": coef[:n_eq], "ineq": nu_full}


def solve_nlp(problem: NLPProblem, tol: float = 1e-6, max_iters: int = 200,
              feasibility_tol: float = 1e-8, stationarity_tol: float = 1e-6) -> OptResult:
    """Solve the program and certify the result as a KKT point.

    ``tol`` is the engine's relative objective tolerance.  Raises
    InfeasibleError when the final point violates the constraints beyond
    ``feasibility_tol``, MaxIterationsError when the iteration budget runs
    out first.  ``converged`` additionally requires the stationarity
    residual to pass stationarity_tol * (1 + |objective|).
    """
    constraints = []
    if problem.eq_constraints is not None:
        constraints.append({"type": "eq", "fun": problem.eq_constraints,
                            "jac": problem.eq_jacobian})
    if problem.ineq_constraints is not None:
        constraints.append({"type": "ineq", "fun": problem.ineq_constraints,
                            "jac": problem.ineq_jacobian})
    obj_trace = [float(problem.objective(problem.x0))]
    viol_trace = [_max_violation(problem, problem.x0)]

    def _record(xk):
        obj_trace.append(float(problem.objective(xk)))
        viol_trace.append(_max_violation(problem, xk))

    res = minimize(
        problem.objective,
        np.asarray(problem.x0, dtype=float),
        jac=problem.gradient,
        method="SLSQP",
        constraints=constraints,
        callback=_record,
        options={"maxiter": max_iters, "ftol": tol},
    )
    x = np.atleast_1d(res.x)
    violation = _max_violation(problem, x)
    if violation > feasibility_tol:
        if res.status == 9:  # iteration limit
            raise MaxIterationsError("constrained solve hit the iteration limit "
                                     f"while still infeasible (violation {violation:.2e})",
                                     x=x, residual_norm=violation)
        raise InfeasibleError(f"no feasible point found (violation {violation:.2e})",
                              violations=violation)
    stat_resid, multipliers = _kkt_certificate(problem, x, active_tol=math.sqrt(feasibility_tol))
    fval = float(problem.objective(x))
    converged = bool(res.success) and stat_resid <= stationarity_tol * (1.0 + abs(fval))
    if obj_trace[-1] != fval:
        obj_trace.append(fval)
        viol_trace.append(violation)
    return OptResult(x=x, objective_trace=obj_trace, violation_trace=viol_trace,
                     converged=converged, iterations=int(res.nit),
                     stationarity_residual=stat_resid, multipliers=multipliers,
                     message=str(res.message))


def penalty_minimize(objective: Callable, penalty: Callable, alpha: float, x0,
                     guard: float = 1e-12, adam: AdamConfig | None = None,
                     tol: float = 1e-8, max_iters: int = 500) -> OptResult:
    """Minimize log(objective + guard) + alpha * penalty.

    ``objective`` and ``penalty`` both return (value, gradient).  The guard
    keeps the logarithm finite when the objective reaches zero, which is
    exactly what happens at a consistent-model optimum.  The inner solver is
    the NLP engine by default, or ADAM when a config is supplied.
    """
    if alpha <= 0:
        raise ValueError("penalty weight must be positive")

    def composite_value(x):
        ov, _ = objective(x)
        pv, _ = penalty(x)
        return math.log(ov + guard) + alpha * pv

    def composite_grad(x):
        ov, og = objective(x)
        pv, pg = penalty(x)
        return np.asarray(og) / (ov + guard) + alpha * np.asarray(pg)

    if adam is not None:
        return adam_minimize(composite_grad, composite_value, x0, adam)
    unconstrained = NLPProblem(objective=composite_value, gradient=composite_grad,
                               x0=np.asarray(x0, dtype=float))
    return solve_nlp(unconstrained, tol=tol, max_iters=max_iters)
