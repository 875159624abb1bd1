"""Loss-surface scans over the two dynamic-model parameters and the
finite-difference Hessian conditioning probe."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..errors import ConfigError
from ..io import write_csv


def hessian_condition(objective_fn, x_opt, step: float = 1e-3):
    """Condition number of the symmetrized central-difference Hessian.

    Steps are relative to each coordinate (floored at the step itself for
    small coordinates).
    """
    x = np.atleast_1d(np.asarray(x_opt, dtype=float))
    k = x.size
    h = np.array([step * max(abs(v), 1.0) for v in x])
    hess = np.zeros((k, k))
    f0 = objective_fn(x)
    for a in range(k):
        ea = np.zeros(k)
        ea[a] = h[a]
        hess[a, a] = (objective_fn(x + ea) - 2.0 * f0 + objective_fn(x - ea)) / h[a] ** 2
        for b in range(a + 1, k):
            eb = np.zeros(k)
            eb[b] = h[b]
            hess[a, b] = (objective_fn(x + ea + eb) - objective_fn(x + ea - eb)
                          - objective_fn(x - ea + eb) + objective_fn(x - ea - eb)) / (4 * h[a] * h[b])
            hess[b, a] = hess[a, b]
    eigs = np.linalg.eigvalsh(0.5 * (hess + hess.T))
    return float(eigs.max() / eigs.min())


def parse_grid(spec: str):
    """Parse "lo:hi:n,lo:hi:n" into two axis descriptions."""
    try:
        parts = spec.split(",")
        axes = []
        for part in parts:
            lo, hi, n = part.split(":")
            axes.append((float(lo), float(hi), int(n)))
        if len(axes) != 2:
            raise ValueError("need exactly two axes")
    except ValueError as exc:
        raise ConfigError(f"bad grid spec {spec!r}: {exc}") from exc
    return axes


def scan_loss_surface(objective_fn, axes, out_path=None, workers: int | None = None):
    """Evaluate the objective over the tensor grid; returns (e1, e2, values)
    with values[i, j] = f(e1[i], e2[j]).  Grid points run concurrently; the
    objective must be thread-safe (pure given immutable operators)."""
    (lo1, hi1, n1), (lo2, hi2, n2) = axes
    e1 = np.linspace(lo1, hi1, n1)
    e2 = np.linspace(lo2, hi2, n2)
    points = [(i, j) for i in range(n1) for j in range(n2)]
    values = np.zeros((n1, n2))

    def work(idx):
        i, j = idx
        return i, j, objective_fn(np.array([e1[i], e2[j]]))

    with ThreadPoolExecutor(max_workers=workers) as pool:
        for i, j, val in pool.map(work, points):
            values[i, j] = val
    if out_path is not None:
        rows = [(e1[i], e2[j], values[i, j]) for i in range(n1) for j in range(n2)]
        write_csv(out_path, ["eps1", "eps2", "objective"], rows)
    return e1, e2, values
