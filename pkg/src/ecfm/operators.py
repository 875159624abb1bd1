"""Assembly of discrete Galerkin operators for the three problem families.

Everything is stored dense: the largest objects are the cubic interaction
tensors at 100^3 entries, which is desk scale.  The 2D assemblies exploit
the tensor-product structure of the basis, so every integral reduces to 1D
Gauss-Legendre rules; an independent brute-force 2D quadrature oracle in
the test suite checks the factorization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .basis import (
    BasisFamily,
    BasisKind,
    eval_basis,
    eval_basis_dx,
    eval_basis_dxx,
    eval_constraint_shape,
    gauss_legendre,
    gauss_legendre_panels,
)

# Gauss-Legendre point counts: a product of sines with member indices summing
# to s is resolved to ~1e-12 once the rule has about s + 10 points (measured);
# keep a little extra margin.
_QUAD_MARGIN = 16


def quad_points_for(index_sum: int) -> int:
    return index_sum + _QUAD_MARGIN


@dataclass(frozen=True)
class DiscreteOperatorSet:
    """Assembled matrices for the dynamic Burgers or static reaction-diffusion
    problems.

    ``source`` is a (P+1) x N table of load-vector samples on the time grid
    for the dynamic problem, and an N x M source-coefficient matrix for the
    static one.
    """

    basis: BasisFamily
    mass: np.ndarray
    stiffness: np.ndarray
    advection: np.ndarray
    constraint: np.ndarray
    source: np.ndarray
    measurement: np.ndarray
    measure_points: np.ndarray

    @property
    def n(self) -> int:
        return self.mass.shape[0]

    @property
    def n_measure(self) -> int:
        return self.measurement.shape[0]


@dataclass(frozen=True)
class BeamOperatorSet:
    """Assembled matrices for the axially loaded beam.

    The bending stiffness depends on a random parameter; ``bending0`` and
    ``bending1`` hold the affine decomposition K(w) = bending0 + w*bending1
    when the stiffness field is affine in w (``affine`` flag), and
    ``bending`` always assembles the exact matrix by quadrature.
    """

    basis: BasisFamily
    h0: float
    bending_fn: Callable[[float], np.ndarray]
    bending0: np.ndarray
    bending1: np.ndarray
    affine: bool
    geometric: np.ndarray
    boundary: np.ndarray
    load: np.ndarray
    constraint: np.ndarray
    measurement: np.ndarray
    measure_points: np.ndarray

    def bending(self, omega: float) -> np.ndarray:
        return self.bending_fn(omega)

    @property
    def n(self) -> int:
        return self.geometric.shape[0]


def _values_1d(family: BasisFamily, points: np.ndarray, deriv: int = 0) -> np.ndarray:
    fn = (eval_basis, eval_basis_dx, eval_basis_dxx)[deriv]
    return np.stack([fn(family, i, points) for i in range(1, family.count + 1)])


def _measurement_matrix(family: BasisFamily, points: np.ndarray) -> np.ndarray:
    mat = np.stack([eval_basis(family, j, points) for j in range(1, family.count + 1)], axis=-1)
    mat = np.atleast_2d(mat)
    row_scale = np.abs(mat).max(axis=1)
    if np.any(row_scale < 1e-12):
        raise ValueError("a measurement point sees no basis function (boundary point?)")
    return mat


def _constraint_columns_1d(basis: BasisFamily, cfamily: BasisFamily, centers: np.ndarray) -> np.ndarray:
    """Gamma[i, j] = integral of f_i(x) * shape(x - c_j) over [0,1]."""
    cols = []
    for c in np.atleast_1d(centers):
        if cfamily.kind is BasisKind.HAT_1D:
            h = cfamily.half_width
            brk = [b for b in (c - h, c, c + h) if 0.0 < b < 1.0]
            q = gauss_legendre_panels(quad_points_for(basis.count), brk)
        else:
            q = gauss_legendre(max(256, quad_points_for(basis.count)), 1)
        shape_vals = eval_constraint_shape(cfamily, c, q.points)
        vals = _values_1d(basis, q.points)
        cols.append(vals @ (q.weights * shape_vals))
    return np.stack(cols, axis=-1)


def assemble_burgers(
    basis: BasisFamily,
    constraint_basis: BasisFamily,
    measure_points,
    source_fn: Callable,
    time_grid,
    quad_points: int | None = None,
) -> DiscreteOperatorSet:
    """Assemble mass/stiffness/advection, constraint columns, the measurement
    matrix, and the load-vector table sampled at every time-grid node.

    ``source_fn(x, t)`` must accept a vector of coordinates.
    """
    if basis.kind is not BasisKind.SINE_1D:
        raise ValueError("dynamic problem expects the 1D sine family")
    pts = np.atleast_1d(np.asarray(measure_points, dtype=float))
    if np.any(pts <= 0.0) or np.any(pts >= 1.0):
        raise ValueError("measurement points must be strictly interior")
    n = basis.count
    q = gauss_legendre(quad_points or quad_points_for(3 * n), 1)
    vals = _values_1d(basis, q.points)
    dvals = _values_1d(basis, q.points, deriv=1)
    wvals = vals * q.weights
    mass = wvals @ vals.T
    stiffness = (dvals * q.weights) @ dvals.T
    advection = np.einsum("iq,jq,kq->ijk", wvals, vals, dvals, optimize=True)
    constraint = _constraint_columns_1d(basis, constraint_basis, pts)
    measurement = _measurement_matrix(basis, pts)
    times = time_grid.times()
    source_samples = np.stack([source_fn(q.points, t) for t in times])
    source = source_samples @ (q.weights[:, None] * vals.T)
    return DiscreteOperatorSet(
        basis=basis,
        mass=mass,
        stiffness=stiffness,
        advection=advection,
        constraint=constraint,
        source=source,
        measurement=measurement,
        measure_points=pts,
    )


def _tensor_indices(side: int) -> np.ndarray:
    """(count, 2) array of 1-based univariate index pairs, row-major."""
    i1, i2 = np.divmod(np.arange(side * side), side)
    return np.stack([i1 + 1, i2 + 1], axis=-1)


def assemble_kpp(
    basis: BasisFamily,
    source_basis: BasisFamily,
    constraint_basis: BasisFamily,
    measure_points,
    diffusion: float = 0.5,
    reaction: float = 1.0,
    quad_points: int | None = None,
) -> DiscreteOperatorSet:
    """Assemble the static reaction-diffusion operators on the unit square.

    Stored with the scalings of the equilibrium residual built in:
    ``stiffness`` carries the diffusion coefficient, ``mass`` and
    ``advection`` carry the reaction rate, so the residual reads
    (K - M) theta + A:(theta x theta) - F eps - Gamma lam.
    """
    if basis.kind is not BasisKind.TENSOR_SINE_2D or source_basis.kind is not BasisKind.TENSOR_SINE_2D:
        raise ValueError("static 2D problem expects tensor-sine families")
    pts = np.atleast_2d(np.asarray(measure_points, dtype=float))
    if np.any(pts <= 0.0) or np.any(pts >= 1.0):
        raise ValueError("measurement points must be strictly interior")
    side = basis.tensor_side()
    src_side = source_basis.tensor_side()
    if src_side > side:
        raise ValueError("source family must not out-resolve the solution family")
    q = gauss_legendre(quad_points or quad_points_for(3 * side), 1)
    freqs = np.arange(1, side + 1)
    v1 = np.sin(np.outer(freqs * np.pi, q.points))
    d1 = (freqs[:, None] * np.pi) * np.cos(np.outer(freqs * np.pi, q.points))
    m1 = (v1 * q.weights) @ v1.T
    k1 = (d1 * q.weights) @ d1.T
    mass = reaction * np.kron(m1, m1)
    stiffness = diffusion * (np.kron(k1, m1) + np.kron(m1, k1))
    s3 = np.einsum("aq,bq,cq->abc", v1 * q.weights, v1, v1, optimize=True)
    a6 = s3[:, None, :, None, :, None] * s3[None, :, None, :, None, :]
    n = side * side
    advection = reaction * a6.reshape(n, n, n)
    msrc = m1[:, :src_side]
    source = np.kron(msrc, msrc)

    # constraint columns factorize into per-axis Gaussian integrals
    if constraint_basis.kind is not BasisKind.GAUSSIAN_RBF:
        raise ValueError("2D constraint forces use the Gaussian RBF family")
    w = constraint_basis.width
    qg = gauss_legendre(max(256, quad_points_for(side)), 1)
    sines = np.sin(np.outer(freqs * np.pi, qg.points))  # side x nq
    gauss = np.exp(-w * (qg.points[None, :] - pts.reshape(-1, 1)) ** 2)  # 2C x nq
    g1 = (sines * qg.weights) @ gauss.T  # side x 2C, columns alternate x/y
    gx = g1[:, 0::2]
    gy = g1[:, 1::2]
    constraint = (w / np.pi) * (gx[:, None, :] * gy[None, :, :]).reshape(n, pts.shape[0])

    pairs = _tensor_indices(side)
    meas = np.sin(np.pi * pts[:, 0:1] * pairs[:, 0]) * np.sin(np.pi * pts[:, 1:2] * pairs[:, 1])
    row_scale = np.abs(meas).max(axis=1)
    if np.any(row_scale < 1e-12):
        raise ValueError("a measurement point sees no basis function")
    return DiscreteOperatorSet(
        basis=basis,
        mass=mass,
        stiffness=stiffness,
        advection=advection,
        constraint=constraint,
        source=source,
        measurement=meas,
        measure_points=pts,
    )


def indicator_load_vector(basis: BasisFamily, lo: float, hi: float, amplitude: float) -> np.ndarray:
    """Load vector for a source that is ``amplitude`` on [lo,hi]^2, else 0.

    Integrated with panel rules split at the jump so no panel straddles it.
    """
    side = basis.tensor_side()
    q = gauss_legendre_panels(quad_points_for(side), [lo, hi])
    inside = (q.points >= lo) & (q.points <= hi)
    freqs = np.arange(1, side + 1)
    sines = np.sin(np.outer(freqs * np.pi, q.points))
    seg = sines @ (q.weights * inside)  # per-axis integral over [lo,hi]
    return amplitude * np.kron(seg, seg)


def assemble_beam(
    basis: BasisFamily,
    stiffness_fn: Callable[[np.ndarray, float], np.ndarray],
    h0: float,
    load_fn: Callable[[np.ndarray], np.ndarray],
    constraint_basis: BasisFamily,
    measure_points,
    breakpoints=(),
    quad_points: int | None = None,
) -> BeamOperatorSet:
    """Assemble the beam operators for a parameterized bending stiffness.

    ``stiffness_fn(x, omega)`` must be vectorized over x and satisfy
    stiffness_fn(1, omega) == h0 for every omega (deterministic right end).
    ``breakpoints`` mark kinks of the stiffness field in (0,1).
    """
    if basis.kind is not BasisKind.CLAMPED_BEAM_SINE:
        raise ValueError("beam problem expects the clamped-beam sine family")
    n = basis.count
    for omega in (0.0, 0.3, 0.7, 1.0):
        val = float(np.asarray(stiffness_fn(np.array([1.0]), omega))[0])
        if abs(val - h0) > 1e-10 * max(1.0, abs(h0)):
            raise ValueError("stiffness field must equal h0 at the right end for all omega")
    npts = quad_points or quad_points_for(2 * (2 * n - 1))
    q = gauss_legendre_panels(npts, breakpoints) if len(breakpoints) else gauss_legendre(npts, 1)
    d1 = _values_1d(basis, q.points, deriv=1)
    d2 = _values_1d(basis, q.points, deriv=2)
    vals = _values_1d(basis, q.points)

    def bending(omega: float) -> np.ndarray:
        h = np.asarray(stiffness_fn(q.points, omega), dtype=float)
        return (d2 * (q.weights * h)) @ d2.T

    bending0 = bending(0.0)
    bending1 = bending(1.0) - bending0
    mid = bending(0.5)
    affine = bool(np.abs(mid - (bending0 + 0.5 * bending1)).max() <= 1e-10 * max(1.0, np.abs(mid).max()))

    geometric = (d1 * q.weights) @ d1.T
    fpp_end = np.array([eval_basis_dxx(basis, i, 1.0) for i in range(1, n + 1)])
    fp_end = np.array([eval_basis_dx(basis, i, 1.0) for i in range(1, n + 1)])
    boundary = h0 * np.outer(fpp_end, fp_end)
    load = vals @ (q.weights * np.asarray(load_fn(q.points), dtype=float))
    pts = np.atleast_1d(np.asarray(measure_points, dtype=float))
    constraint = _constraint_columns_1d(basis, constraint_basis, pts)
    measurement = _measurement_matrix(basis, pts)
    return BeamOperatorSet(
        basis=basis,
        h0=h0,
        bending_fn=bending,
        bending0=bending0,
        bending1=bending1,
        affine=affine,
        geometric=geometric,
        boundary=boundary,
        load=load,
        constraint=constraint,
        measurement=measurement,
        measure_points=pts,
    )


def project_l2(basis: BasisFamily, fn: Callable, quad_points: int | None = None) -> np.ndarray:
    """Exact L2 projection coefficients: solve (mass) theta = <fn, f_i>.

    The mass solve matters for non-orthonormal families; for the plain sine
    family it doubles the raw inner products.
    """
    q = gauss_legendre(quad_points or quad_points_for(2 * basis.count), basis.dimension)
    vals = np.stack([eval_basis(basis, i, q.points) for i in range(1, basis.count + 1)])
    mass = (vals * q.weights) @ vals.T
    rhs = vals @ (q.weights * np.asarray(fn(q.points), dtype=float))
    return np.linalg.solve(mass, rhs)


def residual_burgers(ops, theta_next, theta_prev, dt, eps, step_index, lam_next=None):
    """Backward-Euler residual at one time step.

    R = (M/dt + 10^-e1 K) th+ + A:(th+ x th+) - (M/dt) th- - e2 F[step]
        - Gamma lam  (last term only when lam is given)
    """
    e1, e2 = eps
    visc = 10.0 ** (-e1)
    r = (ops.mass / dt + visc * ops.stiffness) @ theta_next
    r += np.einsum("ijk,j,k->i", ops.advection, theta_next, theta_next, optimize=True)
    r -= (ops.mass / dt) @ theta_prev
    r -= e2 * ops.source[step_index]
    if lam_next is not None:
        r -= ops.constraint @ lam_next
    return r


def residual_burgers_jac(ops, theta_next, dt, eps):
    """d residual / d theta_next; the two advection partials stay distinct."""
    e1, _ = eps
    visc = 10.0 ** (-e1)
    jac = ops.mass / dt + visc * ops.stiffness
    jac += np.einsum("imk,k->im", ops.advection, theta_next, optimize=True)
    jac += np.einsum("ijm,j->im", ops.advection, theta_next, optimize=True)
    return jac


def residual_kpp(ops, theta, eps, lam=None):
    """Equilibrium residual (K - M) th + A:(th x th) - F eps - Gamma lam."""
    r = (ops.stiffness - ops.mass) @ theta
    r += np.einsum("ijk,j,k->i", ops.advection, theta, theta, optimize=True)
    r -= ops.source @ eps
    if lam is not None:
        r -= ops.constraint @ lam
    return r


def residual_kpp_jac_theta(ops, theta):
    jac = ops.stiffness - ops.mass
    jac += np.einsum("imk,k->im", ops.advection, theta, optimize=True)
    jac += np.einsum("ijm,j->im", ops.advection, theta, optimize=True)
    return jac


def residual_kpp_jac_eps(ops):
    return -ops.source


def residual_kpp_jac_lam(ops):
    return -ops.constraint
