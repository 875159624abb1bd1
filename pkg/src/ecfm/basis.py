"""Basis families, constraint-force shapes, and Gauss-Legendre quadrature.

All spectral families live on [0,1] (or [0,1]^2 for the tensor family) and
build their boundary conditions into the shape functions, so the Galerkin
assemblies downstream never need boundary bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class BasisKind(Enum):
    SINE_1D = "sine_1d"
    TENSOR_SINE_2D = "tensor_sine_2d"
    CLAMPED_BEAM_SINE = "clamped_beam_sine"
    SHIFTED_LEGENDRE = "shifted_legendre"
    HAT_1D = "hat_1d"
    GAUSSIAN_RBF = "gaussian_rbf"


_CONSTRAINT_KINDS = (BasisKind.HAT_1D, BasisKind.GAUSSIAN_RBF)


@dataclass(frozen=True)
class BasisFamily:
    """A family of shape functions.

    ``count`` is the number of members for spectral families; constraint
    families (hat, Gaussian RBF) are parameterized by a single width and
    evaluated relative to a center, so ``count`` is unused for them.
    """

    kind: BasisKind
    count: int = 0
    half_width: float = 0.0  # hat support half-width h > 0
    width: float = 0.0  # RBF sharpness parameter (larger = narrower)

    @property
    def dimension(self) -> int:
        return 2 if self.kind in (BasisKind.TENSOR_SINE_2D, BasisKind.GAUSSIAN_RBF) else 1

    def tensor_side(self) -> int:
        """Univariate member count for the 2D tensor family."""
        side = math.isqrt(self.count)
        if side * side != self.count:
            raise ValueError(f"tensor family needs a square count, got {self.count}")
        return side


def sine_1d(count: int) -> BasisFamily:
    """f_i(x) = sin(i pi x); vanishes at both ends of [0,1]."""
    return BasisFamily(BasisKind.SINE_1D, count)


def tensor_sine_2d(count: int) -> BasisFamily:
    """Tensor products of univariate sines; vanish on the unit-square boundary."""
    family = BasisFamily(BasisKind.TENSOR_SINE_2D, count)
    family.tensor_side()  # validate square count now
    return family


def clamped_beam_sine(count: int) -> BasisFamily:
    """f_i(x) = sin((2i-1) pi x / 2).

    Satisfies f(0) = f''(0) = f'(1) = f'''(1) = 0, the pinned/guided beam
    end conditions, for every member.
    """
    return BasisFamily(BasisKind.CLAMPED_BEAM_SINE, count)


def shifted_legendre(count: int) -> BasisFamily:
    """Standard Legendre polynomials shifted to [0,1] (degree 0..count-1)."""
    return BasisFamily(BasisKind.SHIFTED_LEGENDRE, count)


def hat_1d(half_width: float) -> BasisFamily:
    if half_width <= 0:
        raise ValueError("hat half-width must be positive")
    return BasisFamily(BasisKind.HAT_1D, half_width=half_width)


def gaussian_rbf(width: float) -> BasisFamily:
    if width <= 0:
        raise ValueError("RBF width parameter must be positive")
    return BasisFamily(BasisKind.GAUSSIAN_RBF, width=width)


def _check_index(family: BasisFamily, index: int):
    if not 1 <= index <= family.count:
        raise IndexError(f"basis index {index} outside 1..{family.count}")


def _check_domain(x, dimension: int):
    x = np.asarray(x, dtype=float)
    if dimension == 2:
        if x.shape[-1] != 2:
            raise ValueError("2D family expects coordinates with trailing size 2")
    if np.any(x < -1e-14) or np.any(x > 1 + 1e-14):
        raise ValueError("coordinate outside the unit domain")
    return x


def _tensor_pair(family: BasisFamily, index: int) -> tuple[int, int]:
    side = family.tensor_side()
    return (index - 1) // side + 1, (index - 1) % side + 1


def _legendre_table(degree: int, x, order: int):
    """Shifted-Legendre values (order=0), d/dx (1), or d2/dx2 (2) up to degree."""
    t = 2.0 * np.asarray(x, dtype=float) - 1.0
    p = [np.ones_like(t), t]
    dp = [np.zeros_like(t), np.ones_like(t)]
    ddp = [np.zeros_like(t), np.zeros_like(t)]
    for n in range(1, degree):
        p.append(((2 * n + 1) * t * p[n] - n * p[n - 1]) / (n + 1))
        if order >= 1:
            dp.append(dp[n - 1] + (2 * n + 1) * p[n])
        if order >= 2:
            ddp.append(ddp[n - 1] + (2 * n + 1) * dp[n])
    if order == 0:
        return p
    if order == 1:
        return [2.0 * v for v in dp]  # chain rule for t = 2x - 1
    return [4.0 * v for v in ddp]


def eval_basis(family: BasisFamily, index: int, x):
    """Evaluate member ``index`` (1-based) at coordinate(s) ``x``."""
    _check_index(family, index)
    x = _check_domain(x, family.dimension)
    if family.kind is BasisKind.SINE_1D:
        return np.sin(index * np.pi * x)
    if family.kind is BasisKind.CLAMPED_BEAM_SINE:
        return np.sin((2 * index - 1) * np.pi * x / 2.0)
    if family.kind is BasisKind.TENSOR_SINE_2D:
        i1, i2 = _tensor_pair(family, index)
        return np.sin(i1 * np.pi * x[..., 0]) * np.sin(i2 * np.pi * x[..., 1])
    if family.kind is BasisKind.SHIFTED_LEGENDRE:
        return _legendre_table(index - 1, x, 0)[index - 1]
    raise ValueError(f"{family.kind} is not an indexed spectral family")


def eval_basis_dx(family: BasisFamily, index: int, x, axis: int = 0):
    """First derivative of member ``index``; ``axis`` picks the 2D direction."""
    _check_index(family, index)
    x = _check_domain(x, family.dimension)
    if family.kind is BasisKind.SINE_1D:
        w = index * np.pi
        return w * np.cos(w * x)
    if family.kind is BasisKind.CLAMPED_BEAM_SINE:
        w = (2 * index - 1) * np.pi / 2.0
        return w * np.cos(w * x)
    if family.kind is BasisKind.TENSOR_SINE_2D:
        i1, i2 = _tensor_pair(family, index)
        if axis == 0:
            return i1 * np.pi * np.cos(i1 * np.pi * x[..., 0]) * np.sin(i2 * np.pi * x[..., 1])
        return i2 * np.pi * np.sin(i1 * np.pi * x[..., 0]) * np.cos(i2 * np.pi * x[..., 1])
    if family.kind is BasisKind.SHIFTED_LEGENDRE:
        return _legendre_table(index - 1, x, 1)[index - 1]
    raise ValueError(f"{family.kind} is not an indexed spectral family")


def eval_basis_dxx(family: BasisFamily, index: int, x, axis: int = 0):
    """Second derivative of member ``index`` along ``axis``."""
    _check_index(family, index)
    x = _check_domain(x, family.dimension)
    if family.kind is BasisKind.SINE_1D:
        w = index * np.pi
        return -(w**2) * np.sin(w * x)
    if family.kind is BasisKind.CLAMPED_BEAM_SINE:
        w = (2 * index - 1) * np.pi / 2.0
        return -(w**2) * np.sin(w * x)
    if family.kind is BasisKind.TENSOR_SINE_2D:
        i1, i2 = _tensor_pair(family, index)
        f1 = np.sin(i1 * np.pi * x[..., 0])
        f2 = np.sin(i2 * np.pi * x[..., 1])
        if axis == 0:
            return -((i1 * np.pi) ** 2) * f1 * f2
        return -((i2 * np.pi) ** 2) * f1 * f2
    if family.kind is BasisKind.SHIFTED_LEGENDRE:
        return _legendre_table(index - 1, x, 2)[index - 1]
    raise ValueError(f"{family.kind} is not an indexed spectral family")


def eval_constraint_shape(family: BasisFamily, center, x):
    """Evaluate a constraint-force shape centered at ``center``.

    Hat: max(0, 1 - |x - c| / h).  Gaussian RBF: (w/pi) exp(-w ||x - c||^2),
    which integrates to one over the plane.
    """
    if family.kind not in _CONSTRAINT_KINDS:
        raise ValueError(f"{family.kind} is not a constraint-force family")
    x = np.asarray(x, dtype=float)
    center = np.asarray(center, dtype=float)
    if family.kind is BasisKind.HAT_1D:
        return np.maximum(0.0, 1.0 - np.abs(x - center) / family.half_width)
    w = family.width
    if center.ndim == 0:
        sq = (x - center) ** 2
    else:
        sq = np.sum((x - center) ** 2, axis=-1)
    return (w / np.pi) * np.exp(-w * sq)


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights on [0,1] (1D) or [0,1]^2 (2D)."""

    points: np.ndarray
    weights: np.ndarray
    dimension: int


def gauss_legendre(order: int, dimension: int = 1) -> QuadratureRule:
    """Gauss-Legendre rule with ``order`` points per axis, shifted to [0,1].

    Exact for polynomials of degree <= 2*order - 1 per axis; the 2D rule is
    the tensor product.
    """
    if order < 1:
        raise ValueError("quadrature order must be >= 1")
    if dimension not in (1, 2):
        raise ValueError("only 1D and 2D rules are supported")
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes = 0.5 * (nodes + 1.0)
    weights = 0.5 * weights
    if dimension == 1:
        return QuadratureRule(nodes, weights, 1)
    xx, yy = np.meshgrid(nodes, nodes, indexing="ij")
    pts = np.stack([xx.ravel(), yy.ravel()], axis=-1)
    w2 = np.outer(weights, weights).ravel()
    return QuadratureRule(pts, w2, 2)


def gauss_legendre_panels(order: int, breakpoints) -> QuadratureRule:
    """Composite 1D Gauss-Legendre rule split at interior ``breakpoints``.

    Used when the integrand has kinks or jumps at known locations, so no
    panel straddles them.
    """
    edges = np.concatenate([[0.0], np.sort(np.asarray(breakpoints, dtype=float)), [1.0]])
    if np.any(edges < 0) or np.any(edges > 1):
        raise ValueError("breakpoints must lie inside [0,1]")
    base = gauss_legendre(order, 1)
    pts, wts = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        if b - a <= 0:
            continue
        pts.append(a + (b - a) * base.points)
        wts.append((b - a) * base.weights)
    return QuadratureRule(np.concatenate(pts), np.concatenate(wts), 1)
