"""Quantiles, sampling-distribution confidence bounds, sample moments, and
seeded random streams for data synthesis.

The quantile functions are self-contained (rational approximation plus
Newton refinement for the normal, incomplete-gamma inversion for the
chi-squared) so the statistical machinery carries no heavyweight
dependencies and the test suite can check them against an independent
implementation.

All randomness in the package flows through the splitmix64 counter-based
generator defined here; streams are pure functions of (seed, index), so
every synthetic data set is reproducible from its config.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Acklam's rational approximation to the inverse normal CDF.
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)


def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def _normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def normal_quantile(p: float) -> float:
    """Inverse standard-normal CDF, absolute error well below 1e-8."""
    if not 0.0 < p < 1.0:
        raise ValueError("probability must lie strictly inside (0,1)")
    p_low, p_high = 0.02425, 1.0 - 0.02425
    if p < p_low:
        q = math.sqrt(-2.0 * math.log(p))
        x = ((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
             / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    elif p <= p_high:
        q = p - 0.5
        r = q * q
        x = ((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
             / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0))
    else:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        x = -((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
              / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    # One Newton step on the exact CDF polishes to near machine precision.
    err = normal_cdf(x) - p
    x -= err / _normal_pdf(x)
    return x


def _reg_lower_gamma(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x), series/continued fraction."""
    if x < 0 or a <= 0:
        raise ValueError("invalid incomplete-gamma arguments")
    if x == 0.0:
        return 0.0
    lg = math.lgamma(a)
    if x < a + 1.0:
        # series expansion around zero
        term = 1.0 / a
        total = term
        n = a
        for _ in range(500):
            n += 1.0
            term *= x / n
            total += term
            if abs(term) < abs(total) * 1e-16:
                break
        return total * math.exp(-x + a * math.log(x) - lg)
    # Lentz continued fraction for Q(a, x)
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    q = math.exp(-x + a * math.log(x) - lg) * h
    return 1.0 - q


def chi2_cdf(x: float, dof: int) -> float:
    if dof < 1:
        raise ValueError("degrees of freedom must be >= 1")
    if x <= 0:
        return 0.0
    return _reg_lower_gamma(dof / 2.0, x / 2.0)


def _chi2_log_pdf(x: float, dof: int) -> float:
    a = dof / 2.0
    return (a - 1.0) * math.log(x) - x / 2.0 - math.lgamma(a) - a * math.log(2.0)


def chi2_quantile(p: float, dof: int) -> float:
    """Inverse chi-squared CDF: Wilson-Hilferty start, Newton on the CDF."""
    if not 0.0 < p < 1.0:
        raise ValueError("probability must lie strictly inside (0,1)")
    if dof < 1:
        raise ValueError("degrees of freedom must be >= 1")
    z = normal_quantile(p)
    f = 2.0 / (9.0 * dof)
    x = dof * (1.0 - f + z * math.sqrt(f)) ** 3
    if x <= 0:
        x = dof * math.exp((math.log(p) + math.lgamma(dof / 2.0) + dof / 2.0 * math.log(2.0)) * 2.0 / dof)
    for _ in range(100):
        err = chi2_cdf(x, dof) - p
        step = err / math.exp(_chi2_log_pdf(x, dof))
        # keep the iterate inside the support
        while x - step <= 0:
            step *= 0.5
        x -= step
        if abs(err) < 1e-14 or abs(step) < 1e-12 * x:
            break
    return x


@dataclass(frozen=True)
class ConfidenceBounds:
    """Interval limits for the sample mean (l1, l2) and sample variance
    (p1, p2) of a size-``count`` i.i.d. Gaussian sample with known sigma."""

    l1: float
    l2: float
    p1: float
    p2: float
    alpha: float
    count: int


def confidence_bounds(sigma: float, count: int, alpha: float) -> ConfidenceBounds:
    """Two-sided (1-alpha) bounds from the sampling distributions.

    Mean: normal with standard deviation sigma/sqrt(count).
    Variance: sigma^2/(count-1) times chi-squared with count-1 dof.
    """
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if count < 2:
        raise ValueError("need at least two samples")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0,1)")
    z = normal_quantile(alpha / 2.0)
    l1 = z * sigma / math.sqrt(count)
    s2 = sigma * sigma / (count - 1)
    p1 = chi2_quantile(alpha / 2.0, count - 1) * s2
    p2 = chi2_quantile(1.0 - alpha / 2.0, count - 1) * s2
    return ConfidenceBounds(l1=l1, l2=-l1, p1=p1, p2=p2, alpha=alpha, count=count)


def sample_moments(e) -> tuple[float, float]:
    """Sample mean and unbiased sample variance of a vector."""
    e = np.asarray(e, dtype=float)
    c = e.size
    if c < 2:
        raise ValueError("need at least two samples for a variance")
    s = e.sum()
    mean = s / c
    var = (np.sum(e * e) - s * s / c) / (c - 1)
    return float(mean), float(var)


@dataclass(frozen=True)
class NoiseModel:
    sigma: float
    seed: int

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")


_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def _splitmix64(seed: int, n: int, offset: int = 0) -> np.ndarray:
    """Counter-based splitmix64 stream: word i is a pure function of
    (seed, offset + i)."""
    idx = np.arange(offset + 1, offset + n + 1, dtype=np.uint64)
    z = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + idx * _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def sample_uniform(seed: int, n: int, offset: int = 0) -> np.ndarray:
    """n reproducible draws strictly inside (0,1)."""
    bits = _splitmix64(seed, n, offset)
    return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def sample_noise(model: NoiseModel, n: int, offset: int = 0) -> np.ndarray:
    """n reproducible N(0, sigma^2) draws via Box-Muller."""
    if model.sigma == 0.0:
        return np.zeros(n)
    m = (n + 1) // 2
    u = sample_uniform(model.seed, 2 * m, offset=2 * offset)
    u1, u2 = u[:m], u[m:]
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.empty(2 * m)
    z[0::2] = r * np.cos(2.0 * np.pi * u2)
    z[1::2] = r * np.sin(2.0 * np.pi * u2)
    return model.sigma * z[:n]
