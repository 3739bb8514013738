"""Reference distributions and exact laws of special linear statistics.

For a gas with density proportional to exp(-sum_i V(x_i)) prod_{i<j} W(x_i - x_j)
where V and W are homogeneous of degrees a and b, the potential statistic
sum_i V(X_i) is exactly Gamma(n d / a + n (n-1) b / (2 a), 1); when V is a
positive quadratic, the coordinate sums are exactly Gaussian. Specializing
to the quadratically confined planar gas gives

    X_1 + .. + X_n ~ N(0, I_2 / beta)
    |X_1|^2 + .. + |X_n|^2 ~ Gamma(n + beta n (n-1) / 4, beta n / 2)

valid at every fixed n, which makes them sharp finite-size oracles for the
samplers. At beta = 2 the moduli of the Ginibre eigenvalues admit the
Kostlan decomposition: as a multiset they are independent sqrt(Gamma(k, 1)),
k = 1..n, which also yields the spectral radius and its Gumbel fluctuation
after the kappa_n = log(n / 2pi) - 2 log log n normalization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special import reg_lower_gamma

__all__ = [
    "DistributionSpec",
    "Gamma",
    "Normal",
    "Gumbel",
    "Exponential",
    "potential_sum_law",
    "sum_law_gaussian",
    "beta_ginibre_moments",
    "beta_ginibre_laws",
    "hermite_laws",
    "kostlan_moduli",
    "gumbel_normalization",
    "spectral_radius_sample",
    "spectral_radius_cdf",
]


class DistributionSpec:
    """Analytic reference law with CDF/quantile evaluation, used as oracle."""

    def cdf(self, x: float) -> float:
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError

    def variance(self) -> float:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    def quantile(self, p: float) -> float:
        """Inverse CDF by bisection on an expanding bracket (1e-13 relative)."""
        if not 0.0 < p < 1.0:
            raise ValueError(f"p must be in (0, 1), got {p}")
        lo, hi = self._bracket()
        while self.cdf(lo) > p:
            lo = lo * 2.0 if lo < 0 else lo - max(1.0, abs(lo))
        while self.cdf(hi) < p:
            hi = hi * 2.0 if hi > 0 else hi + max(1.0, abs(hi))
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if hi - lo <= 1e-13 * (1.0 + abs(mid)):
                break
            if self.cdf(mid) < p:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def _bracket(self) -> tuple[float, float]:
        m = self.mean()
        s = math.sqrt(self.variance())
        return m - 2.0 * s, m + 2.0 * s


@dataclass(frozen=True)
class Gamma(DistributionSpec):
    """Gamma(shape, rate) with density rate^shape x^(shape-1) e^(-rate x) / Gamma(shape)."""

    shape: float
    rate: float

    def __post_init__(self):
        if self.shape <= 0 or self.rate <= 0:
            raise ValueError("shape and rate must be positive")

    def cdf(self, x):
        if x <= 0.0:
            return 0.0
        return reg_lower_gamma(self.shape, self.rate * x)

    def mean(self):
        return self.shape / self.rate

    def variance(self):
        return self.shape / self.rate**2

    def sample(self, rng, size):
        return rng.gamma(self.shape, 1.0 / self.rate, size=size)

    def scaled(self, sigma: float) -> "Gamma":
        """Law of sigma * X: scaling divides the rate."""
        if sigma <= 0:
            raise ValueError("scale factor must be positive")
        return Gamma(self.shape, self.rate / sigma)

    def _bracket(self):
        return 0.0, self.mean() + 2.0 * math.sqrt(self.variance()) + 1.0


@dataclass(frozen=True)
class Normal(DistributionSpec):
    """Normal with given mean and variance."""

    mu: float
    var: float

    def __post_init__(self):
        if self.var <= 0:
            raise ValueError("variance must be positive")

    def cdf(self, x):
        return 0.5 * (1.0 + math.erf((x - self.mu) / math.sqrt(2.0 * self.var)))

    def mean(self):
        return self.mu

    def variance(self):
        return self.var

    def sample(self, rng, size):
        return self.mu + math.sqrt(self.var) * rng.standard_normal(size)


@dataclass(frozen=True)
class Gumbel(DistributionSpec):
    """Standard Gumbel, CDF exp(-exp(-x)); the law of -log X for X ~ Exp(1)."""

    def cdf(self, x):
        return math.exp(-math.exp(-x))

    def quantile(self, p):
        if not 0.0 < p < 1.0:
            raise ValueError(f"p must be in (0, 1), got {p}")
        return -math.log(-math.log(p))

    def mean(self):
        return 0.5772156649015329  # Euler-Mascheroni

    def variance(self):
        return math.pi**2 / 6.0

    def sample(self, rng, size):
        return -np.log(rng.exponential(1.0, size=size))


@dataclass(frozen=True)
class Exponential(DistributionSpec):
    """Exponential(rate)."""

    rate: float

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError("rate must be positive")

    def cdf(self, x):
        return 0.0 if x <= 0.0 else -math.expm1(-self.rate * x)

    def quantile(self, p):
        if not 0.0 < p < 1.0:
            raise ValueError(f"p must be in (0, 1), got {p}")
        return -math.log1p(-p) / self.rate

    def mean(self):
        return 1.0 / self.rate

    def variance(self):
        return 1.0 / self.rate**2

    def sample(self, rng, size):
        return rng.exponential(1.0 / self.rate, size=size)


def potential_sum_law(n: int, d: int, a: float, b: float) -> Gamma:
    """Law of sum_i V(X_i) for V, W homogeneous of degrees a > 0 and b >= 0:
    Gamma(n d / a + n (n-1) b / (2 a), 1)."""
    if a <= 0:
        raise ValueError(f"potential homogeneity degree must be positive, got a={a}")
    if b < 0:
        raise ValueError(f"interaction homogeneity degree must be >= 0, got b={b}")
    shape = n * d / a + n * (n - 1) * b / (2.0 * a)
    return Gamma(shape, 1.0)


def sum_law_gaussian(gamma_coeff: float, n: int, d: int) -> Normal:
    """Per-coordinate law of X_1 + .. + X_n when V = gamma_coeff |.|^2:
    N(0, n / (2 gamma_coeff))."""
    if gamma_coeff <= 0:
        raise ValueError("gamma_coeff must be positive")
    return Normal(0.0, n / (2.0 * gamma_coeff))


def beta_ginibre_moments(n: int, beta: float) -> tuple[float, float]:
    """(E|sum X_i|^2, E sum|X_i|^2) = (2/beta, 2/beta + (n-1)/2)."""
    if n < 1 or beta <= 0:
        raise ValueError("need n >= 1 and beta > 0")
    return 2.0 / beta, 2.0 / beta + (n - 1) / 2.0


def beta_ginibre_laws(n: int, beta: float) -> tuple[Normal, Gamma]:
    """Exact laws for the quadratically confined planar gas: per-coordinate
    law of sum X_i and the law of sum |X_i|^2."""
    if n < 1 or beta <= 0:
        raise ValueError("need n >= 1 and beta > 0")
    coord = Normal(0.0, 1.0 / beta)
    radial = Gamma(n + beta * n * (n - 1) / 4.0, beta * n / 2.0)
    return coord, radial


def hermite_laws(n: int, beta: float) -> tuple[Normal, Gamma]:
    """Exact laws for the quadratically confined gas on the line:
    sum X_i ~ N(0, 2/beta), sum X_i^2 ~ Gamma(n/2 + beta n(n-1)/4, beta n/4)."""
    if n < 2 or beta <= 0:
        raise ValueError("need n >= 2 and beta > 0")
    return (
        Normal(0.0, 2.0 / beta),
        Gamma(n / 2.0 + beta * n * (n - 1) / 4.0, beta * n / 4.0),
    )


def kostlan_moduli(n: int, rng: np.random.Generator) -> np.ndarray:
    """One draw of the n unordered Ginibre eigenvalue moduli.

    Independent Z_k with Z_k^2 ~ Gamma(k, 1), k = 1..n, under a uniform
    random permutation.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    g = rng.gamma(np.arange(1, n + 1, dtype=float), 1.0)
    return np.sqrt(g[rng.permutation(n)])


def gumbel_normalization(n: int) -> tuple[float, float]:
    """Centering and scale of the spectral radius fluctuation.

    kappa_n = log(n / 2pi) - 2 log log n must be positive; then
    (rho_n - center) / scale converges to the standard Gumbel with
    center = 1 + sqrt(kappa_n / 4n) and scale = 1 / sqrt(4 n kappa_n).
    """
    if n < 3:
        raise ValueError("need n >= 3 for log log n")
    kappa = math.log(n / (2.0 * math.pi)) - 2.0 * math.log(math.log(n))
    if kappa <= 0.0:
        raise ValueError(
            f"normalization undefined at n={n}: kappa_n={kappa:.4f} <= 0; "
            "increase n until log(n/2pi) > 2 log log n"
        )
    center = 1.0 + math.sqrt(kappa / (4.0 * n))
    scale = 1.0 / math.sqrt(4.0 * n * kappa)
    return center, scale


def spectral_radius_sample(n: int, rng: np.random.Generator) -> float:
    """One draw of rho_n = max_k |lambda_k| / sqrt(n) via the moduli
    decomposition (the permutation is irrelevant for the maximum)."""
    if n < 1:
        raise ValueError("need n >= 1")
    g = rng.gamma(np.arange(1, n + 1, dtype=float), 1.0)
    return math.sqrt(float(np.max(g)) / n)


def spectral_radius_cdf(n: int, r: float) -> float:
    """Exact finite-n law of the spectral radius:
    P(rho_n <= r) = prod_{k<=n} P(Gamma(k, 1) <= n r^2).

    The independent-moduli decomposition makes the maximum a product of
    incomplete-gamma factors; evaluated through scipy's vectorized
    implementation since n reaches 1e5 here.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    if r <= 0.0:
        return 0.0
    from scipy import special

    factors = special.gammainc(np.arange(1, n + 1, dtype=float), n * r * r)
    if np.any(factors <= 0.0):
        return 0.0
    return float(math.exp(np.sum(np.log(factors))))
